use std::path::Path;

use dendritic_core::Checkpoint;

use crate::error::CliError;
use crate::metrics::csv_writer;

#[derive(Debug, Clone, PartialEq)]
pub struct InspectReport {
    pub n_inputs: u32,
    pub n_outputs: u32,
    pub exc_histogram: [u64; 16],
    pub inh_histogram: [u64; 16],
    /// Mean effective level (exc - inh) of each output's incoming synapses.
    pub class_means: Vec<f64>,
}

impl InspectReport {
    pub fn from_checkpoint(c: &Checkpoint) -> Self {
        let (exc_histogram, inh_histogram) = c.histograms();
        let (n_in, n_out) = (c.n_inputs as usize, c.n_outputs as usize);
        let class_means = (0..n_out)
            .map(|j| {
                let s: i64 = (0..n_in).map(|i| i64::from(c.exc[i * n_out + j]) - i64::from(c.inh[i * n_out + j])).sum();
                s as f64 / n_in as f64
            })
            .collect();
        Self { n_inputs: c.n_inputs, n_outputs: c.n_outputs, exc_histogram, inh_histogram, class_means }
    }

    /// Pearson chi-square of a level histogram against the uniform law on 0..=15.
    pub fn chi_square_uniform(hist: &[u64; 16]) -> f64 {
        let n: u64 = hist.iter().sum();
        let expected = n as f64 / 16.0;
        hist.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum()
    }
}

/// Prints a summary; with `map_csv`, also writes each output's effective
/// weights as a square map (requires a square input count).
pub fn cmd_inspect(checkpoint: &Path, map_csv: Option<&Path>) -> Result<InspectReport, CliError> {
    let ckpt = Checkpoint::load(checkpoint)?;
    let report = InspectReport::from_checkpoint(&ckpt);
    println!("shape: {} inputs x {} outputs", report.n_inputs, report.n_outputs);
    for (name, h) in [("excitatory", &report.exc_histogram), ("inhibitory", &report.inh_histogram)] {
        let cells: Vec<String> = h.iter().map(u64::to_string).collect();
        println!(
            "{name} levels 0..15: {} (chi2 vs uniform {:.2})",
            cells.join(" "),
            InspectReport::chi_square_uniform(h)
        );
    }
    for (j, m) in report.class_means.iter().enumerate() {
        println!("output {j}: mean effective level {m:+.3}");
    }
    if let Some(path) = map_csv {
        write_maps(&ckpt, path)?;
    }
    Ok(report)
}

fn write_maps(c: &Checkpoint, path: &Path) -> Result<(), CliError> {
    let n_in = c.n_inputs as usize;
    let n_out = c.n_outputs as usize;
    let side = (n_in as f64).sqrt().round() as usize;
    if side * side != n_in {
        return Err(CliError::Usage(format!("{n_in} inputs do not form a square map")));
    }
    let mut w = csv_writer(path)?;
    let mut header = vec!["class".to_string(), "row".to_string()];
    header.extend((0..side).map(|col| format!("c{col}")));
    w.write_record(&header)?;
    for j in 0..n_out {
        for row in 0..side {
            let mut rec = vec![j.to_string(), row.to_string()];
            rec.extend((0..side).map(|col| {
                let k = (row * side + col) * n_out + j;
                (i32::from(c.exc[k]) - i32::from(c.inh[k])).to_string()
            }));
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_zero_checkpoint() {
        let r = InspectReport::from_checkpoint(&Checkpoint::zeros(4, 2));
        assert_eq!(r.exc_histogram[0], 8);
        assert_eq!(r.inh_histogram[0], 8);
        assert!(r.exc_histogram[1..].iter().all(|&c| c == 0));
        assert_eq!(r.class_means, vec![0.0, 0.0]);
    }

    #[test]
    fn chi_square_of_flat_histogram_is_zero() {
        assert_eq!(InspectReport::chi_square_uniform(&[10; 16]), 0.0);
    }
}
