use std::path::Path;

use dendritic_core::{Checkpoint, Network};

use super::{ensure_dir, present_sample};
use crate::config::RunConfig;
use crate::dataset::{load_test, Samples};
use crate::error::CliError;
use crate::metrics::{write_confusion, EpochSummary, SampleWriter};

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub summary: EpochSummary,
    /// Rows are true labels, columns predictions.
    pub confusion: Vec<Vec<u64>>,
}

impl EvalReport {
    pub fn accuracy(&self) -> f64 {
        self.summary.accuracy
    }
}

pub fn cmd_eval(cfg: &RunConfig, checkpoint: &Path) -> Result<EvalReport, CliError> {
    let ckpt = Checkpoint::load(checkpoint)?;
    let test = load_test(&cfg.run.data_dir, cfg.run.split, cfg.encoding.seed)?;
    eval_on(cfg, &ckpt, &test.truncate(cfg.run.test_count))
}

/// Inference with the teacher off and plasticity disabled. Writes
/// `eval_samples.csv` and `confusion.csv` to `run.output_dir`.
pub fn eval_on(cfg: &RunConfig, ckpt: &Checkpoint, samples: &Samples) -> Result<EvalReport, CliError> {
    let mut net = Network::build(cfg.network.clone())?;
    net.load_checkpoint(ckpt)?;
    net.set_learning(false);
    let enc = cfg.encoding.without_teacher();

    let out = &cfg.run.output_dir;
    ensure_dir(out)?;
    let n_outputs = cfg.network.n_outputs;
    let mut writer = SampleWriter::create(&out.join("eval_samples.csv"), n_outputs)?;
    let mut confusion = vec![vec![0u64; n_outputs]; n_outputs];
    let mut records = Vec::with_capacity(samples.len());
    for &index in &samples.indices {
        let label = samples.dataset.label(index) as usize;
        let rec = present_sample(&mut net, samples.dataset.image(index), label, index, 0, &enc)?;
        confusion[label][rec.predicted] += 1;
        writer.write(&rec)?;
        records.push(rec);
    }
    writer.finish()?;
    write_confusion(&out.join("confusion.csv"), &confusion)?;
    let summary = EpochSummary::from_records(0, &records);
    println!(
        "accuracy {:.4} ({}/{}), no response on {}",
        summary.accuracy, summary.correct, summary.samples, summary.no_response
    );
    Ok(EvalReport { summary, confusion })
}
