//! CSV metrics. Every file starts with a `# schema=1` comment line followed
//! by a fixed header row.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::CliError;

pub const SCHEMA_LINE: &str = "# schema=1";

/// Outcome of presenting one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub epoch: usize,
    pub index: usize,
    pub label: usize,
    pub predicted: usize,
    pub no_response: bool,
    pub spike_counts: Vec<u32>,
    pub accepted_updates: u64,
    pub applied_updates: u64,
    /// Mean `|teach - sensory|` over the sample's learning events.
    pub mean_abs_error: f64,
}

impl SampleRecord {
    pub fn correct(&self) -> bool {
        self.label == self.predicted
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochSummary {
    pub epoch: usize,
    pub samples: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub no_response: usize,
    pub mean_abs_error: f64,
    pub total_updates: u64,
}

impl EpochSummary {
    pub fn from_records(epoch: usize, records: &[SampleRecord]) -> Self {
        let samples = records.len();
        let correct = records.iter().filter(|r| r.correct()).count();
        let mean_abs_error =
            if samples == 0 { 0.0 } else { records.iter().map(|r| r.mean_abs_error).sum::<f64>() / samples as f64 };
        Self {
            epoch,
            samples,
            correct,
            accuracy: if samples == 0 { 0.0 } else { correct as f64 / samples as f64 },
            no_response: records.iter().filter(|r| r.no_response).count(),
            mean_abs_error,
            total_updates: records.iter().map(|r| r.accepted_updates).sum(),
        }
    }
}

pub fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>, CliError> {
    let file = File::create(path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{SCHEMA_LINE}")?;
    Ok(csv::Writer::from_writer(out))
}

pub struct SampleWriter {
    inner: csv::Writer<BufWriter<File>>,
}

impl SampleWriter {
    pub fn create(path: &Path, n_outputs: usize) -> Result<Self, CliError> {
        let mut inner = csv_writer(path)?;
        let mut header: Vec<String> = [
            "epoch",
            "index",
            "label",
            "predicted",
            "no_response",
            "accepted_updates",
            "applied_updates",
            "mean_abs_error",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        header.extend((0..n_outputs).map(|j| format!("count_{j}")));
        inner.write_record(&header)?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, r: &SampleRecord) -> Result<(), CliError> {
        let mut row = vec![
            r.epoch.to_string(),
            r.index.to_string(),
            r.label.to_string(),
            r.predicted.to_string(),
            u8::from(r.no_response).to_string(),
            r.accepted_updates.to_string(),
            r.applied_updates.to_string(),
            r.mean_abs_error.to_string(),
        ];
        row.extend(r.spike_counts.iter().map(|c| c.to_string()));
        self.inner.write_record(&row)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.inner.flush()?;
        Ok(())
    }
}

pub fn write_epochs(path: &Path, epochs: &[EpochSummary]) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record(["epoch", "samples", "correct", "accuracy", "no_response", "mean_abs_error", "total_updates"])?;
    for e in epochs {
        w.write_record([
            e.epoch.to_string(),
            e.samples.to_string(),
            e.correct.to_string(),
            e.accuracy.to_string(),
            e.no_response.to_string(),
            e.mean_abs_error.to_string(),
            e.total_updates.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Confusion matrix, rows = true label, columns = predicted label.
pub fn write_confusion(path: &Path, confusion: &[Vec<u64>]) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["label".to_string()];
    header.extend((0..confusion.len()).map(|k| format!("pred_{k}")));
    w.write_record(&header)?;
    for (label, row) in confusion.iter().enumerate() {
        let mut rec = vec![label.to_string()];
        rec.extend(row.iter().map(|c| c.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads back a metrics CSV written by this module, skipping the schema line.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let text = std::fs::read_to_string(path)?;
    let body = text
        .strip_prefix(SCHEMA_LINE)
        .ok_or_else(|| CliError::Output(format!("{}: missing schema line", path.display())))?;
    let mut rdr = csv::Reader::from_reader(body.trim_start_matches('\n').as_bytes());
    let header = rdr.headers()?.iter().map(str::to_string).collect();
    let rows =
        rdr.records().map(|r| r.map(|rec| rec.iter().map(str::to_string).collect())).collect::<Result<_, _>>()?;
    Ok((header, rows))
}
