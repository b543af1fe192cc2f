pub mod demo;
pub mod eval;
pub mod inspect;
pub mod train;

use std::fs;
use std::path::Path;

use dendritic_core::data::{encode_poisson, make_teacher, sample_seed, EncodingConfig};
use dendritic_core::{classify, merge_streams, Network};

use crate::error::CliError;
use crate::metrics::SampleRecord;

pub(crate) fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))
}

/// Presents one image (with teacher trains when the encoding has nonzero
/// teacher rates), lets the network settle through the gap, and classifies
/// by spike count over the presentation window.
pub(crate) fn present_sample(
    net: &mut Network,
    image: &[u8],
    label: usize,
    index: usize,
    epoch: usize,
    enc: &EncodingConfig,
) -> Result<SampleRecord, CliError> {
    let n_outputs = net.config().n_outputs;
    let seed = sample_seed(enc.seed, index as u64);
    let sensory = encode_poisson(image, enc, seed);
    let teach = make_teacher(label, n_outputs, enc, seed);
    let events = merge_streams(&[&sensory, &teach]).expect("encoders emit sorted streams");
    let window = net.run_window(&events, enc.present_duration, false)?;
    net.run_window(&[], enc.gap_duration, false)?;
    let c = classify(&window.spike_counts);
    let s = window.stats;
    Ok(SampleRecord {
        epoch,
        index,
        label,
        predicted: c.class,
        no_response: c.no_response,
        spike_counts: window.spike_counts,
        accepted_updates: s.accepted_updates,
        applied_updates: s.applied_updates,
        mean_abs_error: if s.learning_events == 0 { 0.0 } else { s.abs_mismatch_sum / s.learning_events as f64 },
    })
}
