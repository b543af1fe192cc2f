use std::fs;

use dendritic_core::seed::{self, domain};
use dendritic_core::Network;
use rand::seq::SliceRandom;

use super::{ensure_dir, present_sample};
use crate::config::RunConfig;
use crate::dataset::{load_mnist, Samples};
use crate::error::CliError;
use crate::metrics::{write_epochs, EpochSummary, SampleWriter};

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub epochs: Vec<EpochSummary>,
    pub network: Network,
}

/// Loads the configured dataset and trains on its training side.
pub fn cmd_train(cfg: &RunConfig) -> Result<TrainReport, CliError> {
    let (train, _) = load_mnist(&cfg.run.data_dir, cfg.run.split, cfg.encoding.seed)?;
    train_on(cfg, &train.truncate(cfg.run.train_count))
}

/// Streams `samples` one at a time with the teacher active.
///
/// Writes to `run.output_dir`: the resolved `config.toml`, `initial.sdw`,
/// `checkpoint_NNNNNNN.sdw` every `checkpoint_every` samples, `final.sdw`,
/// `train_samples.csv` and `train_epochs.csv`.
pub fn train_on(cfg: &RunConfig, samples: &Samples) -> Result<TrainReport, CliError> {
    let out = &cfg.run.output_dir;
    ensure_dir(out)?;
    fs::write(out.join("config.toml"), cfg.to_toml())?;

    let mut net = Network::build(cfg.network.clone())?;
    if samples.dataset.pixels_per_image() != net.config().n_inputs {
        return Err(CliError::Config(format!(
            "images have {} pixels but the network has {} inputs",
            samples.dataset.pixels_per_image(),
            net.config().n_inputs
        )));
    }
    net.checkpoint().save(out.join("initial.sdw"))?;

    let mut writer = SampleWriter::create(&out.join("train_samples.csv"), cfg.network.n_outputs)?;
    let mut summaries = Vec::with_capacity(cfg.run.epochs);
    let mut seen = 0usize;
    for epoch in 1..=cfg.run.epochs {
        let mut order = samples.indices.clone();
        if cfg.run.shuffle {
            order.shuffle(&mut seed::rng_for(cfg.encoding.seed, &[domain::ORDER, epoch as u64]));
        }
        let mut records = Vec::with_capacity(order.len());
        for &index in &order {
            let label = samples.dataset.label(index) as usize;
            let rec = present_sample(&mut net, samples.dataset.image(index), label, index, epoch, &cfg.encoding)?;
            writer.write(&rec)?;
            records.push(rec);
            seen += 1;
            if records.len() % cfg.run.log_every == 0 {
                let s = EpochSummary::from_records(epoch, &records);
                println!(
                    "epoch {epoch} sample {}/{} running accuracy {:.4} updates {}",
                    records.len(),
                    order.len(),
                    s.accuracy,
                    s.total_updates
                );
            }
            if seen.is_multiple_of(cfg.run.checkpoint_every) {
                net.checkpoint().save(out.join(format!("checkpoint_{seen:07}.sdw")))?;
            }
        }
        let summary = EpochSummary::from_records(epoch, &records);
        println!(
            "epoch {epoch} done: accuracy {:.4} ({}/{}), updates {}",
            summary.accuracy, summary.correct, summary.samples, summary.total_updates
        );
        summaries.push(summary);
    }
    writer.finish()?;
    write_epochs(&out.join("train_epochs.csv"), &summaries)?;
    net.checkpoint().save(out.join("final.sdw"))?;
    Ok(TrainReport { epochs: summaries, network: net })
}
