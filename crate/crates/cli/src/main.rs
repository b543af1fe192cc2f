use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dendritic_cli::commands::{demo, eval, inspect, train};
use dendritic_cli::{Calibration, CliError, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "dendritic", version, about = "Online learning with stochastic dendritic plasticity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long = "out")]
    out: Option<PathBuf>,
    #[arg(long)]
    data_dir: Option<PathBuf>,
    #[arg(long)]
    train_count: Option<usize>,
    #[arg(long)]
    test_count: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Override one value, `section.key=value`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn load(&self, calibration: Calibration) -> Result<RunConfig, CliError> {
        let overrides = Overrides {
            seed: self.seed,
            output_dir: self.out.clone(),
            data_dir: self.data_dir.clone(),
            train_count: self.train_count,
            test_count: self.test_count,
            epochs: self.epochs,
            set: self.set.clone(),
        };
        RunConfig::load(self.config.as_deref(), &overrides, calibration)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train on the MNIST training split, then evaluate on the test split.
    Train {
        #[command(flatten)]
        common: Common,
        /// Skip the evaluation after training.
        #[arg(long)]
        no_eval: bool,
    },
    /// Evaluate a checkpoint with learning disabled.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        checkpoint: PathBuf,
    },
    /// Single-neuron learning trace under a positive then a negative teacher.
    #[command(name = "demo-fig3")]
    DemoFig3 {
        #[command(flatten)]
        common: Common,
    },
    /// Summarize a weight checkpoint.
    Inspect {
        checkpoint: PathBuf,
        /// Write per-class effective weight maps to this CSV file.
        #[arg(long)]
        map: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train { common, no_eval } => {
            let cfg = common.load(Calibration::Encoding)?;
            let report = train::cmd_train(&cfg)?;
            if !no_eval {
                let ckpt = report.network.checkpoint();
                let test = dendritic_cli::dataset::load_test(&cfg.run.data_dir, cfg.run.split, cfg.encoding.seed)?
                    .truncate(cfg.run.test_count);
                eval::eval_on(&cfg, &ckpt, &test)?;
            }
        }
        Command::Eval { common, checkpoint } => {
            let cfg = common.load(Calibration::Encoding)?;
            eval::cmd_eval(&cfg, &checkpoint)?;
        }
        Command::DemoFig3 { common } => {
            let cfg = common.load(Calibration::Demo)?;
            demo::cmd_demo_fig3(&cfg)?;
        }
        Command::Inspect { checkpoint, map } => {
            inspect::cmd_inspect(&checkpoint, map.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
