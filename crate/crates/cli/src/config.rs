//! Run configuration: one sectioned `key = value` file (TOML) plus overrides.
//!
//! Sections: `[network]`, `[encoding]`, `[run]`, `[demo]`. Every key is
//! optional. Two network values are derived when the file leaves them out:
//! `unit_current` from `threshold` and `tau_sensory`, and `i_lsb` from the
//! teacher drive at `encoding.teach_rate_pos` (or `demo.teach_rate` for the
//! demo command).

use std::fs;
use std::path::{Path, PathBuf};

use dendritic_core::data::{EncodingConfig, Split};
use dendritic_core::NetworkConfig;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub epochs: usize,
    /// Training samples per epoch; all when absent.
    pub train_count: Option<usize>,
    pub test_count: Option<usize>,
    /// Progress print interval, in samples.
    pub log_every: usize,
    /// Periodic checkpoint interval, in samples.
    pub checkpoint_every: usize,
    pub output_dir: PathBuf,
    pub data_dir: PathBuf,
    pub split: Split,
    /// Shuffle the training order every epoch.
    pub shuffle: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            epochs: 1,
            train_count: None,
            test_count: None,
            log_every: 1000,
            checkpoint_every: 5000,
            output_dir: PathBuf::from("runs/latest"),
            data_dir: PathBuf::from("data/mnist"),
            split: Split::Canonical,
            shuffle: true,
        }
    }
}

/// Single-neuron demo: a row driven by Poisson inputs under a positive and
/// then a negative teacher.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemoConfig {
    pub n_inputs: usize,
    pub input_rate: f64,
    pub teach_rate: f64,
    /// Length of each teacher phase, seconds.
    pub phase_duration: f64,
    /// Input whose synapse pair is written to the trace file.
    pub tracked_input: usize,
    /// Starting level of every synapse of the row.
    pub initial_level: u8,
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self {
            n_inputs: 16,
            input_rate: 200.0,
            teach_rate: 1000.0,
            phase_duration: 0.3,
            tracked_input: 0,
            initial_level: 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub network: NetworkConfig,
    pub encoding: EncodingConfig,
    pub run: RunSection,
    pub demo: DemoConfig,
}

/// Which teacher rate calibrates a derived `i_lsb`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Calibration {
    Encoding,
    Demo,
}

/// Command-line flags common to every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub data_dir: Option<PathBuf>,
    pub train_count: Option<usize>,
    pub test_count: Option<usize>,
    pub epochs: Option<usize>,
    /// `section.key=value` assignments, applied after the file.
    pub set: Vec<String>,
}

impl RunConfig {
    /// Defaults with derived values resolved.
    pub fn resolved() -> Self {
        Self::from_table(Table::new(), Calibration::Encoding).expect("defaults are valid")
    }

    pub fn load(path: Option<&Path>, overrides: &Overrides, calibration: Calibration) -> Result<Self, CliError> {
        let mut table = match path {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                text.parse::<Table>().map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => Table::new(),
        };
        for assignment in &overrides.set {
            apply_assignment(&mut table, assignment)?;
        }
        let flag = |table: &mut Table, key: &str, v: Value| set_dotted(table, key, v);
        if let Some(seed) = overrides.seed {
            let v = Value::Integer(i64::try_from(seed).map_err(|_| CliError::Config("seed exceeds i64".into()))?);
            flag(&mut table, "network.master_seed", v.clone())?;
            flag(&mut table, "encoding.seed", v)?;
        }
        if let Some(dir) = &overrides.output_dir {
            flag(&mut table, "run.output_dir", Value::String(dir.display().to_string()))?;
        }
        if let Some(dir) = &overrides.data_dir {
            flag(&mut table, "run.data_dir", Value::String(dir.display().to_string()))?;
        }
        for (key, v) in [
            ("run.train_count", overrides.train_count),
            ("run.test_count", overrides.test_count),
            ("run.epochs", overrides.epochs),
        ] {
            if let Some(n) = v {
                flag(&mut table, key, Value::Integer(n as i64))?;
            }
        }
        Self::from_table(table, calibration)
    }

    fn from_table(table: Table, calibration: Calibration) -> Result<Self, CliError> {
        let has = |section: &str, key: &str| {
            table.get(section).and_then(Value::as_table).is_some_and(|t| t.contains_key(key))
        };
        let explicit_unit = has("network", "unit_current");
        let explicit_lsb = has("network", "i_lsb");
        let mut cfg: RunConfig =
            Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        if !explicit_unit {
            cfg.network.unit_current = NetworkConfig::unit_current_for(cfg.network.threshold, cfg.network.tau_sensory);
        }
        if !explicit_lsb {
            let rate = match calibration {
                Calibration::Encoding => cfg.encoding.teach_rate_pos,
                Calibration::Demo => cfg.demo.teach_rate,
            };
            if rate > 0.0 {
                cfg.network.i_lsb = cfg.network.calibrated_lsb(rate);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.network.validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.encoding.validate().map_err(CliError::Config)?;
        let r = &self.run;
        if r.epochs == 0 || r.log_every == 0 || r.checkpoint_every == 0 {
            return Err(CliError::Config("epochs, log_every and checkpoint_every must be at least 1".into()));
        }
        if r.train_count == Some(0) || r.test_count == Some(0) {
            return Err(CliError::Config("sample counts must be at least 1".into()));
        }
        let d = &self.demo;
        if d.n_inputs == 0 || d.tracked_input >= d.n_inputs {
            return Err(CliError::Config("demo needs at least one input and a tracked input in range".into()));
        }
        if d.initial_level > dendritic_core::plasticity::MAX_LEVEL {
            return Err(CliError::Config("demo.initial_level exceeds 4 bits".into()));
        }
        if !(d.phase_duration > 0.0 && d.input_rate >= 0.0 && d.teach_rate >= 0.0) {
            return Err(CliError::Config("demo durations and rates must be positive".into()));
        }
        Ok(())
    }

    /// Serializes the fully resolved configuration.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn apply_assignment(table: &mut Table, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("expected section.key=value, got `{assignment}`")))?;
    set_dotted(table, key.trim(), parse_value(raw.trim()))
}

/// TOML literal when it parses as one, otherwise a bare string.
fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

fn set_dotted(table: &mut Table, key: &str, value: Value) -> Result<(), CliError> {
    let (section, field) =
        key.split_once('.').ok_or_else(|| CliError::Config(format!("override key `{key}` must be section.key")))?;
    let entry = table.entry(section.to_string()).or_insert_with(|| Value::Table(Table::new()));
    let Value::Table(inner) = entry else {
        return Err(CliError::Config(format!("`{section}` is not a section")));
    };
    if field.contains('.') {
        return set_dotted(inner, field, value);
    }
    inner.insert(field.to_string(), value);
    Ok(())
}
