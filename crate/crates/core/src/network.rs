//! Single-layer network of dendritic neurons with paired plastic synapses.
//!
//! Every (input, output) pair owns one excitatory and one inhibitory 4-bit
//! synapse. Each output row has its own learning block (one LFSR) that runs
//! once per sensory spike; both synapses of the spiking pair receive the
//! same accepted direction.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checkpoint::Checkpoint;
use crate::dynamics::{ClockConfig, NeuronParams, NeuronState, DEFAULT_DT, DEFAULT_REFRACTORY, DEFAULT_TAU};
use crate::event::{check_sorted, SpikeEvent, SpikeKind, UnsortedStream};
use crate::plasticity::{
    step_level, Direction, LearningParams, Lfsr6, LfsrTaps, Polarity, QuantWeight, DAC_CODES, MAX_LEVEL,
};
use crate::seed::{self, domain};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("invalid network configuration: {0}")]
    InvalidConfig(String),
    #[error("input index {index} out of range for {n_inputs} inputs")]
    InputOutOfRange { index: usize, n_inputs: usize },
    #[error("output index {index} out of range for {n_outputs} outputs")]
    OutputOutOfRange { index: usize, n_outputs: usize },
    #[error("event at t={time} precedes network time {now}")]
    TimeReversal { time: f64, now: f64 },
    #[error("event at t={time} outside window of {duration} s")]
    EventOutsideWindow { time: f64, duration: f64 },
    #[error(transparent)]
    Unsorted(#[from] UnsortedStream),
    #[error("checkpoint shape {found:?} does not match network shape {expected:?}")]
    ShapeMismatch { expected: (usize, usize), found: (usize, usize) },
}

/// Which polarities exist on each input line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Connectivity {
    /// One excitatory and one inhibitory synapse per (input, output) pair.
    Paired,
    /// The first `excitatory` inputs are excitatory only and the remaining
    /// ones inhibitory only, as on a hardware row with a fixed split.
    Split { excitatory: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    pub n_inputs: usize,
    pub n_outputs: usize,
    pub tau_soma: f64,
    pub tau_sensory: f64,
    pub tau_teach: f64,
    pub threshold: f64,
    pub reset: f64,
    pub refractory: f64,
    pub alpha: f64,
    pub i_lsb: f64,
    pub unit_current: f64,
    pub tie_band: f64,
    pub teach_weight: f64,
    pub dt: f64,
    pub master_seed: u64,
    pub lfsr_taps: LfsrTaps,
    pub connectivity: Connectivity,
    /// Interval of the optional trace log, seconds.
    pub log_interval: f64,
}

/// Poisson rate at which the default calibration is evaluated.
pub const NOMINAL_TEACH_RATE: f64 = 250.0;

impl Default for NetworkConfig {
    fn default() -> Self {
        let threshold = 1.0;
        let tau = DEFAULT_TAU;
        let teach_weight = 0.4;
        let mut cfg = Self {
            n_inputs: 784,
            n_outputs: 10,
            tau_soma: tau,
            tau_sensory: tau,
            tau_teach: tau,
            threshold,
            reset: 0.0,
            refractory: DEFAULT_REFRACTORY,
            alpha: 1.0,
            i_lsb: 0.0,
            unit_current: Self::unit_current_for(threshold, tau),
            tie_band: 0.0,
            teach_weight,
            dt: DEFAULT_DT,
            master_seed: 0,
            lfsr_taps: LfsrTaps::default(),
            connectivity: Connectivity::Paired,
            log_interval: 1e-3,
        };
        cfg.i_lsb = cfg.calibrated_lsb(NOMINAL_TEACH_RATE);
        cfg
    }
}

impl NetworkConfig {
    /// Unit current at which a single level-15 synapse driven at 100 Hz
    /// settles at 1.5x threshold: mean = 15 * unit * 100 Hz * tau.
    pub fn unit_current_for(threshold: f64, tau_sensory: f64) -> f64 {
        1.5 * threshold / (f64::from(MAX_LEVEL) * 100.0 * tau_sensory)
    }

    /// Mean teach-branch current under a Poisson teacher at `rate`.
    pub fn teacher_drive(&self, rate: f64) -> f64 {
        rate * self.tau_teach * self.teach_weight
    }

    /// LSB such that an error equal to the squared teacher drive (a 100 %
    /// relative error at unit alpha) hits the DAC full scale.
    pub fn calibrated_lsb(&self, teach_rate: f64) -> f64 {
        LearningParams::lsb_for_full_scale(self.teacher_drive(teach_rate).powi(2))
    }

    pub fn neuron_params(&self) -> NeuronParams {
        NeuronParams {
            tau_soma: self.tau_soma,
            tau_sensory: self.tau_sensory,
            tau_teach: self.tau_teach,
            threshold: self.threshold,
            reset: self.reset,
            refractory: self.refractory,
        }
    }

    pub fn learning_params(&self) -> LearningParams {
        LearningParams { alpha: self.alpha, i_lsb: self.i_lsb, tie_band: self.tie_band }
    }

    pub fn validate(&self) -> Result<(), NetworkError> {
        let bad = |what: &str| Err(NetworkError::InvalidConfig(what.to_string()));
        if self.n_inputs == 0 || self.n_outputs == 0 {
            return bad("n_inputs and n_outputs must be positive");
        }
        if self.n_inputs > u32::MAX as usize || self.n_outputs > u32::MAX as usize {
            return bad("dimensions must fit in 32 bits");
        }
        let positive = [
            ("tau_soma", self.tau_soma),
            ("tau_sensory", self.tau_sensory),
            ("tau_teach", self.tau_teach),
            ("threshold", self.threshold),
            ("alpha", self.alpha),
            ("i_lsb", self.i_lsb),
            ("unit_current", self.unit_current),
            ("dt", self.dt),
            ("log_interval", self.log_interval),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return bad(&format!("{name} must be positive and finite, got {v}"));
            }
        }
        let non_negative =
            [("refractory", self.refractory), ("tie_band", self.tie_band), ("teach_weight", self.teach_weight)];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return bad(&format!("{name} must be non-negative and finite, got {v}"));
            }
        }
        if !self.reset.is_finite() || self.reset >= self.threshold {
            return bad("reset must be finite and below threshold");
        }
        if let Connectivity::Split { excitatory } = self.connectivity {
            if excitatory > self.n_inputs {
                return bad("split connectivity has more excitatory inputs than inputs");
            }
        }
        Ok(())
    }

    fn polarity_enabled(&self, input: usize, polarity: Polarity) -> bool {
        match (self.connectivity, polarity) {
            (Connectivity::Paired, _) => true,
            (Connectivity::Split { excitatory }, Polarity::Excitatory) => input < excitatory,
            (Connectivity::Split { excitatory }, Polarity::Inhibitory) => input >= excitatory,
        }
    }
}

/// Excitatory and inhibitory level grids, `n_inputs x n_outputs`, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynapseMatrix {
    n_inputs: usize,
    n_outputs: usize,
    exc: Vec<u8>,
    inh: Vec<u8>,
}

impl SynapseMatrix {
    pub fn zeros(n_inputs: usize, n_outputs: usize) -> Self {
        Self { n_inputs, n_outputs, exc: vec![0; n_inputs * n_outputs], inh: vec![0; n_inputs * n_outputs] }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_inputs, self.n_outputs)
    }

    #[inline]
    fn index(&self, input: usize, output: usize) -> usize {
        input * self.n_outputs + output
    }

    pub fn level(&self, input: usize, output: usize, polarity: Polarity) -> u8 {
        let k = self.index(input, output);
        match polarity {
            Polarity::Excitatory => self.exc[k],
            Polarity::Inhibitory => self.inh[k],
        }
    }

    pub fn weight(&self, input: usize, output: usize, polarity: Polarity, unit_current: f64) -> QuantWeight {
        QuantWeight::new(self.level(input, output, polarity), polarity, unit_current)
            .expect("stored levels are always 4-bit")
    }

    /// Effective signed weight in levels, `exc - inh`.
    pub fn effective(&self, input: usize, output: usize) -> i32 {
        let k = self.index(input, output);
        i32::from(self.exc[k]) - i32::from(self.inh[k])
    }

    pub fn exc_levels(&self) -> &[u8] {
        &self.exc
    }

    pub fn inh_levels(&self) -> &[u8] {
        &self.inh
    }

    pub fn set_level(&mut self, input: usize, output: usize, polarity: Polarity, level: u8) {
        assert!(level <= MAX_LEVEL, "level {level} exceeds 4 bits");
        let k = self.index(input, output);
        match polarity {
            Polarity::Excitatory => self.exc[k] = level,
            Polarity::Inhibitory => self.inh[k] = level,
        }
    }
}

/// Result of one learning-block evaluation for one row.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LearningOutcome {
    /// Sign of the change of the effective weight actually applied.
    pub delta: i8,
    /// Comparator high and WTA not tied.
    pub accepted: bool,
    /// Teacher-gated error fed to the comparator (signed).
    pub error: f64,
}

/// Cumulative learning counters of one row.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RowStats {
    pub learning_events: u64,
    pub accepted_updates: u64,
    pub applied_updates: u64,
    /// Sum of `|teach - sensory|` sampled at learning events.
    pub abs_mismatch_sum: f64,
}

impl RowStats {
    fn add(&mut self, other: &RowStats) {
        self.learning_events += other.learning_events;
        self.accepted_updates += other.accepted_updates;
        self.applied_updates += other.applied_updates;
        self.abs_mismatch_sum += other.abs_mismatch_sum;
    }

    fn since(&self, earlier: &RowStats) -> RowStats {
        RowStats {
            learning_events: self.learning_events - earlier.learning_events,
            accepted_updates: self.accepted_updates - earlier.accepted_updates,
            applied_updates: self.applied_updates - earlier.applied_updates,
            abs_mismatch_sum: self.abs_mismatch_sum - earlier.abs_mismatch_sum,
        }
    }
}

#[derive(Debug, Clone)]
struct Row {
    neuron: NeuronState,
    lfsr: Lfsr6,
    stats: RowStats,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub t: f64,
    pub row: usize,
    pub soma: f64,
    pub sensory: f64,
    pub teach: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowResult {
    pub spike_counts: Vec<u32>,
    /// Learning counters accumulated over all rows during the window.
    pub stats: RowStats,
    pub log: Vec<TraceSample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub class: usize,
    /// Every neuron stayed silent.
    pub no_response: bool,
}

/// Spike-count argmax; ties go to the lowest index.
pub fn classify(spike_counts: &[u32]) -> Classification {
    assert!(!spike_counts.is_empty(), "need at least one output");
    let mut best = 0;
    for (k, &c) in spike_counts.iter().enumerate() {
        if c > spike_counts[best] {
            best = k;
        }
    }
    Classification { class: best, no_response: spike_counts.iter().all(|&c| c == 0) }
}

#[derive(Debug, Clone)]
pub struct Network {
    config: NetworkConfig,
    weights: SynapseMatrix,
    exc_enabled: Vec<bool>,
    inh_enabled: Vec<bool>,
    rows: Vec<Row>,
    learning: LearningParams,
    learning_enabled: bool,
    clock: ClockConfig,
    outcomes: Vec<LearningOutcome>,
}

impl Network {
    /// Builds a network whose initial levels and LFSR seeds are pure
    /// functions of `config.master_seed`.
    ///
    /// Levels are drawn uniformly from 0..=15 by a ChaCha8 stream keyed on
    /// (master_seed, WEIGHTS), in storage order: all excitatory levels
    /// row-major, then all inhibitory ones. Row `j` seeds its LFSR with
    /// `derive(master_seed, [LFSR, j]) % 63 + 1`. Synapses masked off by the
    /// connectivity stay at level 0.
    pub fn build(config: NetworkConfig) -> Result<Self, NetworkError> {
        config.validate()?;
        let (n_in, n_out) = (config.n_inputs, config.n_outputs);
        let mut rng = seed::rng_for(config.master_seed, &[domain::WEIGHTS]);
        let mut weights = SynapseMatrix::zeros(n_in, n_out);
        for level in weights.exc.iter_mut().chain(weights.inh.iter_mut()) {
            *level = rng.random_range(0..=MAX_LEVEL);
        }
        let exc_enabled: Vec<bool> = (0..n_in).map(|i| config.polarity_enabled(i, Polarity::Excitatory)).collect();
        let inh_enabled: Vec<bool> = (0..n_in).map(|i| config.polarity_enabled(i, Polarity::Inhibitory)).collect();
        for i in 0..n_in {
            for j in 0..n_out {
                if !exc_enabled[i] {
                    weights.set_level(i, j, Polarity::Excitatory, 0);
                }
                if !inh_enabled[i] {
                    weights.set_level(i, j, Polarity::Inhibitory, 0);
                }
            }
        }
        let params = config.neuron_params();
        let rows = (0..n_out)
            .map(|j| {
                let s = seed::derive(config.master_seed, &[domain::LFSR, j as u64]) % u64::from(DAC_CODES) + 1;
                Row {
                    neuron: NeuronState::new(&params),
                    lfsr: Lfsr6::with_taps(s as u8, config.lfsr_taps).expect("seed in 1..=63"),
                    stats: RowStats::default(),
                }
            })
            .collect();
        Ok(Self {
            learning: config.learning_params(),
            clock: ClockConfig::new(config.dt),
            outcomes: vec![LearningOutcome::default(); n_out],
            config,
            weights,
            exc_enabled,
            inh_enabled,
            rows,
            learning_enabled: true,
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn weights(&self) -> &SynapseMatrix {
        &self.weights
    }

    pub fn n_synapses(&self) -> usize {
        2 * self.config.n_inputs * self.config.n_outputs
    }

    pub fn time(&self) -> f64 {
        self.clock.t_now
    }

    pub fn set_learning(&mut self, enabled: bool) {
        self.learning_enabled = enabled;
    }

    pub fn learning_enabled(&self) -> bool {
        self.learning_enabled
    }

    pub fn neuron(&self, row: usize) -> &NeuronState {
        &self.rows[row].neuron
    }

    pub fn lfsr(&self, row: usize) -> &Lfsr6 {
        &self.rows[row].lfsr
    }

    pub fn row_stats(&self, row: usize) -> RowStats {
        self.rows[row].stats
    }

    pub fn total_stats(&self) -> RowStats {
        let mut s = RowStats::default();
        for r in &self.rows {
            s.add(&r.stats);
        }
        s
    }

    /// Overwrites one level, honoring the connectivity mask.
    pub fn set_level(
        &mut self,
        input: usize,
        output: usize,
        polarity: Polarity,
        level: u8,
    ) -> Result<(), NetworkError> {
        self.check_input(input)?;
        self.check_output(output)?;
        let enabled = match polarity {
            Polarity::Excitatory => self.exc_enabled[input],
            Polarity::Inhibitory => self.inh_enabled[input],
        };
        self.weights.set_level(input, output, polarity, if enabled { level } else { 0 });
        Ok(())
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            n_inputs: self.config.n_inputs as u32,
            n_outputs: self.config.n_outputs as u32,
            exc: self.weights.exc.clone(),
            inh: self.weights.inh.clone(),
        }
    }

    pub fn load_checkpoint(&mut self, ckpt: &Checkpoint) -> Result<(), NetworkError> {
        let found = (ckpt.n_inputs as usize, ckpt.n_outputs as usize);
        let expected = self.weights.shape();
        if found != expected {
            return Err(NetworkError::ShapeMismatch { expected, found });
        }
        self.weights.exc.copy_from_slice(&ckpt.exc);
        self.weights.inh.copy_from_slice(&ckpt.inh);
        Ok(())
    }

    fn check_input(&self, i: usize) -> Result<(), NetworkError> {
        if i >= self.config.n_inputs {
            return Err(NetworkError::InputOutOfRange { index: i, n_inputs: self.config.n_inputs });
        }
        Ok(())
    }

    fn check_output(&self, j: usize) -> Result<(), NetworkError> {
        if j >= self.config.n_outputs {
            return Err(NetworkError::OutputOutOfRange { index: j, n_outputs: self.config.n_outputs });
        }
        Ok(())
    }

    fn check_time(&self, t: f64) -> Result<(), NetworkError> {
        if t.partial_cmp(&self.clock.t_now).is_none_or(|o| o.is_lt()) {
            return Err(NetworkError::TimeReversal { time: t, now: self.clock.t_now });
        }
        Ok(())
    }

    /// Delivers a sensory spike on input `i` at absolute time `t` to every
    /// row, then runs each row's learning block for synapse `(i, row)`.
    /// Returns one outcome per row.
    pub fn on_sensory_spike(&mut self, i: usize, t: f64) -> Result<&[LearningOutcome], NetworkError> {
        self.check_input(i)?;
        self.check_time(t)?;
        self.sensory_unchecked(i, t);
        Ok(&self.outcomes)
    }

    /// Delivers a teacher spike of sign `positive` to row `j`. Teach spikes
    /// never trigger learning.
    pub fn on_teach_spike(&mut self, j: usize, positive: bool, t: f64) -> Result<(), NetworkError> {
        self.check_output(j)?;
        self.check_time(t)?;
        self.teach_unchecked(j, positive, t);
        Ok(())
    }

    fn teach_unchecked(&mut self, j: usize, positive: bool, t: f64) {
        let amount = if positive { self.config.teach_weight } else { -self.config.teach_weight };
        let neuron = &mut self.rows[j].neuron;
        neuron.advance_traces(t);
        neuron.teach.inject(amount);
    }

    fn sensory_unchecked(&mut self, i: usize, t: f64) {
        let n_out = self.config.n_outputs;
        let unit = self.config.unit_current;
        let base = i * n_out;
        let (exc_on, inh_on) = (self.exc_enabled[i], self.inh_enabled[i]);
        let exc = &mut self.weights.exc[base..base + n_out];
        let inh = &mut self.weights.inh[base..base + n_out];
        for (j, row) in self.rows.iter_mut().enumerate() {
            let neuron = &mut row.neuron;
            neuron.advance_traces(t);
            let before = i32::from(exc[j]) - i32::from(inh[j]);
            neuron.sensory.inject(f64::from(before) * unit);

            if !self.learning_enabled {
                self.outcomes[j] = LearningOutcome::default();
                continue;
            }
            let (teach, sensory) = (neuron.teach.value, neuron.sensory.value);
            let decision = self.learning.decide(teach, sensory, &mut row.lfsr);
            let dir = decision.update();
            if dir != Direction::None {
                if exc_on {
                    exc[j] = step_level(exc[j], Polarity::Excitatory, dir);
                }
                if inh_on {
                    inh[j] = step_level(inh[j], Polarity::Inhibitory, dir);
                }
            }
            let after = i32::from(exc[j]) - i32::from(inh[j]);
            let delta = (after - before).signum() as i8;
            row.stats.learning_events += 1;
            row.stats.accepted_updates += u64::from(decision.accepted);
            row.stats.applied_updates += u64::from(delta != 0);
            row.stats.abs_mismatch_sum += (teach - sensory).abs();
            self.outcomes[j] = LearningOutcome { delta, accepted: decision.accepted, error: decision.error };
        }
    }

    /// Advances the clock by `duration` in steps of `dt`.
    ///
    /// Event times are relative to the window start and must lie in
    /// `[0, duration)`, sorted by (time, kind, channel). Events stamped in a
    /// step are applied first, in order; then every soma takes one step and
    /// threshold crossings are checked at the end of the step. Spike counts
    /// are reset at the start of the window.
    pub fn run_window(
        &mut self,
        events: &[SpikeEvent],
        duration: f64,
        log: bool,
    ) -> Result<WindowResult, NetworkError> {
        check_sorted(events)?;
        if !(duration.is_finite() && duration > 0.0) {
            return Err(NetworkError::InvalidConfig(format!("window duration must be positive, got {duration}")));
        }
        for ev in events {
            if !(ev.time >= 0.0 && ev.time < duration) {
                return Err(NetworkError::EventOutsideWindow { time: ev.time, duration });
            }
            match ev.kind {
                SpikeKind::Sensory => self.check_input(ev.channel as usize)?,
                _ => self.check_output(ev.channel as usize)?,
            }
        }

        let dt = self.config.dt;
        let n_steps = ((duration / dt).round() as usize).max(1);
        let log_every = ((self.config.log_interval / dt).round() as usize).max(1);
        let t0 = self.clock.t_now;
        let stats_before: Vec<RowStats> = self.rows.iter().map(|r| r.stats).collect();
        for row in &mut self.rows {
            row.neuron.spike_count = 0;
        }
        let mut trace_log = Vec::new();
        let mut next = 0;
        for k in 0..n_steps {
            let step_end_rel = (k + 1) as f64 * dt;
            let last = k + 1 == n_steps;
            while next < events.len() && (last || events[next].time < step_end_rel) {
                let ev = events[next];
                let t = t0 + ev.time;
                match ev.kind {
                    SpikeKind::Sensory => self.sensory_unchecked(ev.channel as usize, t),
                    SpikeKind::TeachPositive => self.teach_unchecked(ev.channel as usize, true, t),
                    SpikeKind::TeachNegative => self.teach_unchecked(ev.channel as usize, false, t),
                }
                next += 1;
            }
            let t_end = t0 + step_end_rel;
            for row in &mut self.rows {
                let n = &mut row.neuron;
                n.advance_traces(t_end);
                n.step_soma(dt);
                n.check_spike(t_end);
            }
            if log && (k + 1) % log_every == 0 {
                trace_log.extend(self.rows.iter().enumerate().map(|(j, r)| TraceSample {
                    t: t_end,
                    row: j,
                    soma: r.neuron.soma.value,
                    sensory: r.neuron.sensory.value,
                    teach: r.neuron.teach.value,
                }));
            }
        }
        self.clock.t_now = t0 + n_steps as f64 * dt;

        let mut stats = RowStats::default();
        for (row, before) in self.rows.iter().zip(&stats_before) {
            stats.add(&row.stats.since(before));
        }
        Ok(WindowResult {
            spike_counts: self.rows.iter().map(|r| r.neuron.spike_count).collect(),
            stats,
            log: trace_log,
        })
    }
}
