//! First-order current dynamics for the soma and the two dendritic branches.
//!
//! Every current in the model obeys `tau * dI/dt + I = drive`. Dendritic
//! branches see impulse drive (a jump per input spike), so between events
//! they decay exactly as `I * exp(-dt / tau)`. The soma is driven by the sum
//! of both branches and is advanced with exponential Euler, holding the
//! drive constant across each clock step.

use serde::{Deserialize, Serialize};

/// Default simulation step, 0.1 ms.
pub const DEFAULT_DT: f64 = 1e-4;
/// Default time constant shared by soma and both branches, 10 ms.
pub const DEFAULT_TAU: f64 = 0.010;
/// Default absolute refractory period, 2 ms.
pub const DEFAULT_REFRACTORY: f64 = 0.002;

/// A first-order exponentially decaying current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTrace {
    pub value: f64,
    tau: f64,
}

impl ExpTrace {
    /// A zero trace with time constant `tau` (seconds).
    ///
    /// Panics if `tau` is not a positive finite number.
    pub fn new(tau: f64) -> Self {
        Self::with_value(0.0, tau)
    }

    pub fn with_value(value: f64, tau: f64) -> Self {
        assert!(tau.is_finite() && tau > 0.0, "time constant must be positive, got {tau}");
        Self { value, tau }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Multiplicative factor applied by a decay over `delta_t`.
    #[inline]
    pub fn decay_factor(&self, delta_t: f64) -> f64 {
        (-delta_t / self.tau).exp()
    }

    /// Free decay over `delta_t` seconds. Negative intervals are rejected.
    #[inline]
    pub fn decay(&mut self, delta_t: f64) {
        assert!(delta_t >= 0.0, "cannot decay backwards in time (delta_t = {delta_t})");
        self.value *= self.decay_factor(delta_t);
    }

    /// Value-semantics form of [`ExpTrace::decay`].
    pub fn decayed(mut self, delta_t: f64) -> Self {
        self.decay(delta_t);
        self
    }

    /// Instantaneous jump. Inhibitory contributions pass a negative amount.
    #[inline]
    pub fn inject(&mut self, amount: f64) {
        self.value += amount;
    }

    pub fn injected(mut self, amount: f64) -> Self {
        self.inject(amount);
        self
    }
}

/// Simulation clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockConfig {
    pub dt: f64,
    pub t_now: f64,
}

impl ClockConfig {
    pub fn new(dt: f64) -> Self {
        assert!(dt.is_finite() && dt > 0.0, "clock step must be positive, got {dt}");
        Self { dt, t_now: 0.0 }
    }
}

impl Default for ClockConfig {
    fn default() -> Self {
        Self::new(DEFAULT_DT)
    }
}

/// Per-neuron parameters. All currents share one arbitrary unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NeuronParams {
    pub tau_soma: f64,
    pub tau_sensory: f64,
    pub tau_teach: f64,
    pub threshold: f64,
    pub reset: f64,
    pub refractory: f64,
}

impl Default for NeuronParams {
    fn default() -> Self {
        Self {
            tau_soma: DEFAULT_TAU,
            tau_sensory: DEFAULT_TAU,
            tau_teach: DEFAULT_TAU,
            threshold: 1.0,
            reset: 0.0,
            refractory: DEFAULT_REFRACTORY,
        }
    }
}

/// State of one output neuron: soma, sensory (basal) and teach (apical)
/// branches, plus spike bookkeeping.
///
/// Branch values are signed: excitatory input adds, inhibitory subtracts.
/// `trace_time` is the instant both branch traces are valid at.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuronState {
    pub soma: ExpTrace,
    pub sensory: ExpTrace,
    pub teach: ExpTrace,
    pub threshold: f64,
    pub reset_value: f64,
    pub refractory_period: f64,
    pub refractory_until: f64,
    pub spike_count: u32,
    pub trace_time: f64,
}

impl NeuronState {
    pub fn new(params: &NeuronParams) -> Self {
        Self {
            soma: ExpTrace::new(params.tau_soma),
            sensory: ExpTrace::new(params.tau_sensory),
            teach: ExpTrace::new(params.tau_teach),
            threshold: params.threshold,
            reset_value: params.reset,
            refractory_period: params.refractory,
            refractory_until: f64::NEG_INFINITY,
            spike_count: 0,
            trace_time: 0.0,
        }
    }

    /// Total dendritic drive into the soma.
    #[inline]
    pub fn drive(&self) -> f64 {
        self.sensory.value + self.teach.value
    }

    /// Decays both branches forward to `t`. Times at or before `trace_time`
    /// leave the traces untouched, so events stamped inside an already
    /// processed clock step act at the step boundary.
    #[inline]
    pub fn advance_traces(&mut self, t: f64) {
        let delta = t - self.trace_time;
        if delta > 0.0 {
            self.sensory.decay(delta);
            self.teach.decay(delta);
            self.trace_time = t;
        }
    }

    /// One exponential-Euler soma step with the branch drive held constant.
    #[inline]
    pub fn step_soma(&mut self, dt: f64) {
        debug_assert!(dt > 0.0);
        let drive = self.drive();
        let factor = self.soma.decay_factor(dt);
        self.soma.value = drive + (self.soma.value - drive) * factor;
    }

    /// Threshold crossing with reset and absolute refractoriness.
    #[inline]
    pub fn check_spike(&mut self, t_now: f64) -> bool {
        if self.soma.value >= self.threshold && t_now >= self.refractory_until {
            self.soma.value = self.reset_value;
            self.refractory_until = t_now + self.refractory_period;
            self.spike_count += 1;
            true
        } else {
            false
        }
    }
}
