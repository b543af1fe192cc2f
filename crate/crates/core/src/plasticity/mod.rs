//! Per-row learning block.
//!
//! On every pre-synaptic sensory event the row computes a teacher-gated
//! error, picks an update direction, draws one 6-bit pseudo-random code,
//! converts it to a current and lets the update through only if the error
//! magnitude exceeds that current. Accepted updates move 4-bit weights by
//! one level, saturating at both ends.

mod lfsr;

pub use lfsr::{Lfsr6, LfsrTaps};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Highest weight level of a 4-bit synapse.
pub const MAX_LEVEL: u8 = 15;
/// Number of distinct LFSR codes, also the DAC full-scale code.
pub const DAC_CODES: u8 = 63;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlasticityError {
    #[error("LFSR seed must be in 1..=63, got {0}")]
    InvalidSeed(u8),
    #[error("invalid LFSR taps: {0}")]
    InvalidTaps(String),
    #[error("weight level {0} exceeds the 4-bit range")]
    InvalidLevel(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Excitatory,
    Inhibitory,
}

impl Polarity {
    pub fn sign(self) -> f64 {
        match self {
            Polarity::Excitatory => 1.0,
            Polarity::Inhibitory => -1.0,
        }
    }
}

/// Output of the WTA stage. `None` means both UP and DOWN are low.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Down,
    None,
}

/// A saturating 4-bit plastic weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantWeight {
    level: u8,
    pub polarity: Polarity,
    pub unit_current: f64,
}

impl QuantWeight {
    pub fn new(level: u8, polarity: Polarity, unit_current: f64) -> Result<Self, PlasticityError> {
        if level > MAX_LEVEL {
            return Err(PlasticityError::InvalidLevel(level));
        }
        Ok(Self { level, polarity, unit_current })
    }

    pub fn level(&self) -> u8 {
        self.level
    }

    /// Signed current injected per pre-synaptic spike.
    pub fn current(&self) -> f64 {
        self.level as f64 * self.unit_current * self.polarity.sign()
    }

    /// `Up` always raises the signed current: excitatory levels go up,
    /// inhibitory levels go down. `Direction::None` is a no-op.
    pub fn apply_update(self, dir: Direction) -> Self {
        Self { level: step_level(self.level, self.polarity, dir), ..self }
    }
}

/// Level arithmetic behind [`QuantWeight::apply_update`].
#[inline]
pub fn step_level(level: u8, polarity: Polarity, dir: Direction) -> u8 {
    let raise = match (dir, polarity) {
        (Direction::None, _) => return level,
        (Direction::Up, Polarity::Excitatory) | (Direction::Down, Polarity::Inhibitory) => true,
        _ => false,
    };
    if raise {
        (level + 1).min(MAX_LEVEL)
    } else {
        level.saturating_sub(1)
    }
}

/// Teacher-gated error `alpha * (teach - sensory) * |teach|`.
///
/// Only called on pre-synaptic arrival; that call site is the input factor.
#[inline]
pub fn compute_error(i_teach: f64, i_sensory: f64, alpha: f64) -> f64 {
    alpha * (i_teach - i_sensory) * i_teach.abs()
}

#[inline]
pub fn wta_direction(err: f64, tie_band: f64) -> Direction {
    if err > tie_band {
        Direction::Up
    } else if err < -tie_band {
        Direction::Down
    } else {
        Direction::None
    }
}

/// Ideal linear current DAC.
#[inline]
pub fn dac(draw: u8, i_lsb: f64) -> f64 {
    draw as f64 * i_lsb
}

/// Comparator output: high only when the error strictly exceeds the random current.
#[inline]
pub fn stochastic_round(err_magnitude: f64, i_random: f64) -> bool {
    err_magnitude > i_random
}

/// Error magnitude and update direction of one learning event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSignal {
    pub magnitude: f64,
    pub direction: Direction,
}

impl ErrorSignal {
    pub fn new(err: f64, tie_band: f64) -> Self {
        Self { magnitude: err.abs(), direction: wta_direction(err, tie_band) }
    }
}

/// Scalar parameters of the learning block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearningParams {
    pub alpha: f64,
    pub i_lsb: f64,
    pub tie_band: f64,
}

impl LearningParams {
    /// LSB that maps an error of `full_scale` onto DAC code 63.
    pub fn lsb_for_full_scale(full_scale: f64) -> f64 {
        full_scale / DAC_CODES as f64
    }

    /// Evaluates one event: error, direction, one LFSR draw and the comparator.
    /// The LFSR advances whether or not the teacher is present.
    #[inline]
    pub fn decide(&self, i_teach: f64, i_sensory: f64, lfsr: &mut Lfsr6) -> Decision {
        let error = compute_error(i_teach, i_sensory, self.alpha);
        let signal = ErrorSignal::new(error, self.tie_band);
        let draw = lfsr.next_draw();
        let accepted = signal.direction != Direction::None && stochastic_round(signal.magnitude, dac(draw, self.i_lsb));
        Decision { error, signal, draw, accepted }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub error: f64,
    pub signal: ErrorSignal,
    pub draw: u8,
    pub accepted: bool,
}

impl Decision {
    /// Direction to apply, `Direction::None` unless the update was accepted.
    pub fn update(&self) -> Direction {
        if self.accepted {
            self.signal.direction
        } else {
            Direction::None
        }
    }
}
