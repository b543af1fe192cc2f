//! 6-bit Fibonacci LFSR used as the hardware random source of the learning block.

use serde::{Deserialize, Serialize};

use super::PlasticityError;

const STATE_MASK: u8 = 0x3F;

/// Tap positions of a 6-bit Fibonacci register, as 0-indexed bit numbers
/// XORed together to form the feedback bit.
///
/// The default `[5, 4]` realizes the polynomial x^6 + x^5 + 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct LfsrTaps(u8);

impl LfsrTaps {
    /// Bit 5 must be tapped, otherwise the update is not invertible and
    /// nonzero states could fall into the all-zero lockup state.
    pub fn new(bits: &[u8]) -> Result<Self, PlasticityError> {
        let mut mask = 0u8;
        for &b in bits {
            if b > 5 {
                return Err(PlasticityError::InvalidTaps(format!("bit {b} outside a 6-bit register")));
            }
            mask |= 1 << b;
        }
        if mask & 0x20 == 0 {
            return Err(PlasticityError::InvalidTaps("bit 5 must be tapped".into()));
        }
        Ok(Self(mask))
    }

    pub fn mask(self) -> u8 {
        self.0
    }
}

impl Default for LfsrTaps {
    fn default() -> Self {
        Self(0b11_0000)
    }
}

impl TryFrom<Vec<u8>> for LfsrTaps {
    type Error = PlasticityError;

    fn try_from(bits: Vec<u8>) -> Result<Self, Self::Error> {
        Self::new(&bits)
    }
}

impl From<LfsrTaps> for Vec<u8> {
    fn from(taps: LfsrTaps) -> Self {
        (0..6).filter(|b| taps.0 & (1 << b) != 0).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lfsr6 {
    state: u8,
    taps: LfsrTaps,
}

impl Lfsr6 {
    pub fn new(seed: u8) -> Result<Self, PlasticityError> {
        Self::with_taps(seed, LfsrTaps::default())
    }

    pub fn with_taps(seed: u8, taps: LfsrTaps) -> Result<Self, PlasticityError> {
        if seed == 0 || seed > STATE_MASK {
            return Err(PlasticityError::InvalidSeed(seed));
        }
        Ok(Self { state: seed, taps })
    }

    pub fn state(&self) -> u8 {
        self.state
    }

    /// Shifts once and returns the new state as the draw, in `1..=63`.
    #[inline]
    pub fn next_draw(&mut self) -> u8 {
        debug_assert!(self.state != 0);
        let feedback = (self.state & self.taps.0).count_ones() as u8 & 1;
        self.state = ((self.state << 1) | feedback) & STATE_MASK;
        self.state
    }
}

impl Iterator for Lfsr6 {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        Some(self.next_draw())
    }
}
