//! Versioned flat binary weight snapshot.
//!
//! Layout: magic `SDW1`, `n_inputs` and `n_outputs` as little-endian u32,
//! then `n_inputs * n_outputs` excitatory levels row-major as bytes, then
//! the same number of inhibitory levels.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::plasticity::MAX_LEVEL;

pub const MAGIC: &[u8; 4] = b"SDW1";
const HEADER_LEN: usize = 12;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("bad checkpoint magic {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("checkpoint truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("checkpoint has {0} trailing bytes")]
    TrailingBytes(usize),
    #[error("level {level} at byte {offset} exceeds 4 bits")]
    InvalidLevel { level: u8, offset: usize },
    #[error("checkpoint io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub n_inputs: u32,
    pub n_outputs: u32,
    pub exc: Vec<u8>,
    pub inh: Vec<u8>,
}

impl Checkpoint {
    pub fn zeros(n_inputs: u32, n_outputs: u32) -> Self {
        let n = n_inputs as usize * n_outputs as usize;
        Self { n_inputs, n_outputs, exc: vec![0; n], inh: vec![0; n] }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.exc.len() + self.inh.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&self.n_inputs.to_le_bytes());
        out.extend_from_slice(&self.n_outputs.to_le_bytes());
        out.extend_from_slice(&self.exc);
        out.extend_from_slice(&self.inh);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CheckpointError> {
        if bytes.len() < HEADER_LEN {
            return Err(CheckpointError::Truncated { expected: HEADER_LEN, found: bytes.len() });
        }
        let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
        if &magic != MAGIC {
            return Err(CheckpointError::BadMagic(magic));
        }
        let n_inputs = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        let n_outputs = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        let n = n_inputs as usize * n_outputs as usize;
        let expected = HEADER_LEN + 2 * n;
        if bytes.len() < expected {
            return Err(CheckpointError::Truncated { expected, found: bytes.len() });
        }
        if bytes.len() > expected {
            return Err(CheckpointError::TrailingBytes(bytes.len() - expected));
        }
        let payload = &bytes[HEADER_LEN..];
        if let Some(offset) = payload.iter().position(|&l| l > MAX_LEVEL) {
            return Err(CheckpointError::InvalidLevel { level: payload[offset], offset: HEADER_LEN + offset });
        }
        Ok(Self { n_inputs, n_outputs, exc: payload[..n].to_vec(), inh: payload[n..].to_vec() })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CheckpointError> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CheckpointError> {
        Self::from_bytes(&fs::read(path)?)
    }

    /// Level counts per polarity, index = level.
    pub fn histograms(&self) -> ([u64; 16], [u64; 16]) {
        let hist = |levels: &[u8]| {
            let mut h = [0u64; 16];
            for &l in levels {
                h[l as usize] += 1;
            }
            h
        };
        (hist(&self.exc), hist(&self.inh))
    }
}
