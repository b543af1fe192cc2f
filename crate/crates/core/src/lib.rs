//! Behavioral model of a mixed-signal learning core: multi-compartment LIF
//! neurons whose 4-bit plastic synapses learn online from a dendritic
//! teacher signal, with LFSR-driven stochastic rounding of every update.

pub mod checkpoint;
pub mod data;
pub mod dynamics;
pub mod event;
pub mod network;
pub mod plasticity;
pub mod seed;

pub use checkpoint::{Checkpoint, CheckpointError};
pub use dynamics::{ExpTrace, NeuronParams, NeuronState};
pub use event::{merge_streams, SpikeEvent, SpikeKind};
pub use network::{classify, Classification, Network, NetworkConfig, NetworkError, WindowResult};
pub use plasticity::{Direction, Lfsr6, Polarity, QuantWeight};
