//! Input spike tokens and their canonical ordering.

use std::cmp::Ordering;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpikeKind {
    TeachPositive,
    TeachNegative,
    Sensory,
}

impl SpikeKind {
    /// Teach kinds sort before sensory ones at equal timestamps so learning
    /// sees the teacher context of that instant.
    fn rank(self) -> u8 {
        match self {
            SpikeKind::TeachPositive => 0,
            SpikeKind::TeachNegative => 1,
            SpikeKind::Sensory => 2,
        }
    }

    pub fn is_teach(self) -> bool {
        self != SpikeKind::Sensory
    }
}

/// One input spike. `channel` is the input index for sensory spikes and the
/// target output neuron for teach spikes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikeEvent {
    pub time: f64,
    pub kind: SpikeKind,
    pub channel: u32,
}

impl SpikeEvent {
    pub fn sensory(time: f64, channel: u32) -> Self {
        Self { time, kind: SpikeKind::Sensory, channel }
    }

    pub fn teach(time: f64, target: u32, positive: bool) -> Self {
        let kind = if positive { SpikeKind::TeachPositive } else { SpikeKind::TeachNegative };
        Self { time, kind, channel: target }
    }

    /// Total order by (time, kind, channel).
    pub fn order(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.kind.rank().cmp(&other.kind.rank()))
            .then(self.channel.cmp(&other.channel))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("event stream not sorted at position {position}")]
pub struct UnsortedStream {
    pub position: usize,
}

pub fn check_sorted(events: &[SpikeEvent]) -> Result<(), UnsortedStream> {
    match events.windows(2).position(|w| w[0].order(&w[1]) == Ordering::Greater) {
        Some(k) => Err(UnsortedStream { position: k + 1 }),
        None => Ok(()),
    }
}

/// Merges individually sorted streams into one globally sorted stream.
pub fn merge_streams(streams: &[&[SpikeEvent]]) -> Result<Vec<SpikeEvent>, UnsortedStream> {
    let mut out = Vec::with_capacity(streams.iter().map(|s| s.len()).sum());
    for s in streams {
        check_sorted(s)?;
        out.extend_from_slice(s);
    }
    out.sort_by(SpikeEvent::order);
    Ok(out)
}
