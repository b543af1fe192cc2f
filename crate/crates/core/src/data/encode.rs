//! Poisson rate coding of pixels and teacher spike trains.
//!
//! Each pixel (and each teacher target) has its own generator keyed on
//! (sample seed, stream kind, channel), so a stream does not depend on
//! which other streams were generated or in what order.

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::event::SpikeEvent;
use crate::seed::{self, domain};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncodingConfig {
    /// Rate of a pixel at 255, Hz.
    pub rate_max: f64,
    pub present_duration: f64,
    pub teach_rate_pos: f64,
    pub teach_rate_neg: f64,
    /// Silence after each presentation, seconds.
    pub gap_duration: f64,
    pub seed: u64,
}

impl Default for EncodingConfig {
    fn default() -> Self {
        Self {
            rate_max: 250.0,
            present_duration: 0.100,
            teach_rate_pos: 250.0,
            teach_rate_neg: 50.0,
            gap_duration: 0.020,
            seed: 0,
        }
    }
}

impl EncodingConfig {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("rate_max", self.rate_max),
            ("teach_rate_pos", self.teach_rate_pos),
            ("teach_rate_neg", self.teach_rate_neg),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(format!("{name} must be a non-negative rate, got {v}"));
            }
        }
        for (name, v) in [("present_duration", self.present_duration), ("gap_duration", self.gap_duration)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        Ok(())
    }

    /// Teacher rates zeroed, as used for pure inference.
    pub fn without_teacher(&self) -> Self {
        Self { teach_rate_pos: 0.0, teach_rate_neg: 0.0, ..self.clone() }
    }
}

/// Seed of the streams of dataset sample `index`.
pub fn sample_seed(seed: u64, index: u64) -> u64 {
    seed::derive(seed, &[index])
}

/// Homogeneous Poisson spike times on `[0, duration)` from exponential
/// inter-arrival intervals.
pub fn poisson_train<R: Rng>(rate: f64, duration: f64, rng: &mut R) -> Vec<f64> {
    let mut times = Vec::new();
    if rate <= 0.0 {
        return times;
    }
    let isi = Exp::new(rate).expect("positive rate");
    let mut t = isi.sample(rng);
    while t < duration {
        times.push(t);
        t += isi.sample(rng);
    }
    times
}

/// Sensory events for one image, sorted by time.
pub fn encode_poisson(image: &[u8], cfg: &EncodingConfig, sample_seed: u64) -> Vec<SpikeEvent> {
    let mut events = Vec::new();
    for (channel, &p) in image.iter().enumerate() {
        if p == 0 {
            continue;
        }
        let rate = cfg.rate_max * f64::from(p) / 255.0;
        let mut rng = seed::rng_for(sample_seed, &[domain::SENSORY, channel as u64]);
        events.extend(
            poisson_train(rate, cfg.present_duration, &mut rng)
                .into_iter()
                .map(|t| SpikeEvent::sensory(t, channel as u32)),
        );
    }
    events.sort_by(SpikeEvent::order);
    events
}

/// Positive teacher train to `label`, negative trains to every other output.
pub fn make_teacher(label: usize, n_outputs: usize, cfg: &EncodingConfig, sample_seed: u64) -> Vec<SpikeEvent> {
    assert!(label < n_outputs, "label {label} out of range for {n_outputs} outputs");
    let mut events = Vec::new();
    for target in 0..n_outputs {
        let positive = target == label;
        let rate = if positive { cfg.teach_rate_pos } else { cfg.teach_rate_neg };
        let mut rng = seed::rng_for(sample_seed, &[domain::TEACH, target as u64]);
        events.extend(
            poisson_train(rate, cfg.present_duration, &mut rng)
                .into_iter()
                .map(|t| SpikeEvent::teach(t, target as u32, positive)),
        );
    }
    events.sort_by(SpikeEvent::order);
    events
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::{check_sorted, SpikeKind};

    #[test]
    fn blank_image_is_silent() {
        assert!(encode_poisson(&[0u8; 784], &EncodingConfig::default(), 1).is_empty());
    }

    #[test]
    fn encoding_is_deterministic_and_sorted() {
        let image: Vec<u8> = (0..784).map(|k| (k * 7 % 256) as u8).collect();
        let cfg = EncodingConfig::default();
        let a = encode_poisson(&image, &cfg, 42);
        assert_eq!(a, encode_poisson(&image, &cfg, 42));
        assert_ne!(a, encode_poisson(&image, &cfg, 43));
        assert!(check_sorted(&a).is_ok());
        assert!(a.iter().all(|e| e.time >= 0.0 && e.time < cfg.present_duration));
    }

    #[test]
    fn single_bright_pixel_mean_count() {
        // Poisson(10): standard error of the mean over 1000 draws is 0.1.
        let cfg = EncodingConfig { rate_max: 100.0, present_duration: 0.1, ..Default::default() };
        let mut image = [0u8; 784];
        image[300] = 255;
        let total: usize = (0..1000).map(|s| encode_poisson(&image, &cfg, s).len()).sum();
        let mean = total as f64 / 1000.0;
        assert!((mean - 10.0).abs() < 3.0 * 0.1, "mean {mean}");
    }

    #[test]
    fn teacher_examples() {
        let off = EncodingConfig::default().without_teacher();
        assert!(make_teacher(3, 10, &off, 5).is_empty());

        let pos_only = EncodingConfig { teach_rate_neg: 0.0, ..Default::default() };
        let ev = make_teacher(3, 10, &pos_only, 5);
        assert!(!ev.is_empty());
        assert!(ev.iter().all(|e| e.channel == 3 && e.kind == SpikeKind::TeachPositive));

        let both = make_teacher(3, 10, &EncodingConfig::default(), 5);
        assert!(both.iter().all(|e| (e.channel == 3) == (e.kind == SpikeKind::TeachPositive)));
        assert!(check_sorted(&both).is_ok());
    }

    #[test]
    fn teacher_mean_count() {
        // Poisson(20) at 200 Hz over 0.1 s; standard error over 1000 draws is 0.141.
        let cfg = EncodingConfig { teach_rate_pos: 200.0, teach_rate_neg: 0.0, ..Default::default() };
        let total: usize = (0..1000).map(|s| make_teacher(3, 10, &cfg, s).len()).sum();
        let mean = total as f64 / 1000.0;
        assert!((mean - 20.0).abs() < 3.0 * (20.0f64 / 1000.0).sqrt(), "mean {mean}");
    }
}
