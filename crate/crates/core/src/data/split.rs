use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::seed::{self, domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    /// The dataset's own train and test files.
    #[default]
    Canonical,
    /// Pool both files, shuffle, and cut 80 % / 20 %.
    #[serde(rename = "random_80_20")]
    Random8020,
}

/// Seeded shuffle of `0..n` cut into 80 % train and 20 % test indices.
pub fn random_80_20(n: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut seed::rng_for(seed, &[domain::SPLIT]));
    let test = idx.split_off(n * 4 / 5);
    (idx, test)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_sizes_and_coverage() {
        let (train, test) = random_80_20(70_000, 3);
        assert_eq!(train.len(), 56_000);
        assert_eq!(test.len(), 14_000);
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        assert!(all.iter().enumerate().all(|(k, &v)| k == v));
        assert_eq!(random_80_20(70_000, 3), (train, test));
        assert_ne!(random_80_20(100, 3).0, random_80_20(100, 4).0);
    }
}
