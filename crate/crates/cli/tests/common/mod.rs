#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dendritic_core::data::Dataset;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dendritic"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

/// Horizontal or vertical bars: class = 0 for a bar in the top half,
/// 1 for the bottom half, 2 for the left half, 3 for the right half.
fn synthetic(n: usize, offset: usize) -> Dataset {
    let mut pixels = Vec::with_capacity(n * 784);
    let mut labels = Vec::with_capacity(n);
    for k in 0..n {
        let label = ((k + offset) % 4) as u8;
        let pos = 2 + (k * 7 + offset) % 10;
        for r in 0..28 {
            for c in 0..28 {
                let on = match label {
                    0 => r == pos,
                    1 => r == 27 - pos,
                    2 => c == pos,
                    _ => c == 27 - pos,
                };
                pixels.push(if on { 255 } else { 0 });
            }
        }
        labels.push(label);
    }
    Dataset::new(28, 28, pixels, labels).unwrap()
}

/// Writes a small IDX dataset with the canonical MNIST file names.
pub fn write_dataset(dir: &Path) -> PathBuf {
    let data = dir.join("data");
    fs::create_dir_all(&data).unwrap();
    for (prefix, n, offset) in [("train", 24, 0), ("t10k", 12, 1)] {
        let (images, labels) = synthetic(n, offset).to_idx_bytes();
        fs::write(data.join(format!("{prefix}-images-idx3-ubyte")), images).unwrap();
        fs::write(data.join(format!("{prefix}-labels-idx1-ubyte")), labels).unwrap();
    }
    data
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
