//! Locates the MNIST files and applies the configured train/test split.

use std::path::{Path, PathBuf};
use std::rc::Rc;

use dendritic_core::data::{load_idx_files, random_80_20, DataError, Dataset, IdxOptions, Split};

use crate::error::CliError;

/// A view of some samples of a dataset.
#[derive(Debug, Clone)]
pub struct Samples {
    pub dataset: Rc<Dataset>,
    pub indices: Vec<usize>,
}

impl Samples {
    fn all(dataset: Rc<Dataset>) -> Self {
        let indices = (0..dataset.len()).collect();
        Self { dataset, indices }
    }

    pub fn truncate(mut self, count: Option<usize>) -> Self {
        if let Some(n) = count {
            self.indices.truncate(n);
        }
        self
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

fn find(dir: &Path, stem: &str) -> Result<PathBuf, CliError> {
    for name in [stem.to_string(), format!("{stem}.gz")] {
        let p = dir.join(name);
        if p.is_file() {
            return Ok(p);
        }
    }
    Err(CliError::Data(DataError::Io {
        path: dir.join(stem).display().to_string(),
        source: std::io::Error::new(std::io::ErrorKind::NotFound, "file not found (plain or .gz)"),
    }))
}

fn load_pair(dir: &Path, prefix: &str) -> Result<Dataset, CliError> {
    let images = find(dir, &format!("{prefix}-images-idx3-ubyte"))?;
    let labels = find(dir, &format!("{prefix}-labels-idx1-ubyte"))?;
    Ok(load_idx_files(&images, &labels, &IdxOptions::default())?)
}

/// Returns (train, test) according to `split`.
pub fn load_mnist(dir: &Path, split: Split, seed: u64) -> Result<(Samples, Samples), CliError> {
    let train = load_pair(dir, "train")?;
    let test = load_pair(dir, "t10k")?;
    Ok(match split {
        Split::Canonical => (Samples::all(Rc::new(train)), Samples::all(Rc::new(test))),
        Split::Random8020 => {
            let pooled = Rc::new(train.concat(&test)?);
            let (tr, te) = random_80_20(pooled.len(), seed);
            (Samples { dataset: pooled.clone(), indices: tr }, Samples { dataset: pooled, indices: te })
        }
    })
}

/// Test-side samples only; the training files are not required for a
/// canonical split.
pub fn load_test(dir: &Path, split: Split, seed: u64) -> Result<Samples, CliError> {
    match split {
        Split::Canonical => Ok(Samples::all(Rc::new(load_pair(dir, "t10k")?))),
        Split::Random8020 => Ok(load_mnist(dir, split, seed)?.1),
    }
}
