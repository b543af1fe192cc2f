//! IDX container parsing (the MNIST file format).
//!
//! Images: big-endian magic 0x00000803, count, rows, cols, then raw pixels.
//! Labels: big-endian magic 0x00000801, count, then one byte per label.
//! Gzip-compressed files are detected by their header and inflated.

use std::fs;
use std::io::Read;
use std::path::Path;

use flate2::read::GzDecoder;
use thiserror::Error;

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;
const NUM_CLASSES: u8 = 10;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("bad IDX magic: expected {expected:#010x}, found {found:#010x}")]
    BadMagic { expected: u32, found: u32 },
    #[error("truncated IDX payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("image dimensions {rows}x{cols} do not match expected {expected_rows}x{expected_cols}")]
    BadDimensions { rows: u32, cols: u32, expected_rows: u32, expected_cols: u32 },
    #[error("image count {images} does not match label count {labels}")]
    CountMismatch { images: usize, labels: usize },
    #[error("label {label} at index {index} is not a digit class")]
    InvalidLabel { label: u8, index: usize },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdxOptions {
    /// Required image shape; `None` accepts any.
    pub expected_dims: Option<(u32, u32)>,
}

impl Default for IdxOptions {
    fn default() -> Self {
        Self { expected_dims: Some((28, 28)) }
    }
}

/// Grayscale images with digit labels, pixels stored contiguously.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    rows: u32,
    cols: u32,
    pixels: Vec<u8>,
    labels: Vec<u8>,
}

impl Dataset {
    pub fn new(rows: u32, cols: u32, pixels: Vec<u8>, labels: Vec<u8>) -> Result<Self, DataError> {
        let size = rows as usize * cols as usize;
        let images = pixels.len().checked_div(size).unwrap_or(0);
        if size * images != pixels.len() {
            return Err(DataError::Truncated { expected: size * (images + 1), found: pixels.len() });
        }
        if images != labels.len() {
            return Err(DataError::CountMismatch { images, labels: labels.len() });
        }
        if let Some(index) = labels.iter().position(|&l| l >= NUM_CLASSES) {
            return Err(DataError::InvalidLabel { label: labels[index], index });
        }
        Ok(Self { rows, cols, pixels, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.rows, self.cols)
    }

    pub fn pixels_per_image(&self) -> usize {
        self.rows as usize * self.cols as usize
    }

    pub fn image(&self, k: usize) -> &[u8] {
        let n = self.pixels_per_image();
        &self.pixels[k * n..(k + 1) * n]
    }

    pub fn label(&self, k: usize) -> u8 {
        self.labels[k]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Concatenation of two datasets of the same image shape.
    pub fn concat(mut self, other: &Dataset) -> Result<Self, DataError> {
        if self.dims() != other.dims() {
            return Err(DataError::BadDimensions {
                rows: other.rows,
                cols: other.cols,
                expected_rows: self.rows,
                expected_cols: self.cols,
            });
        }
        self.pixels.extend_from_slice(&other.pixels);
        self.labels.extend_from_slice(&other.labels);
        Ok(self)
    }

    /// Serializes back to (image file, label file) IDX bytes.
    pub fn to_idx_bytes(&self) -> (Vec<u8>, Vec<u8>) {
        let n = self.len() as u32;
        let mut images = Vec::with_capacity(16 + self.pixels.len());
        for word in [IMAGE_MAGIC, n, self.rows, self.cols] {
            images.extend_from_slice(&word.to_be_bytes());
        }
        images.extend_from_slice(&self.pixels);
        let mut labels = Vec::with_capacity(8 + self.labels.len());
        for word in [LABEL_MAGIC, n] {
            labels.extend_from_slice(&word.to_be_bytes());
        }
        labels.extend_from_slice(&self.labels);
        (images, labels)
    }
}

fn be_u32(bytes: &[u8], offset: usize) -> Result<u32, DataError> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes(b.try_into().unwrap()))
        .ok_or(DataError::Truncated { expected: offset + 4, found: bytes.len() })
}

fn check_magic(bytes: &[u8], expected: u32) -> Result<(), DataError> {
    let found = be_u32(bytes, 0)?;
    if found != expected {
        return Err(DataError::BadMagic { expected, found });
    }
    Ok(())
}

/// Parses an image file into `(rows, cols, pixels)`.
pub fn parse_images(bytes: &[u8], opts: &IdxOptions) -> Result<(u32, u32, Vec<u8>), DataError> {
    check_magic(bytes, IMAGE_MAGIC)?;
    let count = be_u32(bytes, 4)? as usize;
    let rows = be_u32(bytes, 8)?;
    let cols = be_u32(bytes, 12)?;
    if let Some((er, ec)) = opts.expected_dims {
        if (rows, cols) != (er, ec) {
            return Err(DataError::BadDimensions { rows, cols, expected_rows: er, expected_cols: ec });
        }
    }
    let expected = 16 + count * rows as usize * cols as usize;
    if bytes.len() < expected {
        return Err(DataError::Truncated { expected, found: bytes.len() });
    }
    Ok((rows, cols, bytes[16..expected].to_vec()))
}

pub fn parse_labels(bytes: &[u8]) -> Result<Vec<u8>, DataError> {
    check_magic(bytes, LABEL_MAGIC)?;
    let count = be_u32(bytes, 4)? as usize;
    let expected = 8 + count;
    if bytes.len() < expected {
        return Err(DataError::Truncated { expected, found: bytes.len() });
    }
    Ok(bytes[8..expected].to_vec())
}

pub fn load_idx(image_bytes: &[u8], label_bytes: &[u8], opts: &IdxOptions) -> Result<Dataset, DataError> {
    let (rows, cols, pixels) = parse_images(&inflate(image_bytes)?, opts)?;
    let labels = parse_labels(&inflate(label_bytes)?)?;
    Dataset::new(rows, cols, pixels, labels)
}

pub fn load_idx_files(images: &Path, labels: &Path, opts: &IdxOptions) -> Result<Dataset, DataError> {
    let read = |p: &Path| fs::read(p).map_err(|source| DataError::Io { path: p.display().to_string(), source });
    load_idx(&read(images)?, &read(labels)?, opts)
}

fn inflate(bytes: &[u8]) -> Result<std::borrow::Cow<'_, [u8]>, DataError> {
    if bytes.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(bytes)
            .read_to_end(&mut out)
            .map_err(|source| DataError::Io { path: "<gzip stream>".into(), source })?;
        Ok(out.into())
    } else {
        Ok(bytes.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use flate2::{write::GzEncoder, Compression};
    use std::io::Write;

    fn image_header(count: u32, rows: u32, cols: u32) -> Vec<u8> {
        [IMAGE_MAGIC, count, rows, cols].iter().flat_map(|w| w.to_be_bytes()).collect()
    }

    fn label_file(labels: &[u8]) -> Vec<u8> {
        let mut v: Vec<u8> = [LABEL_MAGIC, labels.len() as u32].iter().flat_map(|w| w.to_be_bytes()).collect();
        v.extend_from_slice(labels);
        v
    }

    fn two_image_fixture() -> (Vec<u8>, Vec<u8>) {
        let mut images = image_header(2, 28, 28);
        images.extend((0..2 * 784).map(|k| (k % 256) as u8));
        (images, label_file(&[3, 7]))
    }

    #[test]
    fn parses_constructed_fixture() {
        let (images, labels) = two_image_fixture();
        let ds = load_idx(&images, &labels, &IdxOptions::default()).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.label(1), 7);
        assert_eq!(ds.image(1)[0], (784 % 256) as u8);
        assert_eq!(ds.to_idx_bytes(), (images, labels));
    }

    #[test]
    fn label_file_with_image_magic_rejected() {
        let (images, _) = two_image_fixture();
        let mut labels = label_file(&[3, 7]);
        labels[3] = 0x03;
        assert!(matches!(
            load_idx(&images, &labels, &IdxOptions::default()),
            Err(DataError::BadMagic { expected: LABEL_MAGIC, found: IMAGE_MAGIC })
        ));
    }

    #[test]
    fn count_mismatch_rejected() {
        let mut images = image_header(3, 28, 28);
        images.extend(std::iter::repeat_n(0u8, 3 * 784));
        let labels = label_file(&[1, 2]);
        assert!(matches!(
            load_idx(&images, &labels, &IdxOptions::default()),
            Err(DataError::CountMismatch { images: 3, labels: 2 })
        ));
    }

    #[test]
    fn truncated_payload_rejected() {
        let (images, labels) = two_image_fixture();
        assert!(matches!(
            load_idx(&images[..images.len() - 1], &labels, &IdxOptions::default()),
            Err(DataError::Truncated { .. })
        ));
        assert!(matches!(parse_labels(&labels[..6]), Err(DataError::Truncated { .. })));
    }

    #[test]
    fn dimensions_checked_unless_overridden() {
        let mut images = image_header(1, 8, 8);
        images.extend(std::iter::repeat_n(9u8, 64));
        let labels = label_file(&[4]);
        assert!(matches!(load_idx(&images, &labels, &IdxOptions::default()), Err(DataError::BadDimensions { .. })));
        let ds = load_idx(&images, &labels, &IdxOptions { expected_dims: None }).unwrap();
        assert_eq!(ds.dims(), (8, 8));
    }

    #[test]
    fn non_digit_label_rejected() {
        let mut images = image_header(1, 28, 28);
        images.extend(std::iter::repeat_n(0u8, 784));
        assert!(matches!(
            load_idx(&images, &label_file(&[10]), &IdxOptions::default()),
            Err(DataError::InvalidLabel { label: 10, index: 0 })
        ));
    }

    #[test]
    fn gzip_is_transparent() {
        let (images, labels) = two_image_fixture();
        let gz = |b: &[u8]| {
            let mut e = GzEncoder::new(Vec::new(), Compression::fast());
            e.write_all(b).unwrap();
            e.finish().unwrap()
        };
        let plain = load_idx(&images, &labels, &IdxOptions::default()).unwrap();
        let packed = load_idx(&gz(&images), &gz(&labels), &IdxOptions::default()).unwrap();
        assert_eq!(plain, packed);
    }
}
