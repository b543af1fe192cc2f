//! Dataset ingestion and spike encoding.

mod encode;
mod idx;
mod split;

pub use encode::{encode_poisson, make_teacher, poisson_train, sample_seed, EncodingConfig};
pub use idx::{
    load_idx, load_idx_files, parse_images, parse_labels, DataError, Dataset, IdxOptions, IMAGE_MAGIC, LABEL_MAGIC,
};
pub use split::{random_80_20, Split};
