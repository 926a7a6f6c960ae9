//! Dataset ingestion: MNIST IDX files, WDBC CSV rows, preprocessing into
//! unit-norm feature vectors, splits, federated shards and a binary cache.
//!
//! Class maps: digit `1` is class 0 and `9` is class 1; `M` is class 0 and
//! `B` is class 1.

mod cache;
mod dataset;
mod idx;
mod mnist;
mod wdbc;

pub use cache::{load_cache, read_cache, save_cache, write_cache, CACHE_MAGIC, CACHE_VERSION};
pub use dataset::{
    encode_sample, make_shards, mnist_binary, mnist_class_of, mnist_dataset, mnist_selection, partition_balanced, real_features, wdbc_dataset,
    ProcessedDataset, MNIST_DIGITS,
};
pub use idx::{parse_idx, read_idx, read_maybe_gzip, write_idx, IdxArray, IMAGES_MAGIC, LABELS_MAGIC};
pub use mnist::{downsample, load_mnist, mnist_to_features, Downsample, RawImage, OUT_SIDE, PIXELS, SIDE};
pub use wdbc::{load_wdbc, parse_wdbc, wdbc_to_features, write_wdbc, Diagnosis, WdbcRecord, WdbcScaler, N_FEATURES, PADDED_LEN};
