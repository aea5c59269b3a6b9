//! Masklet persistence: RLE mask files, the dataset manifest, validation and
//! composition statistics.

mod manifest;
mod rle;
mod stats;

pub use manifest::{
    load_masklets, read_manifest, validate_dataset_dir, validate_manifest, write_dataset,
    write_manifest, DatasetManifest, MaskletRecord, Rule, VideoMasklets, VideoRecord, Violation,
    MANIFEST_FILE,
};
pub use rle::{
    format_masklet_rle, parse_masklet_rle, read_masklet_rle, rle_decode, rle_encode, RleMask,
};
pub use stats::{dataset_stats, CategoryTable, DatasetStats, OTHER_GROUP, UNLABELED_GROUP};
