//! Streaming video object tracking with a diversity-selected long-term memory.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! at the bottom of this file fix the element type for the common case.

pub mod distance;
mod embedding;
mod error;
mod frame;
pub mod io;
pub mod losses;
mod mask;
mod masklet;
pub mod memory;
pub mod metrics;
mod prompt;
mod scalar;
pub mod semantic;

pub use distance::distance_transform_argmax;
pub use embedding::{cosine_similarity, Embedding, FeatureGrid};
pub use error::{Error, Result};
pub use frame::{check_frame_sequence, Frame, Rgb};
pub use mask::{mask_iou, mask_iou_with, BinaryMask, SoftMask, EMPTY_IOU};
pub use masklet::{check_unique_ids, Masklet};
pub use prompt::{BoxPrompt, Click, Polarity, Prompt};
pub use scalar::{dot, ordered_sum, Scalar};

pub type Embedding64 = Embedding<f64>;
pub type Embedding32 = Embedding<f32>;
pub type SoftMask64 = SoftMask<f64>;
pub type SoftMask32 = SoftMask<f32>;
pub type FeatureGrid64 = FeatureGrid<f64>;
pub type MemoryEntry64 = memory::MemoryEntry<f64>;
pub type MemoryBank64 = memory::MemoryBank<f64>;
pub type SemanticHead64 = semantic::SemanticHead<f64>;
pub type SemanticHead32 = semantic::SemanticHead<f32>;
pub type GaussianKernel64 = losses::GaussianKernel<f64>;
