//! Synthetic-video tracking harness around the `memtrack` memory bank.

pub mod config;
pub mod embed;
pub mod error;
pub mod experiment;
pub mod frames_io;
pub mod propagate;
pub mod sampler;
pub mod scene;
pub mod session;

pub use config::{ExperimentConfig, PromptKind};
pub use embed::{FrameEmbedder, PatchEmbedder};
pub use error::{HarnessError, Result};
pub use propagate::{MemoryMode, PropagatorParams};
pub use session::{Prediction, TrackerSession};
