//! Temporal semantic head: a CLS token that reads the memory, then the current
//! frame, trained contrastively against category embeddings.

mod backward;
mod checkpoint;
mod head;
mod registry;
mod train;

pub use backward::{tsl_backward, tsl_loss, Gradients};
pub use checkpoint::{
    format_checkpoint, load_checkpoint, parse_checkpoint, save_checkpoint, CheckpointHeader,
};
pub use head::{AttentionParams, MemoryFeature, SemanticHead, INIT_STD};
pub use registry::CategoryRegistry;
pub use train::{train_head, TrainingSample};
