//! Diverse long-term memory.
//!
//! A [`MemoryBank`] keeps three things per tracked object:
//!
//! * the initial (prompt-frame) entry, which is never evicted;
//! * a FIFO long-term queue of at most `n_long` entries, each picked from a
//!   run of `delta` consecutive stable observations as the candidate least
//!   cosine-similar to the newest long-term entry;
//! * a FIFO short-term queue of the `n_short` most recent observations.
//!
//! An observation is stable when its confidence exceeds `gamma_iou` and its
//! mask has foreground. Any unstable observation empties the candidate buffer.

mod bank;
mod select;
mod trace;

pub use bank::{MemoryBank, MemoryConfig, MemoryEntry};
pub use select::{select_diverse, select_diverse_index};
pub use trace::{validate_trace, Event, Transition, TraceProblem};
