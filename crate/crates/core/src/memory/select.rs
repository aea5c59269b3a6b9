use super::MemoryEntry;
use crate::embedding::cosine_similarity;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Index of the candidate with the lowest cosine similarity to `latest_long`,
/// and that similarity. Ties go to the earliest frame index.
pub fn select_diverse_index<T: Scalar>(
    buffer: &[MemoryEntry<T>],
    latest_long: &MemoryEntry<T>,
) -> Result<(usize, T)> {
    let mut best: Option<(usize, T)> = None;
    for (i, cand) in buffer.iter().enumerate() {
        let sim = cosine_similarity(&cand.embedding, &latest_long.embedding)?;
        let better = match best {
            None => true,
            Some((j, s)) => {
                sim < s || (sim == s && cand.frame_index < buffer[j].frame_index)
            }
        };
        if better {
            best = Some((i, sim));
        }
    }
    best.ok_or_else(|| Error::contract("diversity selection needs a non-empty buffer"))
}

/// The most diverse buffered candidate relative to the newest long-term entry.
pub fn select_diverse<'a, T: Scalar>(
    buffer: &'a [MemoryEntry<T>],
    latest_long: &MemoryEntry<T>,
) -> Result<&'a MemoryEntry<T>> {
    select_diverse_index(buffer, latest_long).map(|(i, _)| &buffer[i])
}
