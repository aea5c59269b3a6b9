use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::select::select_diverse_index;
use super::trace::{Event, Transition};
use crate::embedding::{Embedding, FeatureGrid};
use crate::error::{Error, Result};
use crate::mask::SoftMask;
use crate::scalar::Scalar;

/// One remembered frame.
#[derive(Clone, Debug, PartialEq)]
pub struct MemoryEntry<T> {
    pub frame_index: usize,
    /// Frame-level embedding compared during diversity selection.
    pub embedding: Embedding<T>,
    /// Optional patch features for memory readers.
    pub features: Option<FeatureGrid<T>>,
    pub mask: SoftMask<T>,
    /// Predicted mask quality in `[0, 1]`.
    pub confidence: T,
    /// Long-term slot, assigned by the bank; `None` outside the long-term queue.
    pub temporal_embedding_id: Option<usize>,
}

impl<T: Scalar> MemoryEntry<T> {
    pub fn new(frame_index: usize, embedding: Embedding<T>, mask: SoftMask<T>, confidence: T) -> Result<Self> {
        if !(confidence >= T::zero() && confidence <= T::one()) {
            return Err(Error::contract(format!("confidence {confidence} outside [0, 1]")));
        }
        Ok(Self {
            frame_index,
            embedding,
            features: None,
            mask,
            confidence,
            temporal_embedding_id: None,
        })
    }

    pub fn with_features(mut self, features: FeatureGrid<T>) -> Self {
        self.features = Some(features);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MemoryConfig {
    /// Consecutive stable observations needed before a long-term admission.
    pub delta: usize,
    /// Confidence an observation must strictly exceed to count as stable.
    pub gamma_iou: f64,
    /// Long-term queue capacity, not counting the initial entry.
    pub n_long: usize,
    /// Short-term queue capacity.
    pub n_short: usize,
}

impl Default for MemoryConfig {
    fn default() -> Self {
        Self {
            delta: 5,
            gamma_iou: 0.95,
            n_long: 4,
            n_short: 6,
        }
    }
}

impl MemoryConfig {
    pub fn validate(&self) -> Result<()> {
        if self.delta < 1 {
            return Err(Error::contract("delta must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.gamma_iou) {
            return Err(Error::contract(format!("gamma_iou {} outside [0, 1]", self.gamma_iou)));
        }
        if self.n_long < 1 || self.n_short < 1 {
            return Err(Error::contract("memory capacities must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MemoryBank<T> {
    config: MemoryConfig,
    initial: Option<MemoryEntry<T>>,
    long_term: VecDeque<MemoryEntry<T>>,
    short_term: VecDeque<MemoryEntry<T>>,
    buffer: Vec<MemoryEntry<T>>,
    stable_streak: usize,
    last_frame: Option<usize>,
}

impl<T: Scalar> MemoryBank<T> {
    pub fn new(config: MemoryConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            initial: None,
            long_term: VecDeque::with_capacity(config.n_long),
            short_term: VecDeque::with_capacity(config.n_short),
            buffer: Vec::with_capacity(config.delta),
            stable_streak: 0,
            last_frame: None,
        })
    }

    pub fn config(&self) -> &MemoryConfig {
        &self.config
    }

    pub fn initial(&self) -> Option<&MemoryEntry<T>> {
        self.initial.as_ref()
    }

    pub fn long_term(&self) -> &VecDeque<MemoryEntry<T>> {
        &self.long_term
    }

    pub fn short_term(&self) -> &VecDeque<MemoryEntry<T>> {
        &self.short_term
    }

    pub fn buffer(&self) -> &[MemoryEntry<T>] {
        &self.buffer
    }

    pub fn stable_streak(&self) -> usize {
        self.stable_streak
    }

    pub fn last_frame(&self) -> Option<usize> {
        self.last_frame
    }

    /// The newest long-term entry, or the initial entry before any admission.
    pub fn latest_long(&self) -> Option<&MemoryEntry<T>> {
        self.long_term.back().or(self.initial.as_ref())
    }

    /// Feeds one tracked frame into the bank.
    ///
    /// The first observation of a session becomes the permanent initial entry.
    /// Later ones go to the short-term queue and, when stable, to the candidate
    /// buffer; the `delta`-th consecutive stable observation triggers a
    /// diversity selection into the long-term queue and clears the buffer.
    pub fn observe(&mut self, mut entry: MemoryEntry<T>) -> Result<Transition> {
        if let Some(last) = self.last_frame {
            if entry.frame_index <= last {
                return Err(Error::contract(format!(
                    "frame {} observed after frame {last}",
                    entry.frame_index
                )));
            }
        }
        entry.temporal_embedding_id = None;
        self.last_frame = Some(entry.frame_index);
        let present = entry.mask.has_foreground();
        let frame = entry.frame_index;
        let confidence = entry.confidence.as_f64();

        if self.initial.is_none() {
            self.initial = Some(entry);
            return Ok(self.transition(frame, confidence, present, Event::Initial));
        }

        if self.short_term.len() == self.config.n_short {
            self.short_term.pop_front();
        }
        self.short_term.push_back(entry.clone());

        let stable = entry.confidence > T::of(self.config.gamma_iou) && present;
        if !stable {
            let discarded = self.buffer.len();
            self.buffer.clear();
            self.stable_streak = 0;
            return Ok(self.transition(frame, confidence, present, Event::Reset { discarded }));
        }

        self.stable_streak += 1;
        self.buffer.push(entry);
        if self.stable_streak < self.config.delta {
            let streak = self.stable_streak;
            return Ok(self.transition(frame, confidence, present, Event::Buffered { streak }));
        }

        let latest = self
            .latest_long()
            .expect("initial entry exists after the first observation");
        let (pick, similarity) = select_diverse_index(&self.buffer, latest)?;
        let chosen = self.buffer.swap_remove(pick);
        let evicted = if self.long_term.len() == self.config.n_long {
            self.long_term.pop_front().map(|e| e.frame_index)
        } else {
            None
        };
        let selected = chosen.frame_index;
        self.long_term.push_back(chosen);
        for (slot, e) in self.long_term.iter_mut().enumerate() {
            e.temporal_embedding_id = Some(slot);
        }
        self.buffer.clear();
        self.stable_streak = 0;
        Ok(self.transition(
            frame,
            confidence,
            present,
            Event::Admitted {
                selected,
                similarity: similarity.as_f64(),
                evicted,
            },
        ))
    }

    fn transition(&self, frame: usize, confidence: f64, present: bool, event: Event) -> Transition {
        Transition {
            frame,
            confidence,
            present,
            event,
            long_term: self.long_term.iter().map(|e| e.frame_index).collect(),
            short_len: self.short_term.len(),
            buffer_len: self.buffer.len(),
        }
    }

    /// Memory context for the next frame: the initial entry, then long-term
    /// oldest to newest, then short-term oldest to newest. A frame held in both
    /// queues appears once, at its long-term position.
    pub fn assemble_context(&self) -> Vec<&MemoryEntry<T>> {
        let mut out: Vec<&MemoryEntry<T>> = Vec::with_capacity(1 + self.long_term.len() + self.short_term.len());
        out.extend(self.initial.iter());
        out.extend(self.long_term.iter());
        for e in &self.short_term {
            if !out.iter().any(|o| o.frame_index == e.frame_index) {
                out.push(e);
            }
        }
        out
    }
}
