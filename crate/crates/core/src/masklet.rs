use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::mask::BinaryMask;

/// One object's mask track through a video. A frame with no entry means the
/// object is not visible there.
#[derive(Clone, Debug, PartialEq)]
pub struct Masklet {
    pub instance_id: u32,
    pub category: Option<String>,
    track: BTreeMap<usize, BinaryMask>,
}

impl Masklet {
    pub fn new(instance_id: u32, category: Option<String>) -> Self {
        Self {
            instance_id,
            category,
            track: BTreeMap::new(),
        }
    }

    /// Records the mask at `frame`. All masks of a masklet share one resolution.
    pub fn insert(&mut self, frame: usize, mask: BinaryMask) -> Result<()> {
        if let Some((_, first)) = self.track.iter().next() {
            if first.dims() != mask.dims() {
                return Err(Error::contract(format!(
                    "masklet {} mixes resolutions {:?} and {:?}",
                    self.instance_id,
                    first.dims(),
                    mask.dims()
                )));
            }
        }
        self.track.insert(frame, mask);
        Ok(())
    }

    pub fn get(&self, frame: usize) -> Option<&BinaryMask> {
        self.track.get(&frame)
    }

    pub fn frames(&self) -> impl Iterator<Item = usize> + '_ {
        self.track.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &BinaryMask)> {
        self.track.iter().map(|(f, m)| (*f, m))
    }

    pub fn len(&self) -> usize {
        self.track.len()
    }

    pub fn is_empty(&self) -> bool {
        self.track.is_empty()
    }

    pub fn resolution(&self) -> Option<(usize, usize)> {
        self.track.values().next().map(BinaryMask::dims)
    }

    pub fn check_within(&self, frame_count: usize) -> Result<()> {
        match self.track.keys().next_back() {
            Some(&last) if last >= frame_count => Err(Error::contract(format!(
                "masklet {} references frame {last} of a {frame_count}-frame video",
                self.instance_id
            ))),
            _ => Ok(()),
        }
    }
}

/// Instance ids must be unique within a video.
pub fn check_unique_ids(masklets: &[Masklet]) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for m in masklets {
        if !seen.insert(m.instance_id) {
            return Err(Error::contract(format!(
                "duplicate instance id {}",
                m.instance_id
            )));
        }
    }
    Ok(())
}
