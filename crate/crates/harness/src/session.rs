use std::collections::BTreeMap;

use memtrack::memory::{MemoryBank, MemoryConfig, MemoryEntry, Transition};
use memtrack::{BinaryMask, BoxPrompt, Click, Frame, Polarity, Prompt, SoftMask};

use crate::embed::FrameEmbedder;
use crate::error::Result;
use crate::propagate::{context_for, propagate, MemoryMode, PropagatorParams};

/// 4-connected region of pixels within `tolerance` (0-255 scale) of the seed
/// color, limited to `bounds` when given.
pub fn grow_region(frame: &Frame, seed: (usize, usize), tolerance: f64, bounds: Option<BoxPrompt>) -> BinaryMask {
    let (w, h) = frame.dims();
    let b = bounds.unwrap_or(BoxPrompt { x_min: 0, y_min: 0, x_max: w - 1, y_max: h - 1 });
    let mut out = BinaryMask::empty(w, h);
    let s = frame.pixel(seed.0, seed.1);
    let close = |x: usize, y: usize| {
        let p = frame.pixel(x, y);
        let d: f64 = (0..3).map(|k| (f64::from(p[k]) - f64::from(s[k])).powi(2)).sum();
        d <= tolerance * tolerance
    };
    let mut stack = vec![seed];
    out.set(seed.0, seed.1, true);
    while let Some((x, y)) = stack.pop() {
        let neighbors = [
            (x.wrapping_sub(1), y),
            (x + 1, y),
            (x, y.wrapping_sub(1)),
            (x, y + 1),
        ];
        for (nx, ny) in neighbors {
            let in_box = nx >= b.x_min && nx <= b.x_max && ny >= b.y_min && ny <= b.y_max;
            if nx < w && ny < h && in_box && !out.get(nx, ny) && close(nx, ny) {
                out.set(nx, ny, true);
                stack.push((nx, ny));
            }
        }
    }
    out
}

/// Prompt-frame segmentation from clicks: regions grown from positive clicks,
/// minus regions grown from negative ones.
pub fn segment_clicks(frame: &Frame, clicks: &[Click], tolerance: f64) -> BinaryMask {
    let (w, h) = frame.dims();
    let grown: Vec<(Polarity, BinaryMask)> = clicks
        .iter()
        .map(|c| (c.polarity, grow_region(frame, (c.x, c.y), tolerance, None)))
        .collect();
    BinaryMask::from_fn(w, h, |x, y| {
        grown.iter().any(|(p, m)| *p == Polarity::Positive && m.get(x, y))
            && !grown.iter().any(|(p, m)| *p == Polarity::Negative && m.get(x, y))
    })
}

pub fn prompt_to_mask(frame: &Frame, prompt: &Prompt, tolerance: f64) -> Result<BinaryMask> {
    let (w, h) = frame.dims();
    prompt.validate(w, h)?;
    Ok(match prompt {
        Prompt::Mask(m) => m.clone(),
        Prompt::Clicks(c) => segment_clicks(frame, c, tolerance),
        Prompt::Box(b) => {
            let center = ((b.x_min + b.x_max) / 2, (b.y_min + b.y_max) / 2);
            grow_region(frame, center, tolerance, Some(*b))
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub mask: BinaryMask,
    pub confidence: f64,
}

struct ObjectTrack {
    bank: MemoryBank<f64>,
    trace: Vec<Transition>,
}

/// One tracking run over a video: prompts on the first frame, then one
/// memory bank per object, fed strictly in frame order.
pub struct TrackerSession {
    embedder: Box<dyn FrameEmbedder>,
    memory: MemoryConfig,
    params: PropagatorParams,
    mode: MemoryMode,
    temporal: Vec<Vec<f64>>,
    tracks: BTreeMap<u32, ObjectTrack>,
    last_frame: Option<usize>,
    prompt_frames: Vec<usize>,
}

impl TrackerSession {
    pub fn new(
        embedder: Box<dyn FrameEmbedder>,
        memory: MemoryConfig,
        params: PropagatorParams,
        mode: MemoryMode,
    ) -> Result<Self> {
        memory.validate()?;
        params.validate()?;
        Ok(Self {
            embedder,
            temporal: Vec::new(),
            memory,
            params,
            mode,
            tracks: BTreeMap::new(),
            last_frame: None,
            prompt_frames: Vec::new(),
        })
    }

    /// Vectors added to long-term patch features, one per long-term slot.
    /// Empty (the default) means no offset.
    pub fn with_temporal_embeddings(mut self, temporal: Vec<Vec<f64>>) -> Self {
        self.temporal = temporal;
        self
    }

    pub fn mode(&self) -> MemoryMode {
        self.mode
    }

    fn entry(&self, frame: &Frame, mask: &BinaryMask, confidence: f64) -> Result<MemoryEntry<f64>> {
        let grid = self.embedder.embed(frame)?;
        let embedding = grid.flatten();
        Ok(MemoryEntry::new(frame.index, embedding, mask.to_soft(), confidence)?.with_features(grid))
    }

    fn advance(&mut self, frame: &Frame) -> Result<()> {
        if let Some(last) = self.last_frame {
            if frame.index <= last {
                return Err(memtrack::Error::Contract(format!(
                    "frame {} processed after frame {last}",
                    frame.index
                ))
                .into());
            }
        }
        self.last_frame = Some(frame.index);
        Ok(())
    }

    /// Prompts every object on the session's first frame and returns the
    /// resulting masks. Prompts are rejected on any later frame.
    pub fn prompt(&mut self, frame: &Frame, prompts: &[(u32, Prompt)]) -> Result<BTreeMap<u32, BinaryMask>> {
        if self.last_frame.is_some() {
            return Err(memtrack::Error::Contract("prompts are only accepted on the first frame".into()).into());
        }
        if prompts.is_empty() {
            return Err(memtrack::Error::Contract("no prompts given".into()).into());
        }
        let mut masks = BTreeMap::new();
        for (id, prompt) in prompts {
            if masks.contains_key(id) {
                return Err(memtrack::Error::Contract(format!("object {id} prompted twice")).into());
            }
            masks.insert(*id, prompt_to_mask(frame, prompt, self.params.grow_tolerance)?);
        }
        self.advance(frame)?;
        self.prompt_frames.push(frame.index);
        for (id, mask) in &masks {
            let mut bank = MemoryBank::new(self.memory.clone())?;
            let t = bank.observe(self.entry(frame, mask, 1.0)?)?;
            self.tracks.insert(*id, ObjectTrack { bank, trace: vec![t] });
        }
        Ok(masks)
    }

    /// Tracks every prompted object into `frame`.
    pub fn step(&mut self, frame: &Frame) -> Result<BTreeMap<u32, Prediction>> {
        if self.tracks.is_empty() {
            return Err(memtrack::Error::Contract("session has not been prompted".into()).into());
        }
        self.advance(frame)?;
        let grid = self.embedder.embed(frame)?;
        let embedding = grid.flatten();
        let mut out = BTreeMap::new();
        for (id, track) in self.tracks.iter_mut() {
            let p = {
                let ctx = context_for(&track.bank, self.mode);
                propagate(&self.params, &ctx, &self.temporal, frame, &grid)?
            };
            let soft: SoftMask<f64> = p.mask.to_soft();
            let entry = MemoryEntry::new(frame.index, embedding.clone(), soft, p.confidence)?.with_features(grid.clone());
            track.trace.push(track.bank.observe(entry)?);
            out.insert(*id, Prediction { mask: p.mask, confidence: p.confidence });
        }
        Ok(out)
    }

    /// Bank transitions per object, one line per processed frame.
    pub fn traces(&self) -> BTreeMap<u32, String> {
        self.tracks
            .iter()
            .map(|(id, t)| (*id, t.trace.iter().map(|tr| format!("{tr}\n")).collect()))
            .collect()
    }

    pub fn bank(&self, object: u32) -> Option<&MemoryBank<f64>> {
        self.tracks.get(&object).map(|t| &t.bank)
    }

    /// Frames on which prompts were given.
    pub fn prompt_frames(&self) -> &[usize] {
        &self.prompt_frames
    }
}
