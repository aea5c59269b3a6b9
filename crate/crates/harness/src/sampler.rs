//! Training-time frame sampling: diverse clips (three scattered frames plus
//! five consecutive ones), plain consecutive clips, and a 1:1 alternation.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerMode {
    Divemem,
    Vanilla,
    #[serde(rename = "mixed_1_1")]
    Mixed11,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplerConfig {
    pub mode: SamplerMode,
    pub frames_per_clip: usize,
    /// Image samples to video samples in mixed image-video training.
    pub image_video_ratio: (u32, u32),
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            mode: SamplerMode::Mixed11,
            frames_per_clip: 8,
            image_video_ratio: (1, 4),
        }
    }
}

/// Frames drawn at random across the video in diverse clips.
pub const SCATTERED: usize = 3;
/// Consecutive frames closing a diverse clip.
pub const CONSECUTIVE: usize = 5;

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.frames_per_clip != SCATTERED + CONSECUTIVE {
            return Err(HarnessError::config(
                "sampler.frames_per_clip",
                format!("clips hold {} frames ({SCATTERED} scattered + {CONSECUTIVE} consecutive)", SCATTERED + CONSECUTIVE),
            ));
        }
        let (i, v) = self.image_video_ratio;
        if v == 0 && i == 0 {
            return Err(HarnessError::config("sampler.image_video_ratio", "ratio cannot be 0:0"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Conditional,
    LongTerm,
    Consecutive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrainingClip {
    /// Diverse (`true`) or consecutive (`false`) construction.
    pub diverse: bool,
    /// Frame index and role, in the order the frames are fed to the model.
    pub frames: Vec<(usize, Role)>,
}

/// Scattered conditional and long-term frames (ascending) followed by a run
/// of consecutive frames. The run and the scattered frames do not overlap.
pub fn diverse_clip<R: Rng>(video_length: usize, rng: &mut R) -> Result<TrainingClip> {
    check_length(video_length)?;
    let start = rng.gen_range(0..=video_length - CONSECUTIVE);
    let outside = video_length - CONSECUTIVE;
    let mut scattered: Vec<usize> = sample(rng, outside, SCATTERED)
        .into_iter()
        .map(|i| if i < start { i } else { i + CONSECUTIVE })
        .collect();
    let conditional = scattered.remove(rng.gen_range(0..SCATTERED));
    scattered.sort_unstable();
    let mut frames = vec![(conditional, Role::Conditional)];
    frames.extend(scattered.into_iter().map(|f| (f, Role::LongTerm)));
    frames.extend((start..start + CONSECUTIVE).map(|f| (f, Role::Consecutive)));
    Ok(TrainingClip { diverse: true, frames })
}

/// Eight consecutive frames, the first one conditional.
pub fn vanilla_clip<R: Rng>(video_length: usize, rng: &mut R) -> Result<TrainingClip> {
    check_length(video_length)?;
    let n = SCATTERED + CONSECUTIVE;
    let start = rng.gen_range(0..=video_length - n);
    let frames = (start..start + n)
        .map(|f| (f, if f == start { Role::Conditional } else { Role::Consecutive }))
        .collect();
    Ok(TrainingClip { diverse: false, frames })
}

fn check_length(video_length: usize) -> Result<()> {
    if video_length < SCATTERED + CONSECUTIVE {
        return Err(memtrack::Error::Degenerate(format!(
            "video of {video_length} frames is shorter than a {}-frame clip",
            SCATTERED + CONSECUTIVE
        ))
        .into());
    }
    Ok(())
}

/// A training draw: a single frame for image training or a clip.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TrainingItem {
    Image(usize),
    Clip(TrainingClip),
}

/// Stateful sampler; mixed mode alternates diverse and vanilla clips
/// deterministically, starting with a diverse one.
#[derive(Clone, Debug)]
pub struct ClipSampler {
    config: SamplerConfig,
    clips: usize,
    items: usize,
}

impl ClipSampler {
    pub fn new(config: SamplerConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config, clips: 0, items: 0 })
    }

    pub fn next_clip<R: Rng>(&mut self, video_length: usize, rng: &mut R) -> Result<TrainingClip> {
        let diverse = match self.config.mode {
            SamplerMode::Divemem => true,
            SamplerMode::Vanilla => false,
            SamplerMode::Mixed11 => self.clips % 2 == 0,
        };
        let clip = if diverse { diverse_clip(video_length, rng)? } else { vanilla_clip(video_length, rng)? };
        self.clips += 1;
        Ok(clip)
    }

    /// Images and clips in the configured ratio, interleaved deterministically.
    pub fn next_item<R: Rng>(&mut self, video_length: usize, rng: &mut R) -> Result<TrainingItem> {
        let (images, videos) = self.config.image_video_ratio;
        let period = (images + videos) as usize;
        let slot = self.items % period;
        self.items += 1;
        if slot < images as usize {
            Ok(TrainingItem::Image(rng.gen_range(0..video_length)))
        } else {
            self.next_clip(video_length, rng).map(TrainingItem::Clip)
        }
    }
}
