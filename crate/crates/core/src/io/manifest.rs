//! Dataset manifest: one JSON document listing videos and masklets, with each
//! masklet's masks stored in a separate RLE file referenced by relative path.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::rle::{format_masklet_rle, read_masklet_rle, rle_decode, rle_encode};
use crate::error::{Error, Result};
use crate::masklet::Masklet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VideoRecord {
    pub id: String,
    pub frame_count: usize,
    pub width: usize,
    pub height: usize,
    pub duration_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaskletRecord {
    pub video_id: String,
    pub instance_id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
    /// Frames that carry a mask, ascending.
    pub frames: Vec<usize>,
    /// RLE file relative to the manifest directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rle_path: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub videos: Vec<VideoRecord>,
    pub masklets: Vec<MaskletRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    DuplicateVideo,
    UnknownVideo,
    DuplicateInstance,
    FrameOutOfRange,
    FramesNotAscending,
    MaskFile,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::DuplicateVideo => "duplicate_video",
            Rule::UnknownVideo => "unknown_video",
            Rule::DuplicateInstance => "duplicate_instance",
            Rule::FrameOutOfRange => "frame_out_of_range",
            Rule::FramesNotAscending => "frames_not_ascending",
            Rule::MaskFile => "mask_file",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    pub video_id: String,
    pub instance_id: Option<u32>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] video '{}'", self.rule.name(), self.video_id)?;
        if let Some(id) = self.instance_id {
            write!(f, " masklet {id}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

/// Checks the manifest's structural invariants. An empty result means valid.
pub fn validate_manifest(d: &DatasetManifest) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut videos: BTreeMap<&str, &VideoRecord> = BTreeMap::new();
    for v in &d.videos {
        if videos.insert(v.id.as_str(), v).is_some() {
            out.push(Violation {
                rule: Rule::DuplicateVideo,
                video_id: v.id.clone(),
                instance_id: None,
                detail: "video id listed more than once".into(),
            });
        }
    }

    let mut seen: BTreeSet<(&str, u32)> = BTreeSet::new();
    for m in &d.masklets {
        let violation = |rule, detail: String| Violation {
            rule,
            video_id: m.video_id.clone(),
            instance_id: Some(m.instance_id),
            detail,
        };
        let Some(video) = videos.get(m.video_id.as_str()) else {
            out.push(violation(Rule::UnknownVideo, "masklet references a video not in the manifest".into()));
            continue;
        };
        if !seen.insert((m.video_id.as_str(), m.instance_id)) {
            out.push(violation(
                Rule::DuplicateInstance,
                format!("instance id {} is not unique within the video", m.instance_id),
            ));
        }
        if let Some(&bad) = m.frames.iter().find(|f| **f >= video.frame_count) {
            out.push(violation(
                Rule::FrameOutOfRange,
                format!("frame {bad} >= frame count {}", video.frame_count),
            ));
        }
        if m.frames.windows(2).any(|w| w[0] >= w[1]) {
            out.push(violation(Rule::FramesNotAscending, "frame list must be strictly ascending".into()));
        }
    }
    out
}

/// `validate_manifest` plus checks that every referenced RLE file exists,
/// parses, matches the video resolution, and lists exactly the manifest's frames.
pub fn validate_dataset_dir(dir: &Path, d: &DatasetManifest) -> Vec<Violation> {
    let mut out = validate_manifest(d);
    let videos: BTreeMap<&str, &VideoRecord> = d.videos.iter().map(|v| (v.id.as_str(), v)).collect();
    for m in &d.masklets {
        let (Some(video), Some(rel)) = (videos.get(m.video_id.as_str()), m.rle_path.as_ref()) else {
            continue;
        };
        let violation = |detail: String| Violation {
            rule: Rule::MaskFile,
            video_id: m.video_id.clone(),
            instance_id: Some(m.instance_id),
            detail,
        };
        match read_masklet_rle(&dir.join(rel)) {
            Err(e) => out.push(violation(format!("{rel}: {e}"))),
            Ok(frames) => {
                let listed: Vec<usize> = frames.iter().map(|(f, _)| *f).collect();
                if listed != m.frames {
                    out.push(violation(format!("{rel}: frames {listed:?} differ from manifest {:?}", m.frames)));
                }
                if let Some((f, r)) = frames
                    .iter()
                    .find(|(_, r)| (r.width, r.height) != (video.width, video.height))
                {
                    out.push(violation(format!(
                        "{rel}: frame {f} is {}x{}, video is {}x{}",
                        r.width, r.height, video.width, video.height
                    )));
                }
            }
        }
    }
    out
}

pub fn read_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

pub fn write_manifest(path: &Path, d: &DatasetManifest) -> Result<()> {
    let mut text = serde_json::to_string_pretty(d).expect("manifest serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// A video's metadata together with its decoded masklets.
#[derive(Clone, Debug)]
pub struct VideoMasklets {
    pub video: VideoRecord,
    pub masklets: Vec<Masklet>,
}

/// Writes `manifest.json` and one RLE file per masklet under `dir`.
pub fn write_dataset(dir: &Path, name: &str, videos: &[VideoMasklets]) -> Result<DatasetManifest> {
    let mask_dir = dir.join("masks");
    std::fs::create_dir_all(&mask_dir).map_err(|e| Error::io(&mask_dir, e))?;
    let mut manifest = DatasetManifest {
        name: name.to_string(),
        ..Default::default()
    };
    for vm in videos {
        manifest.videos.push(vm.video.clone());
        for m in &vm.masklets {
            let rel = format!("masks/{}_{}.rle", vm.video.id, m.instance_id);
            let frames: Vec<_> = m.iter().map(|(f, mask)| (f, rle_encode(mask))).collect();
            let text = format_masklet_rle(vm.video.width, vm.video.height, &frames);
            let path = dir.join(&rel);
            std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
            manifest.masklets.push(MaskletRecord {
                video_id: vm.video.id.clone(),
                instance_id: m.instance_id,
                category: m.category.clone(),
                frames: m.frames().collect(),
                rle_path: Some(rel),
            });
        }
    }
    write_manifest(&dir.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}

/// Loads every masklet of `video_id` from a dataset directory.
pub fn load_masklets(dir: &Path, d: &DatasetManifest, video_id: &str) -> Result<Vec<Masklet>> {
    let mut out = Vec::new();
    for rec in d.masklets.iter().filter(|m| m.video_id == video_id) {
        let mut masklet = Masklet::new(rec.instance_id, rec.category.clone());
        if let Some(rel) = &rec.rle_path {
            for (frame, rle) in read_masklet_rle(&dir.join(rel))? {
                masklet.insert(frame, rle_decode(&rle)?)?;
            }
        }
        out.push(masklet);
    }
    Ok(out)
}
