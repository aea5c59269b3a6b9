//! Scene directories on disk: `frames/NNNNN.png`, `scene.toml` and a
//! one-video dataset (`manifest.json` plus RLE masks) for the ground truth.

use std::path::{Path, PathBuf};

use image::{ImageBuffer, Rgb as ImageRgb, RgbImage};
use memtrack::io::{load_masklets, read_manifest, write_dataset, VideoMasklets, VideoRecord, MANIFEST_FILE};
use memtrack::{Frame, Masklet};

use crate::error::{HarnessError, Result};
use crate::scene::{SceneData, SceneSpec};

pub const FRAME_DIR: &str = "frames";
pub const SPEC_FILE: &str = "scene.toml";
/// Frame rate recorded in generated manifests.
pub const FRAME_RATE: f64 = 24.0;

pub fn frame_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(FRAME_DIR).join(format!("{index:05}.png"))
}

pub fn write_frame(path: &Path, frame: &Frame) -> Result<()> {
    let (w, h) = frame.dims();
    let img: RgbImage = ImageBuffer::from_fn(w as u32, h as u32, |x, y| ImageRgb(frame.pixel(x as usize, y as usize)));
    img.save(path).map_err(|e| HarnessError::Image { path: path.to_path_buf(), message: e.to_string() })
}

pub fn read_frame(path: &Path, index: usize) -> Result<Frame> {
    let img = image::open(path)
        .map_err(|e| HarnessError::Image { path: path.to_path_buf(), message: e.to_string() })?
        .to_rgb8();
    let (w, h) = img.dimensions();
    let pixels = img.pixels().map(|p| p.0).collect();
    Ok(Frame::new(index, w as usize, h as usize, pixels)?)
}

/// Reads `frames/*.png` in name order; frame indices follow that order.
pub fn read_frames(dir: &Path) -> Result<Vec<Frame>> {
    let frame_dir = dir.join(FRAME_DIR);
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&frame_dir)
        .map_err(|e| HarnessError::io(&frame_dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("png")))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(HarnessError::Validation(format!("no PNG frames in {}", frame_dir.display())));
    }
    let frames: Vec<Frame> = paths.iter().enumerate().map(|(i, p)| read_frame(p, i)).collect::<Result<_>>()?;
    memtrack::check_frame_sequence(&frames)?;
    Ok(frames)
}

pub fn write_scene(dir: &Path, spec: &SceneSpec, data: &SceneData) -> Result<()> {
    let frame_dir = dir.join(FRAME_DIR);
    std::fs::create_dir_all(&frame_dir).map_err(|e| HarnessError::io(&frame_dir, e))?;
    for f in &data.frames {
        write_frame(&frame_path(dir, f.index), f)?;
    }
    let spec_path = dir.join(SPEC_FILE);
    let text = toml::to_string(spec).map_err(|e| HarnessError::Validation(e.to_string()))?;
    std::fs::write(&spec_path, text).map_err(|e| HarnessError::io(&spec_path, e))?;
    let video = VideoRecord {
        id: spec.name.clone(),
        frame_count: spec.frames,
        width: spec.width,
        height: spec.height,
        duration_s: spec.frames as f64 / FRAME_RATE,
    };
    write_dataset(dir, &spec.name, &[VideoMasklets { video, masklets: data.masklets.clone() }])?;
    Ok(())
}

/// Ground-truth masklets of the single video stored in `dir`.
pub fn read_masklets(dir: &Path) -> Result<Vec<Masklet>> {
    let manifest = read_manifest(&dir.join(MANIFEST_FILE))?;
    let video = match manifest.videos.as_slice() {
        [v] => v.id.clone(),
        other => {
            return Err(HarnessError::Validation(format!(
                "{} lists {} videos, expected one",
                dir.join(MANIFEST_FILE).display(),
                other.len()
            )))
        }
    };
    Ok(load_masklets(dir, &manifest, &video)?)
}

/// Writes predicted masklets for one video as a dataset directory.
pub fn write_predictions(dir: &Path, name: &str, frames: &[Frame], masklets: Vec<Masklet>) -> Result<()> {
    let (w, h) = frames.first().map(Frame::dims).unwrap_or((0, 0));
    let video = VideoRecord {
        id: name.to_string(),
        frame_count: frames.len(),
        width: w,
        height: h,
        duration_s: frames.len() as f64 / FRAME_RATE,
    };
    write_dataset(dir, name, &[VideoMasklets { video, masklets }])?;
    Ok(())
}
