//! Run-length encoding of binary masks.
//!
//! Runs alternate background/foreground in row-major order and always start
//! with a background run, which is zero when the first pixel is foreground.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mask::BinaryMask;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RleMask {
    pub width: usize,
    pub height: usize,
    pub runs: Vec<usize>,
}

impl RleMask {
    /// Structural checks: positive size, runs cover the grid exactly, and
    /// only the leading run may be zero.
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::Corrupt(format!(
                "rle mask has zero dimension {}x{}",
                self.width, self.height
            )));
        }
        if self.runs.is_empty() {
            return Err(Error::Corrupt("rle mask has no runs".into()));
        }
        if let Some(i) = self.runs.iter().skip(1).position(|r| *r == 0) {
            return Err(Error::Corrupt(format!("zero-length interior run at position {}", i + 1)));
        }
        let total: usize = self.runs.iter().sum();
        if total != self.width * self.height {
            return Err(Error::Corrupt(format!(
                "runs sum to {total}, expected {} for {}x{}",
                self.width * self.height,
                self.width,
                self.height
            )));
        }
        Ok(())
    }
}

pub fn rle_encode(m: &BinaryMask) -> RleMask {
    let mut runs = Vec::new();
    let mut current = false;
    let mut len = 0usize;
    for &bit in m.bits() {
        if bit == current {
            len += 1;
        } else {
            runs.push(len);
            current = bit;
            len = 1;
        }
    }
    runs.push(len);
    RleMask {
        width: m.width(),
        height: m.height(),
        runs,
    }
}

pub fn rle_decode(r: &RleMask) -> Result<BinaryMask> {
    r.validate()?;
    let mut bits = Vec::with_capacity(r.width * r.height);
    for (i, &run) in r.runs.iter().enumerate() {
        bits.extend(std::iter::repeat(i % 2 == 1).take(run));
    }
    BinaryMask::new(r.width, r.height, bits)
}

const MAGIC: &str = "memtrack-rle v1";

/// Serializes `(frame, mask)` pairs of one masklet.
///
/// ```text
/// memtrack-rle v1
/// size <width> <height>
/// <frame>: <run> <run> ...
/// ```
pub fn format_masklet_rle(width: usize, height: usize, frames: &[(usize, RleMask)]) -> String {
    let mut out = format!("{MAGIC}\nsize {width} {height}\n");
    for (frame, rle) in frames {
        let _ = write!(out, "{frame}:");
        for r in &rle.runs {
            let _ = write!(out, " {r}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_masklet_rle(text: &str) -> Result<Vec<(usize, RleMask)>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some(MAGIC) {
        return Err(Error::Corrupt(format!("missing '{MAGIC}' header")));
    }
    let size = lines
        .next()
        .ok_or_else(|| Error::Corrupt("missing size line".into()))?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    let (width, height) = match dims.as_slice() {
        ["size", w, h] => (parse_num(w)?, parse_num(h)?),
        _ => return Err(Error::Corrupt(format!("bad size line '{size}'"))),
    };
    let mut frames: Vec<(usize, RleMask)> = Vec::new();
    for line in lines {
        let (frame, runs) = line
            .split_once(':')
            .ok_or_else(|| Error::Corrupt(format!("bad mask line '{line}'")))?;
        let frame = parse_num(frame.trim())?;
        if frames.last().is_some_and(|(prev, _)| *prev >= frame) {
            return Err(Error::Corrupt(format!("frame {frame} out of order")));
        }
        let runs = runs
            .split_whitespace()
            .map(parse_num)
            .collect::<Result<Vec<_>>>()?;
        let rle = RleMask {
            width,
            height,
            runs,
        };
        rle.validate()?;
        frames.push((frame, rle));
    }
    Ok(frames)
}

pub fn read_masklet_rle(path: &Path) -> Result<Vec<(usize, RleMask)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_masklet_rle(&text)
}

fn parse_num(s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::Corrupt(format!("expected a non-negative integer, got '{s}'")))
}
