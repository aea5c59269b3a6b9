use crate::error::{Error, Result};

pub type Rgb = [u8; 3];

/// One decoded video frame as a row-major RGB grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub index: usize,
    /// Seconds from the start of the video, when known.
    pub timestamp: Option<f64>,
    width: usize,
    height: usize,
    pixels: Vec<Rgb>,
}

impl Frame {
    pub fn new(index: usize, width: usize, height: usize, pixels: Vec<Rgb>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::contract("frame dimensions must be positive"));
        }
        if pixels.len() != width * height {
            return Err(Error::contract(format!(
                "frame of {width}x{height} needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(Self {
            index,
            timestamp: None,
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixel(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }
}

/// Checks the per-video frame invariants: strictly increasing indices and a
/// constant resolution.
pub fn check_frame_sequence(frames: &[Frame]) -> Result<()> {
    for pair in frames.windows(2) {
        if pair[1].index <= pair[0].index {
            return Err(Error::contract(format!(
                "frame index {} follows {}",
                pair[1].index, pair[0].index
            )));
        }
        if pair[1].dims() != pair[0].dims() {
            return Err(Error::contract(format!(
                "frame {} is {:?}, expected {:?}",
                pair[1].index,
                pair[1].dims(),
                pair[0].dims()
            )));
        }
    }
    Ok(())
}
