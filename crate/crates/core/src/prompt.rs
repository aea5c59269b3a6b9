use crate::error::{Error, Result};
use crate::mask::BinaryMask;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Click {
    pub x: usize,
    pub y: usize,
    pub polarity: Polarity,
}

impl Click {
    pub fn positive(x: usize, y: usize) -> Self {
        Self {
            x,
            y,
            polarity: Polarity::Positive,
        }
    }

    pub fn negative(x: usize, y: usize) -> Self {
        Self {
            x,
            y,
            polarity: Polarity::Negative,
        }
    }
}

/// Inclusive pixel box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BoxPrompt {
    pub x_min: usize,
    pub y_min: usize,
    pub x_max: usize,
    pub y_max: usize,
}

/// User guidance given on the first frame of a session.
#[derive(Clone, Debug, PartialEq)]
pub enum Prompt {
    Clicks(Vec<Click>),
    Box(BoxPrompt),
    Mask(BinaryMask),
}

impl Prompt {
    /// Checks the prompt against a `width x height` frame.
    pub fn validate(&self, width: usize, height: usize) -> Result<()> {
        match self {
            Prompt::Clicks(clicks) => {
                if clicks.is_empty() {
                    return Err(Error::contract("click prompt without clicks"));
                }
                if let Some(c) = clicks.iter().find(|c| c.x >= width || c.y >= height) {
                    return Err(Error::contract(format!(
                        "click ({}, {}) outside {width}x{height} frame",
                        c.x, c.y
                    )));
                }
            }
            Prompt::Box(b) => {
                if b.x_min > b.x_max || b.y_min > b.y_max {
                    return Err(Error::contract(format!("inverted box {b:?}")));
                }
                if b.x_max >= width || b.y_max >= height {
                    return Err(Error::contract(format!(
                        "box {b:?} outside {width}x{height} frame"
                    )));
                }
            }
            Prompt::Mask(m) => {
                if m.dims() != (width, height) {
                    return Err(Error::contract(format!(
                        "mask prompt is {:?}, frame is {width}x{height}",
                        m.dims()
                    )));
                }
            }
        }
        Ok(())
    }
}
