use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Frames per second for `frames` processed in `elapsed`.
pub fn fps(frames: usize, elapsed: Duration) -> Result<f64> {
    if frames == 0 {
        return Err(Error::degenerate("no frames were processed"));
    }
    // A single fast frame can finish below the clock resolution.
    let secs = elapsed.as_secs_f64().max(1e-9);
    Ok(frames as f64 / secs)
}

/// Wall-clock throughput of a tracking session. Start it after the data is
/// loaded and call `frame_done` once per processed frame.
#[derive(Debug)]
pub struct FpsTimer {
    started: Instant,
    frames: usize,
}

impl FpsTimer {
    pub fn start() -> Self {
        Self {
            started: Instant::now(),
            frames: 0,
        }
    }

    pub fn frame_done(&mut self) {
        self.frames += 1;
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn elapsed(&self) -> Duration {
        self.started.elapsed()
    }

    pub fn fps(&self) -> Result<f64> {
        fps(self.frames, self.elapsed())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        assert_eq!(fps(100, Duration::from_secs(2)).unwrap(), 50.0);
        assert!(matches!(fps(0, Duration::from_secs(1)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn single_frame_is_finite() {
        let mut t = FpsTimer::start();
        assert!(t.fps().is_err());
        t.frame_done();
        let v = t.fps().unwrap();
        assert!(v.is_finite() && v > 0.0);
    }
}
