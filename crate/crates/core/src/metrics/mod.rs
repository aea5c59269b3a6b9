//! Evaluation: region and boundary accuracy, J&F over masklets, click
//! simulation for prompting, and throughput.

mod clicks;
mod fps;
mod jf;
mod region;

pub use clicks::{simulate_clicks, simulate_clicks_with, ClickSequence};
pub use fps::{fps, FpsTimer};
pub use jf::{jf_evaluate, jf_table, per_frame_scores, EvalResult, EvalSettings, MaskletScore, VideoExtent};
pub use region::{boundary_f, boundary_map, default_boundary_tolerance, region_j, region_j_with};
