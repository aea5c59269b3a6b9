//! Runs every memory mode over a scene suite and scores the result.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::Instant;

use memtrack::memory::validate_trace;
use memtrack::metrics::{fps, jf_evaluate, jf_table, per_frame_scores, simulate_clicks_with, EvalSettings, VideoExtent};
use memtrack::semantic::load_checkpoint;
use memtrack::{BinaryMask, BoxPrompt, Frame, Masklet, Prompt};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, PromptKind};
use crate::embed::{PatchEmbedder, PATCH_FEATURES};
use crate::error::{HarnessError, Result};
use crate::propagate::MemoryMode;
use crate::scene::{generate_scene, reappear_suite, static_scene, SceneData, SceneSpec};
use crate::session::{segment_clicks, TrackerSession};

/// Frames in the static scene added by `include_static`.
pub const STATIC_FRAMES: usize = 40;

/// Result of tracking one video in one mode.
#[derive(Clone, Debug)]
pub struct TrackOutput {
    pub masklets: Vec<Masklet>,
    pub traces: BTreeMap<u32, String>,
    pub prompt_frames: Vec<usize>,
    pub frames: usize,
    pub seconds: f64,
}

fn bounding_box(mask: &BinaryMask) -> Option<BoxPrompt> {
    let (w, h) = mask.dims();
    let mut b: Option<BoxPrompt> = None;
    for y in 0..h {
        for x in 0..w {
            if mask.get(x, y) {
                let bb = b.get_or_insert(BoxPrompt { x_min: x, y_min: y, x_max: x, y_max: y });
                bb.x_min = bb.x_min.min(x);
                bb.x_max = bb.x_max.max(x);
                bb.y_min = bb.y_min.min(y);
                bb.y_max = bb.y_max.max(y);
            }
        }
    }
    b
}

/// First-frame prompts for every ground-truth object visible on frame 0.
pub fn build_prompts(cfg: &ExperimentConfig, first: &Frame, gts: &[Masklet]) -> Result<Vec<(u32, Prompt)>> {
    let tolerance = cfg.propagator.grow_tolerance;
    let mut out = Vec::new();
    for gt in gts {
        let Some(mask) = gt.get(first.index).filter(|m| !m.is_empty()) else {
            continue;
        };
        let prompt = match cfg.experiment.prompt {
            PromptKind::Mask => Prompt::Mask(mask.clone()),
            PromptKind::Box => Prompt::Box(bounding_box(mask).expect("mask is not empty")),
            PromptKind::Clicks => {
                let seq = simulate_clicks_with(mask, cfg.experiment.clicks, |clicks| {
                    Ok(segment_clicks(first, clicks, tolerance))
                })?;
                Prompt::Clicks(seq.clicks)
            }
        };
        out.push((gt.instance_id, prompt));
    }
    if out.is_empty() {
        return Err(HarnessError::Validation("no object is visible on the first frame".into()));
    }
    Ok(out)
}

/// Temporal embeddings from a semantic-head checkpoint, sized for patch features.
pub fn load_temporal(path: &Path) -> Result<Vec<Vec<f64>>> {
    let (_, head) = load_checkpoint::<f64>(path)?;
    if head.dim != PATCH_FEATURES {
        return Err(HarnessError::config(
            "experiment.temporal_checkpoint",
            format!("head dimension {} does not match the {PATCH_FEATURES} patch features", head.dim),
        ));
    }
    Ok(head.temporal_embeddings)
}

/// Prompts on the first frame, then tracks through the rest.
pub fn track_video(
    cfg: &ExperimentConfig,
    frames: &[Frame],
    prompts: &[(u32, Prompt)],
    mode: MemoryMode,
    temporal: &[Vec<f64>],
) -> Result<TrackOutput> {
    let first = frames.first().ok_or_else(|| memtrack::Error::Degenerate("video has no frames".into()))?;
    let mut session = TrackerSession::new(
        Box::new(PatchEmbedder::default()),
        cfg.memory.clone(),
        cfg.propagator.clone(),
        mode,
    )?
    .with_temporal_embeddings(temporal.to_vec());
    let start = Instant::now();
    let mut masklets: BTreeMap<u32, Masklet> = BTreeMap::new();
    for (id, mask) in session.prompt(first, prompts)? {
        let mut m = Masklet::new(id, None);
        if !mask.is_empty() {
            m.insert(first.index, mask)?;
        }
        masklets.insert(id, m);
    }
    for frame in &frames[1..] {
        for (id, pred) in session.step(frame)? {
            if !pred.mask.is_empty() {
                masklets.get_mut(&id).expect("prompted object").insert(frame.index, pred.mask)?;
            }
        }
    }
    Ok(TrackOutput {
        masklets: masklets.into_values().collect(),
        traces: session.traces(),
        prompt_frames: session.prompt_frames().to_vec(),
        frames: frames.len(),
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reacquisition {
    pub object: u32,
    pub frame: usize,
    /// First frame within the window whose region score reached the threshold.
    pub found_at: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObjectScore {
    pub object: u32,
    pub j: f64,
    pub f: f64,
    pub jf: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SceneReport {
    pub scene: String,
    pub group: String,
    pub mode: MemoryMode,
    pub objects: Vec<ObjectScore>,
    pub reacquisitions: Vec<Reacquisition>,
    pub trace_problems: Vec<String>,
    pub prompt_frames: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReacquisitionSummary {
    pub events: usize,
    pub reacquired: usize,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeReport {
    pub mode: MemoryMode,
    /// Unweighted means over every object of every scene.
    pub j: f64,
    pub f: f64,
    pub jf: f64,
    pub reacquisition: ReacquisitionSummary,
    pub trace_problems: usize,
    pub prompts_on_first_frame_only: bool,
    pub groups: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub seed: u64,
    pub modes: Vec<ModeReport>,
    pub scenes: Vec<SceneReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeTiming {
    pub mode: MemoryMode,
    pub frames: usize,
    pub seconds: f64,
    pub fps: f64,
}

/// Everything produced by a run: the deterministic report, wall-clock
/// timings, and the memory traces keyed by mode, scene and object.
#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub report: ExperimentReport,
    pub timing: Vec<ModeTiming>,
    pub traces: BTreeMap<(MemoryMode, String, u32), String>,
}

impl ExperimentReport {
    pub fn mode(&self, mode: MemoryMode) -> Option<&ModeReport> {
        self.modes.iter().find(|m| m.mode == mode)
    }

    /// J&F per group (columns) for every mode (rows).
    pub fn table(&self) -> String {
        let groups: BTreeSet<&String> = self.modes.iter().flat_map(|m| m.groups.keys()).collect();
        let groups: Vec<String> = groups.into_iter().cloned().collect();
        let rows: Vec<(String, Vec<f64>)> = self
            .modes
            .iter()
            .map(|m| (m.mode.name().to_string(), groups.iter().map(|g| m.groups.get(g).copied().unwrap_or(f64::NAN)).collect()))
            .collect();
        jf_table(&groups, &rows)
    }
}

pub fn suite_specs(cfg: &ExperimentConfig) -> Vec<SceneSpec> {
    let mut specs = Vec::new();
    if cfg.experiment.include_static {
        specs.push(static_scene(cfg.experiment.seed, STATIC_FRAMES));
    }
    specs.extend(reappear_suite(cfg.experiment.seed, cfg.experiment.scenes));
    specs
}

fn extent_of(data: &SceneData) -> VideoExtent {
    let (width, height) = data.frames[0].dims();
    VideoExtent { frames: data.frames.len(), width, height }
}

/// Scores one tracked scene.
pub fn score_scene(
    cfg: &ExperimentConfig,
    spec: &SceneSpec,
    data: &SceneData,
    mode: MemoryMode,
    out: &TrackOutput,
) -> Result<SceneReport> {
    let settings: &EvalSettings = &cfg.metrics;
    let extent = extent_of(data);
    let prompted: BTreeSet<u32> = out.masklets.iter().map(|m| m.instance_id).collect();
    let gts: Vec<Masklet> = data.masklets.iter().filter(|m| prompted.contains(&m.instance_id)).cloned().collect();
    let eval = jf_evaluate(&out.masklets, &gts, extent, settings)?;
    let objects = eval
        .per_masklet
        .iter()
        .map(|s| ObjectScore { object: s.instance_id, j: s.j, f: s.f, jf: (s.j + s.f) / 2.0 })
        .collect();

    let mut reacquisitions = Vec::new();
    for (object, frame) in spec.reappearances() {
        let (Some(pred), Some(gt)) = (
            out.masklets.iter().find(|m| m.instance_id == object),
            gts.iter().find(|m| m.instance_id == object),
        ) else {
            continue;
        };
        let all = EvalSettings { skip_prompt_frame: false, ..settings.clone() };
        let scores = per_frame_scores(pred, gt, extent, &all)?;
        let end = (frame + cfg.experiment.reacquire_window).min(extent.frames);
        let found_at = scores
            .iter()
            .filter(|(t, _, _)| (frame..end).contains(t) && gt.get(*t).is_some())
            .find(|(_, j, _)| *j >= cfg.experiment.reacquire_j)
            .map(|(t, _, _)| *t);
        reacquisitions.push(Reacquisition { object, frame, found_at });
    }

    let trace_problems = out
        .traces
        .iter()
        .flat_map(|(id, text)| validate_trace(text, &cfg.memory).into_iter().map(move |p| format!("object {id}: {p}")))
        .collect();

    Ok(SceneReport {
        scene: spec.name.clone(),
        group: spec.group.clone(),
        mode,
        objects,
        reacquisitions,
        trace_problems,
        prompt_frames: out.prompt_frames.clone(),
    })
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

fn summarize(mode: MemoryMode, scenes: &[&SceneReport]) -> ModeReport {
    let objects = || scenes.iter().flat_map(|s| s.objects.iter());
    let events = scenes.iter().map(|s| s.reacquisitions.len()).sum::<usize>();
    let reacquired = scenes
        .iter()
        .flat_map(|s| &s.reacquisitions)
        .filter(|r| r.found_at.is_some())
        .count();
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for s in scenes {
        groups.entry(s.group.clone()).or_default().extend(s.objects.iter().map(|o| o.jf));
    }
    ModeReport {
        mode,
        j: mean(objects().map(|o| o.j)),
        f: mean(objects().map(|o| o.f)),
        jf: mean(objects().map(|o| o.jf)),
        reacquisition: ReacquisitionSummary {
            events,
            reacquired,
            rate: if events == 0 { f64::NAN } else { reacquired as f64 / events as f64 },
        },
        trace_problems: scenes.iter().map(|s| s.trace_problems.len()).sum(),
        prompts_on_first_frame_only: scenes.iter().all(|s| s.prompt_frames == [0]),
        groups: groups.into_iter().map(|(g, v)| (g, mean(v.into_iter()))).collect(),
    }
}

/// Generates the suite, tracks it in every configured mode and scores it.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let temporal = match &cfg.experiment.temporal_checkpoint {
        Some(p) => load_temporal(p)?,
        None => Vec::new(),
    };
    let specs = suite_specs(cfg);
    let scenes: Vec<(SceneSpec, SceneData, Vec<(u32, Prompt)>)> = specs
        .into_par_iter()
        .map(|spec| {
            let data = generate_scene(&spec)?;
            let prompts = build_prompts(cfg, &data.frames[0], &data.masklets)?;
            Ok((spec, data, prompts))
        })
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, MemoryMode)> = cfg
        .experiment
        .modes
        .iter()
        .flat_map(|&m| (0..scenes.len()).map(move |s| (s, m)))
        .collect();
    let runs: Vec<(SceneReport, TrackOutput)> = jobs
        .par_iter()
        .map(|&(s, mode)| {
            let (spec, data, prompts) = &scenes[s];
            let out = track_video(cfg, &data.frames, prompts, mode, &temporal)?;
            Ok((score_scene(cfg, spec, data, mode, &out)?, out))
        })
        .collect::<Result<_>>()?;

    let mut modes = Vec::new();
    let mut timing = Vec::new();
    let mut seen = BTreeSet::new();
    for &mode in &cfg.experiment.modes {
        if !seen.insert(mode) {
            continue;
        }
        let of_mode: Vec<&(SceneReport, TrackOutput)> = runs.iter().filter(|(r, _)| r.mode == mode).collect();
        let reports: Vec<&SceneReport> = of_mode.iter().map(|(r, _)| r).collect();
        modes.push(summarize(mode, &reports));
        let frames: usize = of_mode.iter().map(|(_, o)| o.frames).sum();
        let seconds: f64 = of_mode.iter().map(|(_, o)| o.seconds).sum();
        timing.push(ModeTiming {
            mode,
            frames,
            seconds,
            fps: fps(frames, std::time::Duration::from_secs_f64(seconds))?,
        });
    }

    let mut traces = BTreeMap::new();
    for (r, o) in &runs {
        for (id, text) in &o.traces {
            traces.insert((r.mode, r.scene.clone(), *id), text.clone());
        }
    }
    let report = ExperimentReport {
        name: cfg.experiment.name.clone(),
        seed: cfg.experiment.seed,
        modes,
        scenes: runs.into_iter().map(|(r, _)| r).collect(),
    };
    Ok(ExperimentOutput { report, timing, traces })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

/// Writes `report.json`, `report.txt`, `timing.json`, the resolved
/// `config.toml` and `traces/<mode>/<scene>_obj<id>.txt` under `dir`.
pub fn write_outputs(dir: &Path, cfg: &ExperimentConfig, out: &ExperimentOutput) -> Result<()> {
    write_text(&dir.join("report.json"), &json(&out.report))?;
    write_text(&dir.join("timing.json"), &json(&out.timing))?;
    write_text(&dir.join("report.txt"), &out.report.table())?;
    write_text(&dir.join("config.toml"), &cfg.to_toml())?;
    for ((mode, scene, id), text) in &out.traces {
        write_text(&dir.join("traces").join(mode.name()).join(format!("{scene}_obj{id}.txt")), text)?;
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}
