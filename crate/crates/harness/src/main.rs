use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use memtrack::io::{dataset_stats, read_manifest, validate_dataset_dir, CategoryTable, MANIFEST_FILE};
use memtrack::memory::validate_trace;
use memtrack::metrics::{jf_evaluate, VideoExtent};
use memtrack_harness::experiment::{build_prompts, load_temporal, run_experiment, track_video, write_outputs};
use memtrack_harness::frames_io::{read_frames, read_masklets, write_predictions, write_scene};
use memtrack_harness::scene::{generate_scene, reappear_suite, static_scene, SceneSpec};
use memtrack_harness::{ExperimentConfig, HarnessError, MemoryMode, PromptKind, Result};

#[derive(Parser)]
#[command(name = "memtrack", version, about = "Long-horizon video object tracking with diverse memory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a scene spec (or a seeded suite) to frames and ground-truth masklets.
    Generate(GenerateArgs),
    /// Track the objects of one scene directory from first-frame prompts.
    Track(TrackArgs),
    /// J&F of stored predictions against ground truth.
    Eval(EvalArgs),
    /// Full config-driven run over the scene suite in every memory mode.
    Experiment(ExperimentArgs),
    /// Check a dataset directory, config, scene spec or memory trace.
    Validate(ValidateArgs),
    /// Dataset composition statistics.
    Stats(StatsArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Scene spec (TOML). Without it, a seeded suite is generated.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Output directory; suites get one subdirectory per scene.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Number of disappear/reappear scenes in the suite.
    #[arg(long, default_value_t = 20)]
    scenes: usize,
    /// Also write the static single-object scene.
    #[arg(long)]
    include_static: bool,
}

#[derive(Args)]
struct TrackArgs {
    /// Scene directory written by `generate`.
    #[arg(long)]
    scene: PathBuf,
    /// Output directory for predicted masklets and traces.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "divemem")]
    mode: ModeArg,
    /// Overrides the configured prompt kind.
    #[arg(long, value_enum)]
    prompt: Option<PromptArg>,
}

#[derive(Args)]
struct EvalArgs {
    /// Dataset directory of predictions.
    #[arg(long)]
    pred: PathBuf,
    /// Dataset directory of ground truth.
    #[arg(long)]
    gt: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scene: Option<PathBuf>,
    /// Memory trace to check against the memory settings of `--config`.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Category renames and groups (TOML with `rename` and `groups` tables).
    #[arg(long)]
    categories: Option<PathBuf>,
    /// Decimals kept in the mean video duration.
    #[arg(long, default_value_t = 1)]
    decimals: u32,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModeArg {
    Divemem,
    GreedyRecent,
    ShortOnly,
}

impl From<ModeArg> for MemoryMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Divemem => MemoryMode::Divemem,
            ModeArg::GreedyRecent => MemoryMode::GreedyRecent,
            ModeArg::ShortOnly => MemoryMode::ShortOnly,
        }
    }
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum PromptArg {
    Clicks,
    Box,
    Mask,
}

impl From<PromptArg> for PromptKind {
    fn from(p: PromptArg) -> Self {
        match p {
            PromptArg::Clicks => PromptKind::Clicks,
            PromptArg::Box => PromptKind::Box,
            PromptArg::Mask => PromptKind::Mask,
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig> {
    path.map_or_else(|| Ok(ExperimentConfig::default()), ExperimentConfig::load)
}

fn read_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io { path: path.into(), source: e })?;
    serde_path_to_error::deserialize(toml::Deserializer::new(&text)).map_err(|e| HarnessError::Config {
        field: e.path().to_string(),
        message: e.inner().message().trim().to_string(),
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| HarnessError::Io { path: parent.into(), source: e })?;
    }
    std::fs::write(path, text).map_err(|e| HarnessError::Io { path: path.into(), source: e })
}

fn generate(a: GenerateArgs) -> Result<()> {
    let specs: Vec<(SceneSpec, PathBuf)> = match &a.spec {
        Some(p) => vec![(read_toml(p)?, a.out.clone())],
        None => {
            let mut specs = Vec::new();
            if a.include_static {
                specs.push(static_scene(a.seed, memtrack_harness::experiment::STATIC_FRAMES));
            }
            specs.extend(reappear_suite(a.seed, a.scenes));
            specs.into_iter().map(|s| {
                let dir = a.out.join(&s.name);
                (s, dir)
            }).collect()
        }
    };
    for (spec, dir) in &specs {
        let data = generate_scene(spec)?;
        write_scene(dir, spec, &data)?;
        println!("{}: {} frames, {} objects -> {}", spec.name, data.frames.len(), data.masklets.len(), dir.display());
    }
    Ok(())
}

fn track(a: TrackArgs) -> Result<()> {
    let mut cfg = load_config(a.config.as_deref())?;
    if let Some(p) = a.prompt {
        cfg.experiment.prompt = p.into();
    }
    cfg.validate()?;
    let frames = read_frames(&a.scene)?;
    let gts = read_masklets(&a.scene)?;
    let prompts = build_prompts(&cfg, &frames[0], &gts)?;
    let temporal = match &cfg.experiment.temporal_checkpoint {
        Some(p) => load_temporal(p)?,
        None => Vec::new(),
    };
    let mode = MemoryMode::from(a.mode);
    let out = track_video(&cfg, &frames, &prompts, mode, &temporal)?;
    let name = a.scene.file_name().map_or("video".into(), |n| n.to_string_lossy().into_owned());
    write_predictions(&a.out, &name, &frames, out.masklets)?;
    for (id, text) in &out.traces {
        write_file(&a.out.join("traces").join(format!("obj{id}.txt")), text)?;
    }
    println!(
        "tracked {} objects over {} frames in mode {} ({:.1} fps)",
        prompts.len(),
        out.frames,
        mode.name(),
        out.frames as f64 / out.seconds.max(1e-9)
    );
    Ok(())
}

fn eval(a: EvalArgs) -> Result<()> {
    let cfg = load_config(a.config.as_deref())?;
    let gt_manifest = read_manifest(&a.gt.join(MANIFEST_FILE))?;
    let video = gt_manifest
        .videos
        .first()
        .ok_or_else(|| HarnessError::Validation("ground truth lists no video".into()))?;
    let extent = VideoExtent { frames: video.frame_count, width: video.width, height: video.height };
    let result = jf_evaluate(&read_masklets(&a.pred)?, &read_masklets(&a.gt)?, extent, &cfg.metrics)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&result).expect("result serializes"));
    } else {
        for s in &result.per_masklet {
            println!("object {:>3}  J {:6.2}  F {:6.2}", s.instance_id, s.j, s.f);
        }
        println!("J {:.2}  F {:.2}  J&F {:.2}", result.j_mean, result.f_mean, result.jf_mean);
    }
    Ok(())
}

fn experiment(a: ExperimentArgs) -> Result<()> {
    let cfg = ExperimentConfig::load(&a.config)?;
    let out = run_experiment(&cfg)?;
    write_outputs(&a.out, &cfg, &out)?;
    print!("{}", out.report.table());
    for m in &out.report.modes {
        println!(
            "{:<14} re-acquired {}/{}  trace problems {}",
            m.mode.name(),
            m.reacquisition.reacquired,
            m.reacquisition.events,
            m.trace_problems
        );
    }
    Ok(())
}

fn validate(a: ValidateArgs) -> Result<()> {
    if a.dataset.is_none() && a.config.is_none() && a.scene.is_none() && a.trace.is_none() {
        return Err(HarnessError::Validation("nothing to validate; pass --dataset, --config, --scene or --trace".into()));
    }
    let cfg = load_config(a.config.as_deref())?;
    if let Some(p) = &a.config {
        println!("{}: ok", p.display());
    }
    let mut problems = Vec::new();
    if let Some(dir) = &a.dataset {
        let manifest = read_manifest(&dir.join(MANIFEST_FILE))?;
        problems.extend(validate_dataset_dir(dir, &manifest).iter().map(|v| format!("{}: {v}", dir.display())));
    }
    if let Some(p) = &a.scene {
        let spec: SceneSpec = read_toml(p)?;
        spec.validate()?;
        println!("{}: ok", p.display());
    }
    if let Some(p) = &a.trace {
        let text = std::fs::read_to_string(p).map_err(|e| HarnessError::Io { path: p.clone(), source: e })?;
        problems.extend(validate_trace(&text, &cfg.memory).iter().map(|t| format!("{}: {t}", p.display())));
    }
    for p in &problems {
        println!("{p}");
    }
    if problems.is_empty() {
        println!("valid");
        Ok(())
    } else {
        Err(HarnessError::Validation(format!("{} problem(s) found", problems.len())))
    }
}

fn stats(a: StatsArgs) -> Result<()> {
    let manifest = read_manifest(&a.dataset.join(MANIFEST_FILE))?;
    let table: CategoryTable = match &a.categories {
        Some(p) => read_toml(p)?,
        None => CategoryTable::default(),
    };
    let s = dataset_stats(&manifest, &table, a.decimals);
    if a.json {
        println!("{}", serde_json::to_string_pretty(&s).expect("stats serialize"));
    } else {
        print!("{}", s.to_table(&manifest.name));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Track(a) => track(a),
        Command::Eval(a) => eval(a),
        Command::Experiment(a) => experiment(a),
        Command::Validate(a) => validate(a),
        Command::Stats(a) => stats(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
