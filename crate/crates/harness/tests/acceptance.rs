//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::{BTreeMap, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use memtrack::io::{
    dataset_stats, rle_decode, rle_encode, validate_manifest, CategoryTable, DatasetManifest, MaskletRecord,
    VideoRecord,
};
use memtrack::losses::{
    focal_arl_loss, gaussian_soften, total_loss, tsl_contrastive_loss, GaussianKernel, LossParts, LossWeights,
    Temperature, TemperatureMode,
};
use memtrack::memory::{select_diverse, validate_trace, Event, MemoryBank, MemoryConfig, MemoryEntry};
use memtrack::metrics::{jf_evaluate, region_j, simulate_clicks, EvalSettings, VideoExtent};
use memtrack::semantic::{tsl_backward, tsl_loss, CategoryRegistry, MemoryFeature, SemanticHead};
use memtrack::{BinaryMask, Embedding, Masklet, Polarity, Prompt, SoftMask};
use memtrack_harness::experiment::{run_experiment, ExperimentOutput};
use memtrack_harness::{ExperimentConfig, MemoryMode, PatchEmbedder, PropagatorParams, TrackerSession};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_vec(r: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| r.gen_range(-1.0..1.0)).collect()
}

fn entry(frame: usize, v: Vec<f64>, conf: f64, present: bool) -> MemoryEntry<f64> {
    let mask = SoftMask::filled(3, 3, if present { 0.9 } else { 0.1 }).unwrap();
    MemoryEntry::new(frame, Embedding::new(v).unwrap(), mask, conf).unwrap()
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// Exhaustive argmin of cosine similarity, ties to the smallest frame index.
fn argmin_oracle(buffer: &[(usize, Vec<f64>)], latest: &[f64]) -> usize {
    let mut best: Option<(f64, usize)> = None;
    for (f, v) in buffer {
        let s = cosine(v, latest);
        best = match best {
            Some((bs, bf)) if bs < s || (bs == s && bf < *f) => Some((bs, bf)),
            _ => Some((s, *f)),
        };
    }
    best.unwrap().1
}

fn c1_selection_oracle() -> Outcome {
    let mut r = rng(1);
    let mut ties = 0;
    for trial in 0..1000 {
        let size = r.gen_range(1..=8);
        let mut raw: Vec<(usize, Vec<f64>)> = (0..size).map(|i| (100 + i, random_vec(&mut r, 64))).collect();
        if trial % 3 == 0 && size > 1 {
            raw[size - 1].1 = raw[0].1.clone();
            ties += 1;
        }
        raw.shuffle(&mut r);
        let latest = random_vec(&mut r, 64);
        let buffer: Vec<_> = raw.iter().map(|(f, v)| entry(*f, v.clone(), 0.99, true)).collect();
        let got = select_diverse(&buffer, &entry(0, latest.clone(), 0.99, true)).map_err(|e| e.to_string())?;
        let want = argmin_oracle(&raw, &latest);
        ensure(got.frame_index == want, || format!("trial {trial}: selected {} expected {want}", got.frame_index))?;
    }
    Ok(format!("1000 buffers, {ties} with planted ties"))
}

/// Frame-index model of the bank.
#[derive(Default)]
struct Model {
    initial: Option<(usize, Vec<f64>)>,
    long: VecDeque<(usize, Vec<f64>)>,
    short: VecDeque<usize>,
    buffer: Vec<(usize, Vec<f64>)>,
}

impl Model {
    fn step(&mut self, cfg: &MemoryConfig, frame: usize, v: &[f64], conf: f64, present: bool) -> Option<usize> {
        if self.initial.is_none() {
            self.initial = Some((frame, v.to_vec()));
            return None;
        }
        self.short.push_back(frame);
        if self.short.len() > cfg.n_short {
            self.short.pop_front();
        }
        if !(conf > cfg.gamma_iou && present) {
            self.buffer.clear();
            return None;
        }
        self.buffer.push((frame, v.to_vec()));
        if self.buffer.len() < cfg.delta {
            return None;
        }
        let latest = self.long.back().or(self.initial.as_ref()).unwrap().1.clone();
        let pick = argmin_oracle(&self.buffer, &latest);
        let chosen = self.buffer.iter().find(|(f, _)| *f == pick).unwrap().clone();
        self.long.push_back(chosen);
        if self.long.len() > cfg.n_long {
            self.long.pop_front();
        }
        self.buffer.clear();
        Some(pick)
    }
}

fn c2_memory_invariants() -> Outcome {
    let cfg = MemoryConfig::default();
    ensure(
        (cfg.n_long, cfg.n_short, cfg.delta, cfg.gamma_iou) == (4, 6, 5, 0.95),
        || format!("default memory settings {cfg:?}"),
    )?;
    let mut r = rng(2);
    let mut admissions = 0usize;
    for seq in 0..10_000 {
        let mut bank = MemoryBank::<f64>::new(cfg.clone()).map_err(|e| e.to_string())?;
        let mut model = Model::default();
        let mut frame = 0;
        let mut trace = String::new();
        let p_stable = r.gen_range(0.5..1.0);
        for _ in 0..r.gen_range(1..50) {
            frame += r.gen_range(1..3);
            let v = random_vec(&mut r, 8);
            let conf = if r.gen_bool(p_stable) { r.gen_range(0.9501..1.0) } else { r.gen_range(0.0..=0.95) };
            let present = r.gen_bool(0.95);
            let t = bank.observe(entry(frame, v.clone(), conf, present)).map_err(|e| e.to_string())?;
            trace.push_str(&format!("{t}\n"));
            let expected = model.step(&cfg, frame, &v, conf, present);
            let at = || format!("sequence {seq}, frame {frame}");
            match (&t.event, expected) {
                (Event::Admitted { selected, .. }, Some(pick)) => {
                    ensure(*selected == pick, || format!("{}: selected {selected}, expected {pick}", at()))?;
                    ensure(bank.buffer().is_empty(), || format!("{}: buffer not cleared", at()))?;
                    admissions += 1;
                }
                (Event::Admitted { .. }, None) | (_, Some(_)) => return Err(format!("{}: admission mismatch", at())),
                _ => {}
            }
            ensure(bank.initial().map(|e| e.frame_index) == model.initial.as_ref().map(|i| i.0), || {
                format!("{}: initial entry changed", at())
            })?;
            ensure(bank.long_term().len() <= cfg.n_long && bank.short_term().len() <= cfg.n_short, || {
                format!("{}: capacity exceeded", at())
            })?;
            let long: Vec<usize> = bank.long_term().iter().map(|e| e.frame_index).collect();
            ensure(long == model.long.iter().map(|e| e.0).collect::<Vec<_>>(), || format!("{}: long-term {long:?}", at()))?;
            let short: Vec<usize> = bank.short_term().iter().map(|e| e.frame_index).collect();
            ensure(short == Vec::from(model.short.clone()), || format!("{}: short-term {short:?}", at()))?;
            ensure(bank.buffer().len() == model.buffer.len(), || format!("{}: buffer size", at()))?;
            ensure(
                bank.long_term().iter().all(|e| e.confidence > cfg.gamma_iou && e.mask.has_foreground()),
                || format!("{}: unstable entry admitted", at()),
            )?;
        }
        let problems = validate_trace(&trace, &cfg);
        ensure(problems.is_empty(), || format!("sequence {seq}: trace {}", problems[0]))?;
    }
    Ok(format!("10000 sequences, {admissions} admissions"))
}

fn shift(m: &BinaryMask, dx: usize, dy: usize) -> BinaryMask {
    BinaryMask::from_fn(m.width(), m.height(), |x, y| x >= dx && y >= dy && m.get(x - dx, y - dy))
}

fn c3_kernel() -> Outcome {
    let k = GaussianKernel::<f64>::new(1.0, 5).map_err(|e| e.to_string())?;
    let sum: f64 = k.weights().iter().sum();
    ensure((sum - 1.0).abs() <= 1e-12, || format!("kernel sum {sum}"))?;
    for m in [BinaryMask::empty(11, 9), BinaryMask::full(11, 9)] {
        let target = if m.is_empty() { 0.0 } else { 1.0 };
        let s = gaussian_soften(&m, &k);
        ensure(s.values().iter().all(|v| (v - target).abs() <= 1e-9), || "constant mask changed".into())?;
    }
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (dx, dy) = (r.gen_range(0..4), r.gen_range(0..4));
        let m = BinaryMask::from_fn(28, 28, |x, y| (6..18).contains(&x) && (6..18).contains(&y) && r.gen_bool(0.5));
        let a = gaussian_soften(&shift(&m, dx, dy), &k);
        let b = gaussian_soften(&m, &k);
        for y in 0..28 {
            for x in 0..28 {
                let moved = if x >= dx && y >= dy { b.get(x - dx, y - dy) } else { 0.0 };
                worst = worst.max((a.get(x, y) - moved).abs());
            }
        }
    }
    ensure(worst <= 1e-9, || format!("translation error {worst:e}"))?;
    Ok(format!("sum-1 = {:.1e}, translation error {worst:.1e}", sum - 1.0))
}

fn bce(p: &[f64], y: &[f64]) -> f64 {
    let eps = 1e-7;
    p.iter()
        .zip(y)
        .map(|(&p, &y)| {
            let p = p.clamp(eps, 1.0 - eps);
            -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
        })
        .sum::<f64>()
        / p.len() as f64
}

fn c4_focal() -> Outcome {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (w, h) = (r.gen_range(1..10), r.gen_range(1..10));
        let p: Vec<f64> = (0..w * h).map(|_| r.gen_range(0.0..=1.0)).collect();
        let y: Vec<f64> = (0..w * h).map(|_| r.gen_range(0.0..=1.0)).collect();
        let got = focal_arl_loss(&SoftMask::new(w, h, p.clone()).unwrap(), &SoftMask::new(w, h, y.clone()).unwrap(), 0.0)
            .map_err(|e| e.to_string())?;
        worst = worst.max((got - bce(&p, &y)).abs());
    }
    ensure(worst <= 1e-9, || format!("BCE mismatch {worst:e}"))?;
    let half = SoftMask::filled(1, 1, 0.5).unwrap();
    let hand = focal_arl_loss(&half, &half, 2.0).map_err(|e| e.to_string())?;
    ensure((hand - 0.25 * 2f64.ln()).abs() <= 1e-9, || format!("hand case {hand}"))?;
    Ok(format!("max BCE gap {worst:.1e}, hand case {hand:.12}"))
}

fn unit_with_cos(c: f64) -> Embedding<f64> {
    Embedding::new(vec![c, (1.0 - c * c).sqrt(), 0.0]).unwrap()
}

fn c5_contrastive() -> Outcome {
    let mut r = rng(5);
    let mut worst = 0.0f64;
    for mode in [TemperatureMode::InverseScale, TemperatureMode::Literal] {
        let tau = Temperature { value: 100.0, mode }.tau();
        let x = Embedding::new(random_vec(&mut r, 5)).unwrap();
        let single = tsl_contrastive_loss(&x, 0, &[Embedding::new(random_vec(&mut r, 5)).unwrap()], tau)
            .map_err(|e| e.to_string())?;
        ensure(single == 0.0, || format!("{mode:?}: K=1 gives {single}"))?;
        for k in 2..=8 {
            let x = Embedding::new(vec![0.0, 0.0, 1.0]).unwrap();
            let texts: Vec<_> = (0..k).map(|i| unit_with_cos(-0.6 + 0.15 * i as f64)).collect();
            let l = tsl_contrastive_loss(&x, k / 2, &texts, tau).map_err(|e| e.to_string())?;
            ensure((l - (k as f64).ln()).abs() <= 1e-12, || format!("{mode:?}: K={k} uniform gives {l}"))?;
        }
        for _ in 0..200 {
            let k = r.gen_range(2..6);
            let x = Embedding::new(random_vec(&mut r, 6)).unwrap();
            let texts: Vec<_> = (0..k).map(|_| Embedding::new(random_vec(&mut r, 6)).unwrap()).collect();
            let pos = r.gen_range(0..k);
            let base = tsl_contrastive_loss(&x, pos, &texts, tau).map_err(|e| e.to_string())?;
            let scaled = tsl_contrastive_loss(&x.scaled(r.gen_range(0.01..100.0)), pos, &texts, tau)
                .map_err(|e| e.to_string())?;
            worst = worst.max((base - scaled).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("rescaling changed the loss by {worst:e}"))?;
    Ok(format!("both temperature modes, rescaling gap {worst:.1e}"))
}

fn c6_total() -> Outcome {
    let w = LossWeights::default();
    ensure((w.lambda_arl, w.lambda_tsl) == (20.0, 0.1), || format!("default weights {w:?}"))?;
    let mut r = rng(6);
    for _ in 0..1000 {
        let parts: LossParts<f64> = LossParts {
            arl: r.gen_range(0.0..3.0),
            iou: r.gen_range(0.0..3.0),
            dice: r.gen_range(0.0..1.0),
            occ: r.gen_range(0.0..3.0),
            tsl: r.gen_range(0.0..5.0),
        };
        let want = 20.0 * parts.arl + parts.iou + parts.dice + parts.occ + 0.1 * parts.tsl;
        let labelled = total_loss(parts, w, true).map_err(|e| e.to_string())?;
        ensure((labelled.total - want).abs() <= 1e-9, || format!("total {} vs {want}", labelled.total))?;
        let unlabelled = total_loss(parts, w, false).map_err(|e| e.to_string())?;
        ensure(unlabelled.l_tsl == 0.0, || "semantic term kept without a label".into())?;
        ensure((unlabelled.total - (want - 0.1 * parts.tsl)).abs() <= 1e-9, || "omission total".into())?;
    }
    Ok("1000 reconstructions, unlabelled samples drop the semantic term".into())
}

fn gaussian(r: &mut ChaCha8Rng, n: usize, std: f64) -> Vec<f64> {
    (0..n).map(|_| std * r.sample::<f64, _>(StandardNormal)).collect()
}

fn c7_gradients() -> Outcome {
    const H: f64 = 1e-5;
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let mut r = rng(7_000 + seed);
        let dim = r.gen_range(2..=16);
        let slots = 4;
        let mut head = SemanticHead::<f64>::zeros(dim, slots);
        head.load_flat(&gaussian(&mut r, head.param_count(), 0.5)).map_err(|e| e.to_string())?;
        let memory: Vec<_> = (0..r.gen_range(1..=4))
            .map(|i| {
                let f = Embedding::new(gaussian(&mut r, dim, 1.0)).unwrap();
                if i % 2 == 0 {
                    MemoryFeature::long_term(f, i % slots)
                } else {
                    MemoryFeature::short_term(f)
                }
            })
            .collect();
        let frame: Vec<_> = (0..r.gen_range(1..=4)).map(|_| Embedding::new(gaussian(&mut r, dim, 1.0)).unwrap()).collect();
        let k = r.gen_range(2..=5);
        let names: Vec<String> = (0..k).map(|i| format!("c{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let registry = CategoryRegistry::random(&refs, dim, &mut r).map_err(|e| e.to_string())?;
        let positive = r.gen_range(0..k);
        let tau = 0.5;
        let analytic = tsl_backward(&head, &memory, &frame, &registry, positive, tau)
            .map_err(|e| e.to_string())?
            .grads
            .flatten();
        let base = head.flatten();
        let mut p = base.clone();
        let mut probe = head.clone();
        let mut loss_at = |params: &[f64]| {
            probe.load_flat(params).unwrap();
            tsl_loss(&probe, &memory, &frame, &registry, positive, tau).unwrap()
        };
        for i in 0..base.len() {
            p[i] = base[i] + H;
            let plus = loss_at(&p);
            p[i] = base[i] - H;
            let minus = loss_at(&p);
            p[i] = base[i];
            let numeric = (plus - minus) / (2.0 * H);
            let err = (analytic[i] - numeric).abs() / analytic[i].abs().max(numeric.abs()).max(1e-6);
            worst = worst.max(err);
        }
    }
    ensure(worst < 1e-4, || format!("max relative error {worst:e}"))?;
    Ok(format!("100 instances, max relative error {worst:.2e}"))
}

fn blobs(r: &mut ChaCha8Rng, w: usize, h: usize) -> BinaryMask {
    let mut m = BinaryMask::empty(w, h);
    for _ in 0..2 {
        let (x0, y0, bw, bh) = (r.gen_range(0..w - 3), r.gen_range(0..h - 3), r.gen_range(2..8), r.gen_range(2..8));
        for y in y0..(y0 + bh).min(h) {
            for x in x0..(x0 + bw).min(w) {
                m.set(x, y, true);
            }
        }
    }
    m
}

fn c8_metrics() -> Outcome {
    let mut r = rng(8);
    let extent = VideoExtent { frames: 6, width: 24, height: 20 };
    let settings = EvalSettings::default();
    let (mut gts, mut preds) = (Vec::new(), Vec::new());
    for id in 1..=4 {
        let (mut g, mut p) = (Masklet::new(id, None), Masklet::new(id, None));
        for t in 0..6 {
            g.insert(t, blobs(&mut r, 24, 20)).unwrap();
            p.insert(t, blobs(&mut r, 24, 20)).unwrap();
        }
        gts.push(g);
        preds.push(p);
    }
    let same = jf_evaluate(&gts, &gts, extent, &settings).map_err(|e| e.to_string())?;
    ensure(same.jf_mean == 100.0, || format!("identical masks give {}", same.jf_mean))?;
    let res = jf_evaluate(&preds, &gts, extent, &settings).map_err(|e| e.to_string())?;
    ensure(res.jf_mean == (res.j_mean + res.f_mean) / 2.0, || "jf_mean is not the mean of J and F".into())?;
    let left = BinaryMask::from_fn(10, 10, |x, _| x < 5);
    let right = BinaryMask::from_fn(10, 10, |x, _| x >= 5);
    ensure(region_j(&left, &right).map_err(|e| e.to_string())? == 0.0, || "disjoint J".into())?;

    for _ in 0..200 {
        let gt = blobs(&mut r, 24, 20);
        let pred = blobs(&mut r, 24, 20).to_soft::<f64>();
        let a = simulate_clicks(&gt, Some(&pred), 3).map_err(|e| e.to_string())?;
        ensure(a == simulate_clicks(&gt, Some(&pred), 3).unwrap(), || "click simulation is not deterministic".into())?;
        let first = a.clicks[0];
        ensure(first.polarity == Polarity::Positive && gt.get(first.x, first.y), || "first click off target".into())?;
    }

    // A session accepts prompts on its first frame only.
    let out = experiment_output()?;
    let scene = memtrack_harness::scene::static_scene(1, 3);
    let data = memtrack_harness::scene::generate_scene(&scene).map_err(|e| e.to_string())?;
    let mut session = TrackerSession::new(
        Box::new(PatchEmbedder::default()),
        MemoryConfig::default(),
        PropagatorParams::default(),
        MemoryMode::Divemem,
    )
    .map_err(|e| e.to_string())?;
    let mask = data.masklets[0].get(0).unwrap().clone();
    session.prompt(&data.frames[0], &[(1, Prompt::Mask(mask.clone()))]).map_err(|e| e.to_string())?;
    session.step(&data.frames[1]).map_err(|e| e.to_string())?;
    ensure(session.prompt(&data.frames[2], &[(1, Prompt::Mask(mask))]).is_err(), || "late prompt accepted".into())?;
    let conformant = out.report.modes.iter().all(|m| m.prompts_on_first_frame_only);
    ensure(conformant, || "experiment prompted after frame 0".into())?;
    Ok("J&F bounds, click determinism, prompts on frame 0 only".into())
}

fn spread(total: usize, count: usize) -> Vec<usize> {
    (0..count).map(|i| total / count + usize::from(i < total % count)).collect()
}

fn c9_masklet_io() -> Outcome {
    let mut r = rng(9);
    for i in 0..1000 {
        let (w, h) = (r.gen_range(1..40), r.gen_range(1..40));
        let density = r.gen_range(0.0..1.0);
        let m = BinaryMask::from_fn(w, h, |_, _| r.gen_bool(density));
        let back = rle_decode(&rle_encode(&m)).map_err(|e| e.to_string())?;
        ensure(back == m, || format!("mask {i} changed in round trip"))?;
    }
    let videos: Vec<VideoRecord> = (0..45)
        .map(|i| {
            let frame_count = if i < 18 { 97 } else { 96 };
            VideoRecord { id: format!("v{i:02}"), frame_count, width: 854, height: 480, duration_s: frame_count as f64 / 24.0 }
        })
        .collect();
    let sizes: Vec<(usize, &str)> = spread(21136, 232)
        .into_iter()
        .map(|n| (n, "Grasper"))
        .chain(spread(6242, 68).into_iter().map(|n| (n, "liver")))
        .collect();
    let masklets = sizes
        .iter()
        .enumerate()
        .map(|(k, (n, cat))| MaskletRecord {
            video_id: videos[k % 45].id.clone(),
            instance_id: (k / 45) as u32 + 1,
            category: Some(cat.to_string()),
            frames: (0..*n).collect(),
            rle_path: None,
        })
        .collect();
    let d = DatasetManifest { name: "cholecseg8k-like".into(), videos, masklets };
    ensure(validate_manifest(&d).is_empty(), || "manifest invalid".into())?;
    let table = CategoryTable {
        rename: BTreeMap::from([("Grasper".into(), "grasper".into())]),
        groups: BTreeMap::from([("grasper".into(), "instrument".into()), ("liver".into(), "tissue".into())]),
    };
    let s = dataset_stats(&d, &table, 0);
    let got = (s.videos, s.frames, s.masklets, s.avg_duration_s);
    ensure(got == (45, 4338, 300, 4.0), || format!("stats {got:?}"))?;
    Ok("1000 RLE round trips; 45 videos, 4338 frames, 300 masklets, 4 s".into())
}

static EXPERIMENT: OnceLock<Result<(ExperimentOutput, Duration), String>> = OnceLock::new();

fn full_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.experiment.scenes = 20;
    cfg.experiment.modes = vec![MemoryMode::Divemem, MemoryMode::GreedyRecent];
    cfg
}

fn experiment_output() -> Result<&'static ExperimentOutput, String> {
    EXPERIMENT
        .get_or_init(|| {
            let start = Instant::now();
            let out = run_experiment(&full_config()).map_err(|e| e.to_string())?;
            Ok((out, start.elapsed()))
        })
        .as_ref()
        .map(|(o, _)| o)
        .map_err(Clone::clone)
}

fn c10_directional() -> Outcome {
    let out = experiment_output()?;
    let elapsed = EXPERIMENT.get().unwrap().as_ref().unwrap().1;
    let div = out.report.mode(MemoryMode::Divemem).unwrap();
    let greedy = out.report.mode(MemoryMode::GreedyRecent).unwrap();
    let detail = format!(
        "divemem J&F {:.2} re-acq {:.2}; greedy_recent J&F {:.2} re-acq {:.2}; {:.1}s",
        div.jf,
        div.reacquisition.rate,
        greedy.jf,
        greedy.reacquisition.rate,
        elapsed.as_secs_f64()
    );
    ensure(div.reacquisition.rate >= greedy.reacquisition.rate, || format!("re-acquisition: {detail}"))?;
    ensure(div.jf - greedy.jf >= 2.0, || format!("J&F gap: {detail}"))?;
    ensure(elapsed < Duration::from_secs(300), || format!("too slow: {detail}"))?;
    Ok(detail)
}

fn c11_determinism() -> Outcome {
    let first = experiment_output()?;
    let second = run_experiment(&full_config()).map_err(|e| e.to_string())?;
    let a = serde_json::to_string_pretty(&first.report).unwrap();
    let b = serde_json::to_string_pretty(&second.report).unwrap();
    ensure(a == b, || "reports differ between runs".into())?;
    Ok(format!("{} byte report identical across runs", a.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<u64>); 11] = [
        ("diverse selection matches exhaustive argmin", c1_selection_oracle, Some(1)),
        ("memory invariants over randomized sequences", c2_memory_invariants, Some(10)),
        ("softening kernel", c3_kernel, None),
        ("focal loss reduces to BCE", c4_focal, None),
        ("contrastive loss properties", c5_contrastive, None),
        ("total loss assembly", c6_total, None),
        ("semantic head gradient check", c7_gradients, Some(30)),
        ("metric sanity and prompt protocol", c8_metrics, None),
        ("masklet I/O", c9_masklet_io, None),
        ("diverse memory beats greedy recent memory", c10_directional, Some(300)),
        ("experiment determinism", c11_determinism, None),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        let outcome = match (outcome, limit) {
            (Ok(d), Some(l)) if secs >= *l as f64 => Err(format!("{d}; took {secs:.2}s, limit {l}s")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
