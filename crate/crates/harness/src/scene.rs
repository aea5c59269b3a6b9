//! Seeded synthetic videos: shapes with keyframed motion, color and scale,
//! disappear intervals and camera zoom.

use memtrack::{BinaryMask, Frame, Masklet, Rgb};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Rectangle,
    Ellipse,
}

/// A value pinned at a frame; values between keys are interpolated linearly
/// and held constant outside the keyed range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Key<T> {
    pub frame: usize,
    pub value: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub id: u32,
    #[serde(default)]
    pub category: Option<String>,
    pub shape: Shape,
    /// Width and height in pixels at scale 1.
    pub size: [f64; 2],
    pub color: Vec<Key<Rgb>>,
    /// Center position in pixels.
    pub path: Vec<Key<[f64; 2]>>,
    #[serde(default)]
    pub scale: Vec<Key<f64>>,
}

/// The object is absent on frames `start..=end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disappearance {
    pub object: u32,
    pub start: usize,
    pub end: usize,
}

/// Camera zoom about the image center, ramping from 1 at `start` to `factor`
/// at `end` and held afterwards.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Zoom {
    pub start: usize,
    pub end: usize,
    pub factor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Background {
    pub top: Rgb,
    pub bottom: Rgb,
    /// Per-channel uniform noise amplitude.
    pub noise: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub name: String,
    #[serde(default)]
    pub group: String,
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub seed: u64,
    pub background: Background,
    pub objects: Vec<ObjectSpec>,
    #[serde(default)]
    pub disappearances: Vec<Disappearance>,
    #[serde(default)]
    pub zooms: Vec<Zoom>,
}

#[derive(Clone, Debug)]
pub struct SceneData {
    pub frames: Vec<Frame>,
    pub masklets: Vec<Masklet>,
}

trait Lerp: Copy {
    fn lerp(a: Self, b: Self, t: f64) -> Self;
}

impl Lerp for f64 {
    fn lerp(a: Self, b: Self, t: f64) -> Self {
        a + (b - a) * t
    }
}

impl Lerp for [f64; 2] {
    fn lerp(a: Self, b: Self, t: f64) -> Self {
        [f64::lerp(a[0], b[0], t), f64::lerp(a[1], b[1], t)]
    }
}

impl Lerp for Rgb {
    fn lerp(a: Self, b: Self, t: f64) -> Self {
        let c = |i: usize| f64::lerp(f64::from(a[i]), f64::from(b[i]), t).round().clamp(0.0, 255.0) as u8;
        [c(0), c(1), c(2)]
    }
}

fn sample<T: Lerp>(keys: &[Key<T>], frame: usize, default: T) -> T {
    let Some(first) = keys.first() else {
        return default;
    };
    if frame <= first.frame {
        return first.value;
    }
    for w in keys.windows(2) {
        let (a, b) = (w[0], w[1]);
        if frame <= b.frame {
            if b.frame == a.frame {
                return b.value;
            }
            let t = (frame - a.frame) as f64 / (b.frame - a.frame) as f64;
            return T::lerp(a.value, b.value, t);
        }
    }
    keys[keys.len() - 1].value
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        if self.width < 8 || self.height < 8 {
            return Err(HarnessError::config("width", "scenes must be at least 8x8 pixels"));
        }
        if self.frames == 0 {
            return Err(HarnessError::config("frames", "a scene needs at least one frame"));
        }
        if self.seed > i64::MAX as u64 {
            return Err(HarnessError::config("seed", "must fit in 63 bits"));
        }
        for (i, o) in self.objects.iter().enumerate() {
            let at = |f: &str| format!("objects[{i}].{f}");
            if self.objects[..i].iter().any(|p| p.id == o.id) {
                return Err(HarnessError::config(at("id"), format!("duplicate object id {}", o.id)));
            }
            if !(o.size[0] > 0.0 && o.size[1] > 0.0) || !o.size.iter().all(|v| v.is_finite()) {
                return Err(HarnessError::config(at("size"), "sizes must be positive"));
            }
            if o.color.is_empty() {
                return Err(HarnessError::config(at("color"), "at least one color key is required"));
            }
            if o.path.is_empty() {
                return Err(HarnessError::config(at("path"), "at least one position key is required"));
            }
            let ascending = |frames: Vec<usize>| frames.windows(2).all(|w| w[0] <= w[1]);
            if !ascending(o.color.iter().map(|k| k.frame).collect())
                || !ascending(o.path.iter().map(|k| k.frame).collect())
                || !ascending(o.scale.iter().map(|k| k.frame).collect())
            {
                return Err(HarnessError::config(at("keys"), "keyframes must be in frame order"));
            }
            if o.scale.iter().any(|k| !(k.value > 0.0)) {
                return Err(HarnessError::config(at("scale"), "scale factors must be positive"));
            }
        }
        for (i, d) in self.disappearances.iter().enumerate() {
            if !self.objects.iter().any(|o| o.id == d.object) {
                return Err(HarnessError::config(
                    format!("disappearances[{i}].object"),
                    format!("no object with id {}", d.object),
                ));
            }
            if d.start > d.end || d.end >= self.frames {
                return Err(HarnessError::config(
                    format!("disappearances[{i}]"),
                    format!("interval {}..={} outside 0..{}", d.start, d.end, self.frames),
                ));
            }
        }
        for (i, z) in self.zooms.iter().enumerate() {
            if z.start > z.end || z.end >= self.frames {
                return Err(HarnessError::config(format!("zooms[{i}]"), "zoom interval outside the video"));
            }
            if !(z.factor > 0.0) || !z.factor.is_finite() {
                return Err(HarnessError::config(format!("zooms[{i}].factor"), "zoom factor must be positive"));
            }
        }
        Ok(())
    }

    fn zoom_at(&self, frame: usize) -> f64 {
        let mut z = 1.0;
        for zoom in &self.zooms {
            let f = if frame < zoom.start {
                1.0
            } else if frame >= zoom.end {
                zoom.factor
            } else {
                let t = (frame - zoom.start) as f64 / (zoom.end - zoom.start) as f64;
                1.0 + (zoom.factor - 1.0) * t
            };
            z *= f;
        }
        z
    }

    pub fn is_hidden(&self, object: u32, frame: usize) -> bool {
        self.disappearances
            .iter()
            .any(|d| d.object == object && (d.start..=d.end).contains(&frame))
    }

    /// Frames at which some object becomes visible again after an absence.
    pub fn reappearances(&self) -> Vec<(u32, usize)> {
        let mut out: Vec<(u32, usize)> = self
            .disappearances
            .iter()
            .filter(|d| d.end + 1 < self.frames)
            .map(|d| (d.object, d.end + 1))
            .filter(|&(o, f)| !self.is_hidden(o, f))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn inside(shape: Shape, px: f64, py: f64, cx: f64, cy: f64, hw: f64, hh: f64) -> bool {
    let (dx, dy) = ((px - cx) / hw, (py - cy) / hh);
    match shape {
        Shape::Rectangle => dx.abs() <= 1.0 && dy.abs() <= 1.0,
        Shape::Ellipse => dx * dx + dy * dy <= 1.0,
    }
}

/// Renders every frame and the per-object ground truth. Later objects occlude
/// earlier ones; a masklet has no entry on frames where its object is hidden
/// or entirely out of view.
pub fn generate_scene(spec: &SceneSpec) -> Result<SceneData> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let (ccx, ccy) = (w as f64 / 2.0, h as f64 / 2.0);
    let mut masklets: Vec<Masklet> = spec
        .objects
        .iter()
        .map(|o| Masklet::new(o.id, o.category.clone()))
        .collect();
    let mut frames = Vec::with_capacity(spec.frames);
    for t in 0..spec.frames {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ (t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let zoom = spec.zoom_at(t);
        // Object index owning each pixel, last drawn wins.
        let mut owner: Vec<Option<usize>> = vec![None; w * h];
        for (oi, o) in spec.objects.iter().enumerate() {
            if spec.is_hidden(o.id, t) {
                continue;
            }
            let [x, y] = sample(&o.path, t, [ccx, ccy]);
            let s = sample(&o.scale, t, 1.0) * zoom;
            let (cx, cy) = (ccx + zoom * (x - ccx), ccy + zoom * (y - ccy));
            let (hw, hh) = (o.size[0] * s / 2.0, o.size[1] * s / 2.0);
            for py in 0..h {
                for px in 0..w {
                    if inside(o.shape, px as f64 + 0.5, py as f64 + 0.5, cx, cy, hw, hh) {
                        owner[py * w + px] = Some(oi);
                    }
                }
            }
        }
        let colors: Vec<Rgb> = spec
            .objects
            .iter()
            .map(|o| sample(&o.color, t, [255, 255, 255]))
            .collect();
        let noise = i16::from(spec.background.noise);
        let mut pixels = Vec::with_capacity(w * h);
        for py in 0..h {
            let row = Rgb::lerp(spec.background.top, spec.background.bottom, py as f64 / (h - 1) as f64);
            for px in 0..w {
                let base = owner[py * w + px].map_or(row, |oi| colors[oi]);
                let mut out = [0u8; 3];
                for c in 0..3 {
                    let n = if noise > 0 { rng.gen_range(-noise..=noise) } else { 0 };
                    out[c] = (i16::from(base[c]) + n).clamp(0, 255) as u8;
                }
                pixels.push(out);
            }
        }
        frames.push(Frame::new(t, w, h, pixels)?);
        for (oi, m) in masklets.iter_mut().enumerate() {
            let mask = BinaryMask::from_fn(w, h, |x, y| owner[y * w + x] == Some(oi));
            if !mask.is_empty() {
                m.insert(t, mask)?;
            }
        }
    }
    Ok(SceneData { frames, masklets })
}

const PALETTE: [Rgb; 8] = [
    [220, 50, 50],
    [50, 200, 60],
    [50, 80, 220],
    [230, 210, 40],
    [210, 50, 200],
    [40, 200, 210],
    [240, 140, 30],
    [235, 235, 235],
];

fn gray_background(rng: &mut ChaCha8Rng) -> Background {
    let g: i16 = rng.gen_range(40..90);
    let mut top = [0u8; 3];
    let mut bottom = [0u8; 3];
    for c in 0..3 {
        let v = g + rng.gen_range(-10..=10);
        top[c] = v as u8;
        bottom[c] = (v + rng.gen_range(-25..=25)).clamp(0, 255) as u8;
    }
    Background { top, bottom, noise: 6 }
}

/// A single static square: the simplest possible tracking target.
pub fn static_scene(seed: u64, frames: usize) -> SceneSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SceneSpec {
        name: "static".into(),
        group: "static".into(),
        width: 64,
        height: 64,
        frames,
        seed: seed & i64::MAX as u64,
        background: gray_background(&mut rng),
        objects: vec![ObjectSpec {
            id: 1,
            category: Some("square".into()),
            shape: Shape::Rectangle,
            size: [20.0, 20.0],
            color: vec![Key { frame: 0, value: PALETTE[rng.gen_range(0..PALETTE.len())] }],
            path: vec![Key { frame: 0, value: [32.0, 32.0] }],
            scale: vec![],
        }],
        disappearances: vec![],
        zooms: vec![],
    }
}

fn far_from(p: [f64; 2], q: [f64; 2], d: f64) -> bool {
    (p[0] - q[0]).hypot(p[1] - q[1]) >= d
}

/// One scene of the long-horizon suite. The target changes color while it is
/// visible, leaves for a while and comes back elsewhere with its latest
/// appearance; a static-colored distractor sits in a corner. Odd scenes
/// also zoom in.
pub fn reappear_scene(suite_seed: u64, index: usize) -> SceneSpec {
    // Kept within 63 bits so the spec round-trips through TOML integers.
    let seed = (suite_seed ^ (index as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03)) & i64::MAX as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frames = 80;
    let mut picks: Vec<usize> = (0..PALETTE.len()).collect();
    let mut take = |rng: &mut ChaCha8Rng| picks.remove(rng.gen_range(0..picks.len()));
    let (a, b, c) = (PALETTE[take(&mut rng)], PALETTE[take(&mut rng)], PALETTE[take(&mut rng)]);

    let corner = [
        if rng.gen_bool(0.5) { 12.0 } else { 52.0 },
        if rng.gen_bool(0.5) { 12.0 } else { 52.0 },
    ];
    let spot = |rng: &mut ChaCha8Rng| loop {
        let p = [rng.gen_range(18.0..46.0), rng.gen_range(18.0..46.0)];
        if far_from(p, corner, 24.0) {
            return p;
        }
    };
    let p0 = spot(&mut rng);
    let gone = rng.gen_range(40..=46);
    let back = gone + rng.gen_range(8..=14);
    let p1 = spot(&mut rng);
    let p2 = loop {
        let p = spot(&mut rng);
        if far_from(p, p1, 12.0) {
            break p;
        }
    };
    let p3 = spot(&mut rng);
    let drift = |p: [f64; 2], q: [f64; 2]| [p[0] + (q[0] - p[0]) * 0.3, p[1] + (q[1] - p[1]) * 0.3];
    let shape = if rng.gen_bool(0.5) { Shape::Rectangle } else { Shape::Ellipse };
    let target = ObjectSpec {
        id: 1,
        category: Some("target".into()),
        shape,
        size: [rng.gen_range(14.0..20.0), rng.gen_range(14.0..20.0)],
        color: vec![Key { frame: 5, value: a }, Key { frame: 35, value: b }],
        path: vec![
            Key { frame: 0, value: p0 },
            Key { frame: gone - 1, value: drift(p0, p1) },
            Key { frame: back, value: p2 },
            Key { frame: frames - 1, value: drift(p2, p3) },
        ],
        scale: vec![],
    };
    let distractor = ObjectSpec {
        id: 2,
        category: Some("distractor".into()),
        shape: if shape == Shape::Rectangle { Shape::Ellipse } else { Shape::Rectangle },
        size: [rng.gen_range(10.0..14.0), rng.gen_range(10.0..14.0)],
        color: vec![Key { frame: 0, value: c }],
        path: vec![Key { frame: 0, value: corner }],
        scale: vec![],
    };
    let zooms = if index % 2 == 1 {
        let start = rng.gen_range(20..30);
        vec![Zoom { start, end: start + 10, factor: rng.gen_range(1.15..1.3) }]
    } else {
        vec![]
    };
    SceneSpec {
        name: format!("scene{index:02}"),
        group: if zooms.is_empty() { "reappear".into() } else { "reappear+zoom".into() },
        width: 64,
        height: 64,
        frames,
        seed,
        background: gray_background(&mut rng),
        // The target is drawn last so it is never hidden behind the distractor.
        objects: vec![distractor, target],
        disappearances: vec![Disappearance { object: 1, start: gone, end: back - 1 }],
        zooms,
    }
}

pub fn reappear_suite(seed: u64, count: usize) -> Vec<SceneSpec> {
    (0..count).map(|i| reappear_scene(seed, i)).collect()
}
