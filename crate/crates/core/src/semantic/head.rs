use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

/// Standard deviation of the seeded Gaussian initialization.
pub const INIT_STD: f64 = 0.02;

/// Query/key/value/output projections of one single-head attention block,
/// each a row-major `dim x dim` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct AttentionParams<T> {
    pub wq: Vec<T>,
    pub wk: Vec<T>,
    pub wv: Vec<T>,
    pub wo: Vec<T>,
}

impl<T: Scalar> AttentionParams<T> {
    pub fn zeros(dim: usize) -> Self {
        let z = vec![T::zero(); dim * dim];
        Self {
            wq: z.clone(),
            wk: z.clone(),
            wv: z.clone(),
            wo: z,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut eye = vec![T::zero(); dim * dim];
        for i in 0..dim {
            eye[i * dim + i] = T::one();
        }
        Self {
            wq: eye.clone(),
            wk: eye.clone(),
            wv: eye.clone(),
            wo: eye,
        }
    }

    fn matrices(&self) -> [&Vec<T>; 4] {
        [&self.wq, &self.wk, &self.wv, &self.wo]
    }

    fn matrices_mut(&mut self) -> [&mut Vec<T>; 4] {
        [&mut self.wq, &mut self.wk, &mut self.wv, &mut self.wo]
    }
}

/// A memory feature, optionally tagged with the long-term slot whose temporal
/// embedding is added to it before attention.
#[derive(Clone, Debug, PartialEq)]
pub struct MemoryFeature<T> {
    pub feature: Embedding<T>,
    pub slot: Option<usize>,
}

impl<T> MemoryFeature<T> {
    pub fn short_term(feature: Embedding<T>) -> Self {
        Self { feature, slot: None }
    }

    pub fn long_term(feature: Embedding<T>, slot: usize) -> Self {
        Self {
            feature,
            slot: Some(slot),
        }
    }
}

/// Learnable CLS token that attends over memory features and then over the
/// current frame's features.
///
/// ```text
/// h   = x_c + Wo1 · Attn(Wq1 x_c, Wk1 m_i, Wv1 m_i)
/// x'c = h   + Wo2 · Attn(Wq2 h,   Wk2 f_j, Wv2 f_j)
/// ```
///
/// where `m_i` already includes its slot's temporal embedding and `Attn` is
/// single-head scaled dot-product attention with scale `1/√dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemanticHead<T> {
    pub dim: usize,
    pub cls_token: Vec<T>,
    pub memory_attn: AttentionParams<T>,
    pub frame_attn: AttentionParams<T>,
    pub temporal_embeddings: Vec<Vec<T>>,
}

impl<T: Scalar> SemanticHead<T> {
    /// All-zero parameters (also the shape of a gradient accumulator).
    pub fn zeros(dim: usize, slots: usize) -> Self {
        assert!(dim > 0, "head dimension must be positive");
        Self {
            dim,
            cls_token: vec![T::zero(); dim],
            memory_attn: AttentionParams::zeros(dim),
            frame_attn: AttentionParams::zeros(dim),
            temporal_embeddings: vec![vec![T::zero(); dim]; slots],
        }
    }

    /// CLS token and projections drawn from `N(0, std²)`, temporal embeddings zero.
    pub fn random<R: Rng>(dim: usize, slots: usize, std: f64, rng: &mut R) -> Self {
        let normal = Normal::new(0.0, std).expect("finite standard deviation");
        let mut head = Self::zeros(dim, slots);
        for v in head.cls_token.iter_mut() {
            *v = T::of(normal.sample(rng));
        }
        for attn in [&mut head.memory_attn, &mut head.frame_attn] {
            for m in attn.matrices_mut() {
                for v in m.iter_mut() {
                    *v = T::of(normal.sample(rng));
                }
            }
        }
        head
    }

    /// Default initialization from a seed.
    pub fn seeded(dim: usize, slots: usize, seed: u64) -> Self {
        Self::random(dim, slots, INIT_STD, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn slots(&self) -> usize {
        self.temporal_embeddings.len()
    }

    pub fn param_count(&self) -> usize {
        self.dim + 8 * self.dim * self.dim + self.slots() * self.dim
    }

    /// Parameters flattened in a fixed order: CLS token, memory-attention
    /// (q, k, v, o), frame-attention (q, k, v, o), temporal embeddings.
    pub fn flatten(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.param_count());
        out.extend(&self.cls_token);
        for attn in [&self.memory_attn, &self.frame_attn] {
            for m in attn.matrices() {
                out.extend(m.iter());
            }
        }
        for t in &self.temporal_embeddings {
            out.extend(t);
        }
        out
    }

    /// Inverse of [`flatten`](Self::flatten).
    pub fn load_flat(&mut self, params: &[T]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::contract(format!(
                "head expects {} parameters, got {}",
                self.param_count(),
                params.len()
            )));
        }
        let mut it = params.iter().copied();
        for v in self.cls_token.iter_mut() {
            *v = it.next().unwrap();
        }
        for attn in [&mut self.memory_attn, &mut self.frame_attn] {
            for m in attn.matrices_mut() {
                for v in m.iter_mut() {
                    *v = it.next().unwrap();
                }
            }
        }
        for t in self.temporal_embeddings.iter_mut() {
            for v in t.iter_mut() {
                *v = it.next().unwrap();
            }
        }
        Ok(())
    }

    pub fn all_finite(&self) -> bool {
        self.flatten().iter().all(|v| v.is_finite())
    }

    /// `x'_c` for the given memory and current-frame features.
    pub fn forward(&self, memory: &[MemoryFeature<T>], frame: &[Embedding<T>]) -> Result<Embedding<T>> {
        let cache = self.forward_cached(memory, frame)?;
        Embedding::new(cache.output)
    }

    pub(crate) fn check_inputs(&self, memory: &[MemoryFeature<T>], frame: &[Embedding<T>]) -> Result<()> {
        if memory.is_empty() || frame.is_empty() {
            return Err(Error::contract("semantic head needs memory and frame features"));
        }
        for m in memory {
            if m.feature.dim() != self.dim {
                return Err(Error::contract(format!(
                    "memory feature has dim {}, head has {}",
                    m.feature.dim(),
                    self.dim
                )));
            }
            if let Some(slot) = m.slot {
                if slot >= self.slots() {
                    return Err(Error::contract(format!(
                        "temporal slot {slot} out of range for {} slots",
                        self.slots()
                    )));
                }
            }
        }
        if let Some(f) = frame.iter().find(|f| f.dim() != self.dim) {
            return Err(Error::contract(format!(
                "frame feature has dim {}, head has {}",
                f.dim(),
                self.dim
            )));
        }
        Ok(())
    }

    pub(crate) fn memory_inputs(&self, memory: &[MemoryFeature<T>]) -> Vec<Vec<T>> {
        memory
            .iter()
            .map(|m| match m.slot {
                Some(s) => m
                    .feature
                    .values()
                    .iter()
                    .zip(&self.temporal_embeddings[s])
                    .map(|(a, b)| *a + *b)
                    .collect(),
                None => m.feature.values().to_vec(),
            })
            .collect()
    }

    pub(crate) fn forward_cached(&self, memory: &[MemoryFeature<T>], frame: &[Embedding<T>]) -> Result<ForwardCache<T>> {
        self.check_inputs(memory, frame)?;
        let mem_inputs = self.memory_inputs(memory);
        let frame_inputs: Vec<Vec<T>> = frame.iter().map(|f| f.values().to_vec()).collect();
        let stage1 = attend(&self.memory_attn, self.dim, &self.cls_token, &mem_inputs);
        let stage2 = attend(&self.frame_attn, self.dim, &stage1.output, &frame_inputs);
        let output = stage2.output.clone();
        Ok(ForwardCache {
            mem_inputs,
            frame_inputs,
            stage1,
            stage2,
            output,
        })
    }
}

/// Intermediate values of one attention stage.
#[derive(Clone, Debug)]
pub(crate) struct StageCache<T> {
    pub query_in: Vec<T>,
    pub q: Vec<T>,
    pub keys: Vec<Vec<T>>,
    pub values: Vec<Vec<T>>,
    pub weights: Vec<T>,
    pub attended: Vec<T>,
    /// `query_in + Wo · attended`.
    pub output: Vec<T>,
}

#[derive(Clone, Debug)]
pub(crate) struct ForwardCache<T> {
    pub mem_inputs: Vec<Vec<T>>,
    pub frame_inputs: Vec<Vec<T>>,
    pub stage1: StageCache<T>,
    pub stage2: StageCache<T>,
    pub output: Vec<T>,
}

pub(crate) fn matvec<T: Scalar>(w: &[T], dim: usize, x: &[T]) -> Vec<T> {
    (0..dim).map(|i| dot(&w[i * dim..(i + 1) * dim], x)).collect()
}

/// `Wᵀ g`.
pub(crate) fn matvec_t<T: Scalar>(w: &[T], dim: usize, g: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); dim];
    for (i, gi) in g.iter().enumerate() {
        for (j, o) in out.iter_mut().enumerate() {
            *o += w[i * dim + j] * *gi;
        }
    }
    out
}

pub(crate) fn softmax<T: Scalar>(scores: &[T]) -> Vec<T> {
    let max = scores.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = scores.iter().map(|s| (*s - max).exp()).collect();
    let mut total = T::zero();
    for e in &exps {
        total += *e;
    }
    exps.into_iter().map(|e| e / total).collect()
}

fn attend<T: Scalar>(p: &AttentionParams<T>, dim: usize, query_in: &[T], inputs: &[Vec<T>]) -> StageCache<T> {
    let scale = T::one() / T::of(dim as f64).sqrt();
    let q = matvec(&p.wq, dim, query_in);
    let keys: Vec<Vec<T>> = inputs.iter().map(|x| matvec(&p.wk, dim, x)).collect();
    let values: Vec<Vec<T>> = inputs.iter().map(|x| matvec(&p.wv, dim, x)).collect();
    let scores: Vec<T> = keys.iter().map(|k| dot(&q, k) * scale).collect();
    let weights = softmax(&scores);
    let mut attended = vec![T::zero(); dim];
    for (a, v) in weights.iter().zip(&values) {
        for (o, vi) in attended.iter_mut().zip(v) {
            *o += *a * *vi;
        }
    }
    let projected = matvec(&p.wo, dim, &attended);
    let output = query_in.iter().zip(&projected).map(|(x, y)| *x + *y).collect();
    StageCache {
        query_in: query_in.to_vec(),
        q,
        keys,
        values,
        weights,
        attended,
        output,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: &[f64]) -> Embedding<f64> {
        Embedding::new(v.to_vec()).unwrap()
    }

    #[test]
    fn zero_projections_pass_the_token_through() {
        let mut head = SemanticHead::<f64>::zeros(3, 2);
        head.cls_token = vec![0.5, -0.25, 1.0];
        let v = e(&[0.3, 0.1, -0.7]);
        let out = head
            .forward(&[MemoryFeature::short_term(v.clone())], &[v])
            .unwrap();
        assert_eq!(out.values(), &[0.5, -0.25, 1.0]);
    }

    #[test]
    fn identity_projections_single_inputs() {
        let mut head = SemanticHead::<f64>::zeros(3, 1);
        head.memory_attn = AttentionParams::identity(3);
        head.frame_attn = AttentionParams::identity(3);
        head.cls_token = vec![0.1, 0.2, 0.3];
        let v = [1.0, -2.0, 0.5];
        let w = [0.25, 0.0, 4.0];

        // Hand-rolled oracle: with one key the softmax weight is 1, so each
        // stage adds its (identity-projected) value to the residual stream.
        let h: Vec<f64> = head.cls_token.iter().zip(&v).map(|(a, b)| a + b).collect();
        let expected: Vec<f64> = h.iter().zip(&w).map(|(a, b)| a + b).collect();

        let out = head
            .forward(&[MemoryFeature::short_term(e(&v))], &[e(&w)])
            .unwrap();
        for (o, x) in out.values().iter().zip(&expected) {
            assert!((o - x).abs() < 1e-15);
        }
    }

    #[test]
    fn permutation_invariant_over_keys() {
        let head = SemanticHead::<f64>::random(4, 2, 0.5, &mut ChaCha8Rng::seed_from_u64(3));
        let mem = vec![
            MemoryFeature::long_term(e(&[0.1, 0.2, 0.3, 0.4]), 1),
            MemoryFeature::short_term(e(&[-0.5, 0.2, 0.0, 1.0])),
            MemoryFeature::short_term(e(&[0.9, -0.1, 0.3, 0.2])),
        ];
        let frame = vec![e(&[1.0, 0.0, 0.0, 0.5]), e(&[0.0, 1.0, -1.0, 0.0]), e(&[0.3, 0.3, 0.3, 0.3])];
        let a = head.forward(&mem, &frame).unwrap();
        let mem_rev: Vec<_> = mem.iter().rev().cloned().collect();
        let frame_rot = vec![frame[2].clone(), frame[0].clone(), frame[1].clone()];
        let b = head.forward(&mem_rev, &frame_rot).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let head = SemanticHead::<f64>::zeros(2, 1);
        let v = e(&[1.0, 0.0]);
        assert!(head.forward(&[], &[v.clone()]).is_err());
        assert!(head.forward(&[MemoryFeature::short_term(v.clone())], &[]).is_err());
        assert!(head.forward(&[MemoryFeature::long_term(v.clone(), 1)], &[v.clone()]).is_err());
        assert!(head.forward(&[MemoryFeature::short_term(e(&[1.0]))], &[v]).is_err());
    }

    #[test]
    fn flatten_round_trip() {
        let head = SemanticHead::<f64>::seeded(3, 2, 9);
        let flat = head.flatten();
        assert_eq!(flat.len(), head.param_count());
        let mut other = SemanticHead::zeros(3, 2);
        other.load_flat(&flat).unwrap();
        assert_eq!(other, head);
    }
}
