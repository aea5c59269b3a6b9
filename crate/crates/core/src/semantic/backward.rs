//! Analytic gradients of the contrastive loss through the semantic head.

use super::head::{matvec_t, ForwardCache, MemoryFeature, SemanticHead, StageCache, AttentionParams};
use super::registry::CategoryRegistry;
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::losses::contrastive_forward;
use crate::scalar::{dot, Scalar};

/// Loss value and per-parameter gradients, the latter stored in a head-shaped
/// container.
#[derive(Clone, Debug)]
pub struct Gradients<T> {
    pub loss: T,
    pub grads: SemanticHead<T>,
}

/// Gradient of `-ln softmax(cos(x, t_k)/tau)[pos]` with respect to `x`.
pub(crate) fn contrastive_input_grad<T: Scalar>(
    x: &[T],
    texts: &[Embedding<T>],
    sims: &[T],
    probs: &[T],
    positive_index: usize,
    tau: T,
) -> Result<Vec<T>> {
    let norm = dot(x, x).sqrt();
    if norm == T::zero() {
        return Err(Error::degenerate("semantic output is the zero vector"));
    }
    let mut g = vec![T::zero(); x.len()];
    for (k, t) in texts.iter().enumerate() {
        let delta = if k == positive_index { T::one() } else { T::zero() };
        let coeff = (probs[k] - delta) / tau;
        let t_norm = t.norm();
        // d cos(x, t) / dx = t/(|x||t|) - cos · x/|x|²
        for (i, gi) in g.iter_mut().enumerate() {
            let d = t.values()[i] / (norm * t_norm) - sims[k] * x[i] / (norm * norm);
            *gi += coeff * d;
        }
    }
    Ok(g)
}

fn outer_add<T: Scalar>(acc: &mut [T], dim: usize, g: &[T], x: &[T]) {
    for i in 0..dim {
        for j in 0..dim {
            acc[i * dim + j] += g[i] * x[j];
        }
    }
}

/// Back-propagates `g_out` (gradient w.r.t. the stage output) through one
/// attention stage. Returns the gradients w.r.t. the stage's query input and
/// each key/value input, accumulating parameter gradients into `pg`.
fn stage_backward<T: Scalar>(
    p: &AttentionParams<T>,
    pg: &mut AttentionParams<T>,
    dim: usize,
    cache: &StageCache<T>,
    inputs: &[Vec<T>],
    g_out: &[T],
) -> (Vec<T>, Vec<Vec<T>>) {
    let scale = T::one() / T::of(dim as f64).sqrt();
    // output = query_in + Wo · attended
    let mut g_query_in = g_out.to_vec();
    outer_add(&mut pg.wo, dim, g_out, &cache.attended);
    let g_attended = matvec_t(&p.wo, dim, g_out);

    // attended = Σ a_i v_i
    let g_weights: Vec<T> = cache.values.iter().map(|v| dot(&g_attended, v)).collect();
    let mut weighted = T::zero();
    for (a, ga) in cache.weights.iter().zip(&g_weights) {
        weighted += *a * *ga;
    }
    let g_scores: Vec<T> = cache
        .weights
        .iter()
        .zip(&g_weights)
        .map(|(a, ga)| *a * (*ga - weighted))
        .collect();

    // scores_i = q · k_i · scale
    let mut g_q = vec![T::zero(); dim];
    let mut g_inputs = Vec::with_capacity(inputs.len());
    for (i, x) in inputs.iter().enumerate() {
        let gs = g_scores[i] * scale;
        for (gq, k) in g_q.iter_mut().zip(&cache.keys[i]) {
            *gq += gs * *k;
        }
        let g_key: Vec<T> = cache.q.iter().map(|q| gs * *q).collect();
        let g_value: Vec<T> = g_attended.iter().map(|g| cache.weights[i] * *g).collect();
        outer_add(&mut pg.wk, dim, &g_key, x);
        outer_add(&mut pg.wv, dim, &g_value, x);
        let gk = matvec_t(&p.wk, dim, &g_key);
        let gv = matvec_t(&p.wv, dim, &g_value);
        g_inputs.push(gk.iter().zip(&gv).map(|(a, b)| *a + *b).collect());
    }

    // q = Wq · query_in
    outer_add(&mut pg.wq, dim, &g_q, &cache.query_in);
    for (gi, v) in g_query_in.iter_mut().zip(matvec_t(&p.wq, dim, &g_q)) {
        *gi += v;
    }
    (g_query_in, g_inputs)
}

fn backward_from_output<T: Scalar>(
    head: &SemanticHead<T>,
    cache: &ForwardCache<T>,
    memory: &[MemoryFeature<T>],
    g_output: &[T],
) -> SemanticHead<T> {
    let dim = head.dim;
    let mut grads = SemanticHead::zeros(dim, head.slots());
    let (g_h, _) = stage_backward(
        &head.frame_attn,
        &mut grads.frame_attn,
        dim,
        &cache.stage2,
        &cache.frame_inputs,
        g_output,
    );
    let (g_cls, g_mem) = stage_backward(
        &head.memory_attn,
        &mut grads.memory_attn,
        dim,
        &cache.stage1,
        &cache.mem_inputs,
        &g_h,
    );
    grads.cls_token = g_cls;
    for (m, g) in memory.iter().zip(&g_mem) {
        if let Some(slot) = m.slot {
            for (acc, v) in grads.temporal_embeddings[slot].iter_mut().zip(g) {
                *acc += *v;
            }
        }
    }
    grads
}

/// Contrastive loss of the head output against the registry and its
/// gradients with respect to every head parameter.
pub fn tsl_backward<T: Scalar>(
    head: &SemanticHead<T>,
    memory: &[MemoryFeature<T>],
    frame: &[Embedding<T>],
    registry: &CategoryRegistry<T>,
    positive_index: usize,
    tau: T,
) -> Result<Gradients<T>> {
    let cache = head.forward_cached(memory, frame)?;
    let x = Embedding::new(cache.output.clone())?;
    let texts = registry.embeddings();
    let fwd = contrastive_forward(&x, positive_index, texts, tau)?;
    let g_out = contrastive_input_grad(
        &cache.output,
        texts,
        &fwd.similarities,
        &fwd.probabilities,
        positive_index,
        tau,
    )?;
    Ok(Gradients {
        loss: fwd.loss,
        grads: backward_from_output(head, &cache, memory, &g_out),
    })
}

/// Contrastive loss of the head output, without gradients.
pub fn tsl_loss<T: Scalar>(
    head: &SemanticHead<T>,
    memory: &[MemoryFeature<T>],
    frame: &[Embedding<T>],
    registry: &CategoryRegistry<T>,
    positive_index: usize,
    tau: T,
) -> Result<T> {
    let x = head.forward(memory, frame)?;
    contrastive_forward(&x, positive_index, registry.embeddings(), tau).map(|f| f.loss)
}
