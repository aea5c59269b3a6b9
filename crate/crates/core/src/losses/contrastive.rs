//! Contrastive loss between a semantic token and category text embeddings.

use serde::{Deserialize, Serialize};

use crate::embedding::{cosine_similarity, Embedding};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How the configured temperature value enters the logits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemperatureMode {
    /// Logits are `sim * value` (a logit scale, e.g. 100).
    InverseScale,
    /// Logits are `sim / value`.
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Temperature {
    pub value: f64,
    pub mode: TemperatureMode,
}

impl Default for Temperature {
    fn default() -> Self {
        Self {
            value: 100.0,
            mode: TemperatureMode::InverseScale,
        }
    }
}

impl Temperature {
    /// The `tau` that logits are divided by.
    pub fn tau(&self) -> f64 {
        match self.mode {
            TemperatureMode::InverseScale => 1.0 / self.value,
            TemperatureMode::Literal => self.value,
        }
    }
}

/// Intermediate values of one loss evaluation, reused by backward passes.
#[derive(Clone, Debug, PartialEq)]
pub struct ContrastiveForward<T> {
    pub loss: T,
    pub similarities: Vec<T>,
    /// Softmax over the scaled similarities.
    pub probabilities: Vec<T>,
}

/// `-ln softmax(sim(x, t_k)/tau)[positive_index]` with cosine similarity,
/// stabilized by subtracting the largest logit.
pub fn tsl_contrastive_loss<T: Scalar>(
    x: &Embedding<T>,
    positive_index: usize,
    texts: &[Embedding<T>],
    tau: T,
) -> Result<T> {
    contrastive_forward(x, positive_index, texts, tau).map(|f| f.loss)
}

pub fn contrastive_forward<T: Scalar>(
    x: &Embedding<T>,
    positive_index: usize,
    texts: &[Embedding<T>],
    tau: T,
) -> Result<ContrastiveForward<T>> {
    if texts.is_empty() {
        return Err(Error::contract("contrastive loss needs at least one text embedding"));
    }
    if positive_index >= texts.len() {
        return Err(Error::contract(format!(
            "positive index {positive_index} out of range for {} texts",
            texts.len()
        )));
    }
    if !(tau > T::zero()) || !tau.is_finite() {
        return Err(Error::contract(format!("temperature must be positive, got {tau}")));
    }
    let similarities = texts
        .iter()
        .map(|t| cosine_similarity(x, t))
        .collect::<Result<Vec<T>>>()?;
    let logits: Vec<T> = similarities.iter().map(|s| *s / tau).collect();
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = logits.iter().map(|z| (*z - max).exp()).collect();
    let mut denom = T::zero();
    for e in &exps {
        denom += *e;
    }
    let loss = denom.ln() - (logits[positive_index] - max);
    let probabilities = exps.iter().map(|e| *e / denom).collect();
    Ok(ContrastiveForward {
        loss,
        similarities,
        probabilities,
    })
}
