use super::backward::tsl_backward;
use super::head::{MemoryFeature, SemanticHead};
use super::registry::CategoryRegistry;
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One training example: memory features, current-frame features and the
/// tracked object's category.
#[derive(Clone, Debug)]
pub struct TrainingSample<T> {
    pub memory: Vec<MemoryFeature<T>>,
    pub frame: Vec<Embedding<T>>,
    pub category: String,
}

/// Full-batch gradient descent on the mean contrastive loss.
///
/// Returns the trained head and the mean loss measured before each update.
pub fn train_head<T: Scalar>(
    mut head: SemanticHead<T>,
    dataset: &[TrainingSample<T>],
    registry: &CategoryRegistry<T>,
    steps: usize,
    lr: T,
    tau: T,
) -> Result<(SemanticHead<T>, Vec<T>)> {
    if !(lr >= T::zero()) {
        return Err(Error::contract(format!("learning rate must be non-negative, got {lr}")));
    }
    if dataset.is_empty() {
        return Ok((head, Vec::new()));
    }
    let positives = dataset
        .iter()
        .map(|s| {
            registry
                .index_of(&s.category)
                .ok_or_else(|| Error::contract(format!("category {:?} not in the registry", s.category)))
        })
        .collect::<Result<Vec<_>>>()?;

    let n = T::of(dataset.len() as f64);
    let mut curve = Vec::with_capacity(steps);
    for step in 0..steps {
        let mut loss = T::zero();
        let mut grad = vec![T::zero(); head.param_count()];
        for (sample, &pos) in dataset.iter().zip(&positives) {
            let g = tsl_backward(&head, &sample.memory, &sample.frame, registry, pos, tau).map_err(|e| match e {
                // Non-finite activations mean the parameters diverged.
                Error::Numeric(reason) => Error::Training { step, reason },
                other => other,
            })?;
            loss += g.loss;
            for (acc, v) in grad.iter_mut().zip(g.grads.flatten()) {
                *acc += v;
            }
        }
        let loss = loss / n;
        if !loss.is_finite() {
            return Err(Error::Training {
                step,
                reason: format!("loss is {loss}"),
            });
        }
        curve.push(loss);
        let params: Vec<T> = head
            .flatten()
            .into_iter()
            .zip(&grad)
            .map(|(p, g)| p - lr * *g / n)
            .collect();
        head.load_flat(&params)?;
        if !head.all_finite() {
            return Err(Error::Training {
                step,
                reason: "parameters became non-finite".into(),
            });
        }
    }
    Ok((head, curve))
}
