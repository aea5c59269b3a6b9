//! Head checkpoints: a one-line header followed by the flattened parameters,
//! one value per line.
//!
//! ```text
//! memtrack-head dim=<dim> k=<categories> slots=<slots> seed=<seed>
//! <value>
//! ...
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::head::SemanticHead;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAGIC: &str = "memtrack-head";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckpointHeader {
    pub dim: usize,
    pub categories: usize,
    pub slots: usize,
    pub seed: u64,
}

pub fn format_checkpoint<T: Scalar>(head: &SemanticHead<T>, categories: usize, seed: u64) -> String {
    let mut out = format!(
        "{MAGIC} dim={} k={categories} slots={} seed={seed}\n",
        head.dim,
        head.slots()
    );
    for v in head.flatten() {
        let _ = writeln!(out, "{}", v.as_f64());
    }
    out
}

pub fn parse_checkpoint<T: Scalar>(text: &str) -> Result<(CheckpointHeader, SemanticHead<T>)> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    let mut parts = header.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(Error::Corrupt(format!("missing '{MAGIC}' header")));
    }
    let mut field = |key: &str| -> Result<u64> {
        let kv = parts
            .next()
            .ok_or_else(|| Error::Corrupt(format!("header lacks '{key}'")))?;
        kv.strip_prefix(key)
            .and_then(|v| v.strip_prefix('='))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Corrupt(format!("bad header field '{kv}', expected {key}=<n>")))
    };
    let h = CheckpointHeader {
        dim: field("dim")? as usize,
        categories: field("k")? as usize,
        slots: field("slots")? as usize,
        seed: field("seed")?,
    };
    if h.dim == 0 {
        return Err(Error::Corrupt("checkpoint dim is zero".into()));
    }
    let values = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim()
                .parse::<f64>()
                .map(T::of)
                .map_err(|_| Error::Corrupt(format!("bad checkpoint value '{l}'")))
        })
        .collect::<Result<Vec<T>>>()?;
    let mut head = SemanticHead::zeros(h.dim, h.slots);
    head.load_flat(&values)
        .map_err(|e| Error::Corrupt(e.to_string()))?;
    Ok((h, head))
}

pub fn save_checkpoint<T: Scalar>(path: &Path, head: &SemanticHead<T>, categories: usize, seed: u64) -> Result<()> {
    std::fs::write(path, format_checkpoint(head, categories, seed)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint<T: Scalar>(path: &Path) -> Result<(CheckpointHeader, SemanticHead<T>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_checkpoint(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let head = SemanticHead::<f64>::seeded(4, 3, 77);
        let text = format_checkpoint(&head, 5, 77);
        assert!(text.starts_with("memtrack-head dim=4 k=5 slots=3 seed=77\n"));
        let (h, back) = parse_checkpoint::<f64>(&text).unwrap();
        assert_eq!(h, CheckpointHeader { dim: 4, categories: 5, slots: 3, seed: 77 });
        assert_eq!(back, head);
    }

    #[test]
    fn truncated_checkpoint_is_corrupt() {
        let head = SemanticHead::<f64>::seeded(2, 1, 1);
        let text = format_checkpoint(&head, 2, 1);
        let cut: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(matches!(parse_checkpoint::<f64>(&cut), Err(Error::Corrupt(_))));
        assert!(parse_checkpoint::<f64>("nonsense").is_err());
    }
}
