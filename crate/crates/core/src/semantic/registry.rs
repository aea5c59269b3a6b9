//! Category text embeddings, loaded from a file or drawn at random.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Ordered category names with one unit-norm embedding each.
#[derive(Clone, Debug, PartialEq)]
pub struct CategoryRegistry<T> {
    names: Vec<String>,
    embeddings: Vec<Embedding<T>>,
}

impl<T: Scalar> CategoryRegistry<T> {
    /// Normalizes each vector to unit length.
    pub fn new(entries: Vec<(String, Embedding<T>)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::contract("category registry needs at least one category"));
        }
        let dim = entries[0].1.dim();
        let mut names = Vec::with_capacity(entries.len());
        let mut embeddings = Vec::with_capacity(entries.len());
        for (name, e) in entries {
            if name.is_empty() || name.contains(['\t', '\n']) {
                return Err(Error::contract(format!("invalid category name {name:?}")));
            }
            if names.contains(&name) {
                return Err(Error::contract(format!("duplicate category {name:?}")));
            }
            if e.dim() != dim {
                return Err(Error::contract(format!(
                    "category {name:?} has dim {}, expected {dim}",
                    e.dim()
                )));
            }
            embeddings.push(e.normalized()?);
            names.push(name);
        }
        Ok(Self { names, embeddings })
    }

    /// Independent random unit vectors, one per name.
    pub fn random<R: Rng>(names: &[&str], dim: usize, rng: &mut R) -> Result<Self> {
        let entries = names
            .iter()
            .map(|n| {
                let v: Vec<T> = (0..dim).map(|_| T::of(rng.sample::<f64, _>(StandardNormal))).collect();
                Embedding::new(v).map(|e| (n.to_string(), e))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.embeddings[0].dim()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn embeddings(&self) -> &[Embedding<T>] {
        &self.embeddings
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn embedding(&self, name: &str) -> Option<&Embedding<T>> {
        self.index_of(name).map(|i| &self.embeddings[i])
    }

    /// One line per category: `<name>\t<v1> <v2> ...`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (n, e) in self.names.iter().zip(&self.embeddings) {
            out.push_str(n);
            out.push('\t');
            for (i, v) in e.values().iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{}", v.as_f64());
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, rest) = line
                .split_once('\t')
                .ok_or_else(|| Error::Corrupt(format!("registry line {}: missing tab after the name", i + 1)))?;
            let values = rest
                .split_whitespace()
                .map(|v| {
                    v.parse::<f64>()
                        .map(T::of)
                        .map_err(|_| Error::Corrupt(format!("registry line {}: bad number '{v}'", i + 1)))
                })
                .collect::<Result<Vec<T>>>()?;
            entries.push((name.to_string(), Embedding::new(values)?));
        }
        Self::new(entries)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}
