//! Embedding providers and the unit-norm vector contract.
//!
//! Every vector leaving [`embed_batch`] has unit L2 norm regardless of what
//! the provider returned, so cosine similarity downstream is a plain dot
//! product.

mod cache;
mod hash;
mod remote;

pub use cache::EmbeddingCache;
pub use hash::{hash_embed, token_bucket, tokenize, HashEmbedder, DEFAULT_HASH_DIM, HASH_SEED};
pub use remote::{EmbedRequest, EmbedResponse, ErrorResponse, RemoteEmbedder, RetryPolicy, MAX_BATCH};

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Allowed deviation of a stored vector's norm from 1.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-6;
/// Provider output further than this from unit norm is logged before it is
/// normalized.
pub const DRIFT_WARN_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("text at index {0} is empty")]
    EmptyText(usize),
    #[error("text has no alphanumeric tokens")]
    NoTokens,
    #[error("cannot normalize a zero vector")]
    ZeroVector,
    #[error("vector norm {0} is not 1")]
    NotUnitNorm(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("provider returned {got} vectors for {expected} texts")]
    CountMismatch { expected: usize, got: usize },
    #[error("embedding service unavailable after {attempts} attempts: {last_error}")]
    RemoteUnavailable { attempts: u32, last_error: String },
    #[error("embedding service rejected request ({status}): {message}")]
    RemoteRejected { status: u16, message: String },
    #[error("invalid provider: {0}")]
    InvalidDescriptor(String),
    #[error("embedding cache: {0}")]
    Cache(String),
}

/// A unit-L2-norm embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    /// Wraps values already known to be unit norm, e.g. when reloading a
    /// persisted index. Fails if the norm is off by more than
    /// [`UNIT_NORM_TOLERANCE`].
    pub fn from_unit(values: Vec<f64>) -> Result<Self, EmbedError> {
        let n = l2_norm(&values);
        if n == 0.0 {
            return Err(EmbedError::ZeroVector);
        }
        if (n - 1.0).abs() > UNIT_NORM_TOLERANCE {
            return Err(EmbedError::NotUnitNorm(n));
        }
        Ok(EmbeddingVector(values))
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.0)
    }

    /// Dot product. Equals cosine similarity for unit
    /// vectors.
    pub fn dot(&self, other: &EmbeddingVector) -> f64 {
        dot(&self.0, &other.0)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Scales `v` to unit length.
pub fn normalize(v: &[f64]) -> Result<EmbeddingVector, EmbedError> {
    let n = l2_norm(v);
    if n == 0.0 || !n.is_finite() {
        return Err(EmbedError::ZeroVector);
    }
    Ok(EmbeddingVector(
        v.iter().map(|x| x / n).collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ProviderKind {
    LocalHash,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProviderDescriptor {
    pub name: String,
    pub dim: usize,
    pub kind: ProviderKind,
}

/// Output dimensions of the published pre-trained models this harness is
/// normally run against.
pub const KNOWN_MODELS: &[(&str, usize)] = &[
    ("sentence-transformers/all-mpnet-base-v2", 768),
    ("sentence-transformers/all-MiniLM-L6-v2", 384),
    ("BAAI/bge-large-en", 1024),
    ("BAAI/llm-embedder", 1024),
    ("BAAI/bge-m3", 1024),
];

pub fn known_model_dim(name: &str) -> Option<usize> {
    KNOWN_MODELS
        .iter()
        .find(|(n, _)| *n == name || n.rsplit('/').next() == Some(name))
        .map(|&(_, d)| d)
}

impl ProviderDescriptor {
    pub fn local_hash(dim: usize) -> Result<Self, EmbedError> {
        if dim < hash::MIN_HASH_DIM {
            return Err(EmbedError::InvalidDescriptor(format!(
                "hash dimension must be >= {}, got {dim}",
                hash::MIN_HASH_DIM
            )));
        }
        Ok(ProviderDescriptor {
            name: format!("hash-{dim}"),
            dim,
            kind: ProviderKind::LocalHash,
        })
    }

    /// A remote model. When `dim` is omitted it is looked up in
    /// [`KNOWN_MODELS`]; a known model with a different dim is rejected.
    pub fn remote(name: &str, dim: Option<usize>) -> Result<Self, EmbedError> {
        let known = known_model_dim(name);
        let dim = match (dim, known) {
            (Some(d), Some(k)) if d != k => {
                return Err(EmbedError::InvalidDescriptor(format!(
                    "model {name} has dimension {k}, not {d}"
                )))
            }
            (Some(d), _) | (None, Some(d)) => d,
            (None, None) => {
                return Err(EmbedError::InvalidDescriptor(format!(
                    "unknown model {name}: dimension required"
                )))
            }
        };
        if dim == 0 {
            return Err(EmbedError::InvalidDescriptor("dimension must be > 0".into()));
        }
        Ok(ProviderDescriptor {
            name: name.to_string(),
            dim,
            kind: ProviderKind::Remote,
        })
    }
}

impl fmt::Display for ProviderDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (dim {})", self.name, self.dim)
    }
}

pub trait EmbeddingProvider: Send + Sync {
    fn descriptor(&self) -> &ProviderDescriptor;

    /// One raw vector per input text, in order. Vectors need not be
    /// normalized.
    fn embed_raw(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, EmbedError>;
}

/// Embeds `texts` in order. Identical texts get identical vectors; cached
/// vectors are reused and new ones are added to the cache.
pub fn embed_batch<S: AsRef<str>>(
    provider: &dyn EmbeddingProvider,
    texts: &[S],
    cache: Option<&EmbeddingCache>,
) -> Result<Vec<EmbeddingVector>, EmbedError> {
    if let Some(i) = texts.iter().position(|t| t.as_ref().trim().is_empty()) {
        return Err(EmbedError::EmptyText(i));
    }
    let desc = provider.descriptor();

    let mut resolved: HashMap<&str, EmbeddingVector> = HashMap::new();
    let mut missing: Vec<&str> = Vec::new();
    let mut pending: HashSet<&str> = HashSet::new();
    for t in texts {
        let t = t.as_ref();
        if resolved.contains_key(t) || pending.contains(t) {
            continue;
        }
        match cache.and_then(|c| c.get(&desc.name, t)) {
            Some(v) => {
                resolved.insert(t, v);
            }
            None => {
                pending.insert(t);
                missing.push(t);
            }
        }
    }

    if !missing.is_empty() {
        let raw = provider.embed_raw(&missing)?;
        if raw.len() != missing.len() {
            return Err(EmbedError::CountMismatch {
                expected: missing.len(),
                got: raw.len(),
            });
        }
        for (text, values) in missing.iter().zip(raw) {
            if values.len() != desc.dim {
                return Err(EmbedError::DimensionMismatch {
                    expected: desc.dim,
                    got: values.len(),
                });
            }
            let norm = l2_norm(&values);
            if (norm - 1.0).abs() > DRIFT_WARN_TOLERANCE {
                log::warn!(
                    "provider {} returned a vector with norm {norm:.6}; renormalizing",
                    desc.name
                );
            }
            let v = normalize(&values)?;
            if let Some(c) = cache {
                c.insert(&desc.name, text, v.clone());
            }
            resolved.insert(text, v);
        }
    }

    Ok(texts
        .iter()
        .map(|t| resolved[t.as_ref()].clone())
        .collect())
}
