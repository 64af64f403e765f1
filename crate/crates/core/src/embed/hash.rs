//! Deterministic bag-of-tokens embedder.
//!
//! Text is split into maximal runs of alphanumeric characters, lowercased.
//! Each token is hashed with XXH64 seeded by [`HASH_SEED`] and counted in
//! bucket `hash % dim`; the count vector is L2-normalized. XXH64 is a
//! published, platform-independent hash, so vectors are reproducible in any
//! language.

use xxhash_rust::xxh64::xxh64;

use super::{normalize, EmbedError, EmbeddingProvider, EmbeddingVector, ProviderDescriptor};

pub const HASH_SEED: u64 = 0x7461_6272_6570_0001;
pub const DEFAULT_HASH_DIM: usize = 256;
pub(crate) const MIN_HASH_DIM: usize = 8;

/// Stand-in token for texts without alphanumeric content (e.g. a row of
/// dashes), so the provider never fails on such chunks.
const EMPTY_TOKEN: &str = "\u{0}";

pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn token_bucket(token: &str, dim: usize) -> usize {
    (xxh64(token.as_bytes(), HASH_SEED) % dim as u64) as usize
}

fn counts<'a>(tokens: impl IntoIterator<Item = &'a str>, dim: usize) -> Vec<f64> {
    let mut v = vec![0f64; dim];
    for t in tokens {
        v[token_bucket(t, dim)] += 1.0;
    }
    v
}

pub fn hash_embed(text: &str, dim: usize) -> Result<EmbeddingVector, EmbedError> {
    if dim < MIN_HASH_DIM {
        return Err(EmbedError::InvalidDescriptor(format!(
            "hash dimension must be >= {MIN_HASH_DIM}, got {dim}"
        )));
    }
    let tokens = tokenize(text);
    if tokens.is_empty() {
        return Err(EmbedError::NoTokens);
    }
    normalize(&counts(tokens.iter().map(String::as_str), dim))
}

#[derive(Debug, Clone)]
pub struct HashEmbedder {
    descriptor: ProviderDescriptor,
}

impl HashEmbedder {
    pub fn new(dim: usize) -> Result<Self, EmbedError> {
        Ok(HashEmbedder {
            descriptor: ProviderDescriptor::local_hash(dim)?,
        })
    }
}

impl Default for HashEmbedder {
    fn default() -> Self {
        HashEmbedder::new(DEFAULT_HASH_DIM).expect("default dim is valid")
    }
}

impl EmbeddingProvider for HashEmbedder {
    fn descriptor(&self) -> &ProviderDescriptor {
        &self.descriptor
    }

    fn embed_raw(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, EmbedError> {
        let dim = self.descriptor.dim;
        Ok(texts
            .iter()
            .map(|t| match hash_embed(t, dim) {
                Ok(v) => v.into_values(),
                Err(_) => counts([EMPTY_TOKEN], dim),
            })
            .collect())
    }
}
