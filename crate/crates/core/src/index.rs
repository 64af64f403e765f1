//! Exact cosine top-k index over unit-norm chunk embeddings.
//!
//! Search is a full scan: every stored vector is scored against the query by
//! a dot product in f64, and hits are ordered by descending score
//! with ties broken by ascending chunk id, which makes the ordering total.
//!
//! # File format
//!
//! All integers and floats little-endian.
//!
//! | field      | type                 |
//! |------------|----------------------|
//! | magic      | `b"TABREPIX"`        |
//! | version    | u32 (currently 1)    |
//! | dim        | u32                  |
//! | count      | u64                  |
//! | vectors    | `count * dim` f64    |
//! | provenance | `count` records      |
//!
//! A provenance record is: chunk id (u32 length + UTF-8), doc id (same), kind
//! (u8: row=0, table=1, header=2, caption=3, sentence=4), table id flag (u8)
//! followed by the table id string when the flag is 1, and row index flag
//! (u8) followed by a u64 when the flag is 1.

use std::cmp::Ordering;
use std::collections::HashMap;

use thiserror::Error;

use crate::binio::{put_string, Reader};
use crate::chunker::{ChunkKind, Provenance};
use crate::embed::EmbeddingVector;

const MAGIC: &[u8; 8] = b"TABREPIX";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("duplicate chunk id {0}")]
    DuplicateChunkId(String),
    #[error("dimension mismatch: index has {expected}, vector has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("index is empty")]
    EmptyIndex,
    #[error("k must be at least 1")]
    InvalidK,
    #[error("corrupt index file at byte {offset} ({section})")]
    CorruptIndexFile { offset: usize, section: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchHit {
    pub chunk_id: String,
    pub score: f64,
    /// 1-based.
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorIndex {
    dim: usize,
    ids: Vec<String>,
    vectors: Vec<f64>,
    provenance: Vec<Provenance>,
    positions: HashMap<String, usize>,
}

impl VectorIndex {
    pub fn new(dim: usize) -> Self {
        VectorIndex {
            dim,
            ids: Vec::new(),
            vectors: Vec::new(),
            provenance: Vec::new(),
            positions: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn add(
        &mut self,
        chunk_id: &str,
        v: &EmbeddingVector,
        prov: Provenance,
    ) -> Result<(), IndexError> {
        if v.dim() != self.dim {
            return Err(IndexError::DimensionMismatch {
                expected: self.dim,
                got: v.dim(),
            });
        }
        if self.positions.contains_key(chunk_id) {
            return Err(IndexError::DuplicateChunkId(chunk_id.to_string()));
        }
        self.positions.insert(chunk_id.to_string(), self.ids.len());
        self.ids.push(chunk_id.to_string());
        self.vectors.extend_from_slice(v.values());
        self.provenance.push(prov);
        Ok(())
    }

    pub fn provenance(&self, chunk_id: &str) -> Option<&Provenance> {
        self.positions.get(chunk_id).map(|&i| &self.provenance[i])
    }

    /// Entries in insertion order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &[f64], &Provenance)> {
        self.ids
            .iter()
            .zip(self.vectors.chunks_exact(self.dim.max(1)))
            .zip(&self.provenance)
            .map(|((id, v), p)| (id.as_str(), v, p))
    }

    /// The `min(k, len)` highest-scoring entries.
    pub fn topk(&self, query: &EmbeddingVector, k: usize) -> Result<Vec<SearchHit>, IndexError> {
        if k == 0 {
            return Err(IndexError::InvalidK);
        }
        if self.is_empty() {
            return Err(IndexError::EmptyIndex);
        }
        if query.dim() != self.dim {
            return Err(IndexError::DimensionMismatch {
                expected: self.dim,
                got: query.dim(),
            });
        }
        let q = query.values();
        let mut scored: Vec<(f64, usize)> = self
            .vectors
            .chunks_exact(self.dim)
            .enumerate()
            .map(|(i, v)| (crate::embed::dot(v, q), i))
            .collect();

        let order = |a: &(f64, usize), b: &(f64, usize)| -> Ordering {
            b.0.total_cmp(&a.0)
                .then_with(|| self.ids[a.1].cmp(&self.ids[b.1]))
        };
        let k = k.min(scored.len());
        if k < scored.len() {
            scored.select_nth_unstable_by(k - 1, order);
            scored.truncate(k);
        }
        scored.sort_unstable_by(order);
        Ok(scored
            .into_iter()
            .enumerate()
            .map(|(r, (score, i))| SearchHit {
                chunk_id: self.ids[i].clone(),
                score,
                rank: r + 1,
            })
            .collect())
    }

    pub fn save(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(24 + self.vectors.len() * 8 + self.ids.len() * 48);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        out.extend_from_slice(&(self.ids.len() as u64).to_le_bytes());
        for x in &self.vectors {
            out.extend_from_slice(&x.to_le_bytes());
        }
        for (id, p) in self.ids.iter().zip(&self.provenance) {
            put_string(&mut out, id);
            put_string(&mut out, &p.doc_id);
            out.push(p.kind.code());
            match &p.table_id {
                Some(t) => {
                    out.push(1);
                    put_string(&mut out, t);
                }
                None => out.push(0),
            }
            match p.row_index {
                Some(r) => {
                    out.push(1);
                    out.extend_from_slice(&(r as u64).to_le_bytes());
                }
                None => out.push(0),
            }
        }
        out
    }

    pub fn load(bytes: &[u8]) -> Result<Self, IndexError> {
        let mut rd = Reader::new(bytes);
        let corrupt = |rd: &Reader, section: &str| IndexError::CorruptIndexFile {
            offset: rd.offset(),
            section: section.to_string(),
        };

        match rd.take(MAGIC.len()) {
            Some(m) if m == MAGIC => {}
            _ => return Err(corrupt(&rd, "magic")),
        }
        let version = rd.u32().ok_or_else(|| corrupt(&rd, "version"))?;
        if version != FORMAT_VERSION {
            return Err(IndexError::CorruptIndexFile {
                offset: 8,
                section: format!("unsupported version {version}, expected {FORMAT_VERSION}"),
            });
        }
        let dim = rd.u32().ok_or_else(|| corrupt(&rd, "dim"))? as usize;
        let count = rd.u64().ok_or_else(|| corrupt(&rd, "count"))? as usize;
        let n_values = count
            .checked_mul(dim)
            .ok_or_else(|| corrupt(&rd, "count"))?;
        let vectors = rd.f64s(n_values).ok_or_else(|| corrupt(&rd, "vectors"))?;

        let mut index = VectorIndex::new(dim);
        index.vectors = vectors;
        for _ in 0..count {
            let id = rd.string().ok_or_else(|| corrupt(&rd, "provenance chunk id"))?;
            let doc_id = rd.string().ok_or_else(|| corrupt(&rd, "provenance doc id"))?;
            let kind = rd
                .u8()
                .and_then(ChunkKind::from_code)
                .ok_or_else(|| corrupt(&rd, "provenance kind"))?;
            let table_id = match rd.u8() {
                Some(0) => None,
                Some(1) => Some(rd.string().ok_or_else(|| corrupt(&rd, "provenance table id"))?),
                _ => return Err(corrupt(&rd, "provenance table flag")),
            };
            let row_index = match rd.u8() {
                Some(0) => None,
                Some(1) => Some(rd.u64().ok_or_else(|| corrupt(&rd, "provenance row index"))? as usize),
                _ => return Err(corrupt(&rd, "provenance row flag")),
            };
            if index.positions.insert(id.clone(), index.ids.len()).is_some() {
                return Err(corrupt(&rd, "duplicate chunk id"));
            }
            index.ids.push(id);
            index.provenance.push(Provenance {
                doc_id,
                table_id,
                row_index,
                kind,
            });
        }
        if !rd.is_empty() {
            return Err(corrupt(&rd, "trailing bytes"));
        }
        Ok(index)
    }
}
