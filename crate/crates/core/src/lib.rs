//! Table-aware document retrieval and top-k benchmark harness.
//!
//! The pipeline: [`ingest`] parses .docx files into ordered text and tables,
//! [`chunker`] turns them into embeddable chunks under one of sixteen table
//! representations, [`embed`] maps chunks to unit-norm vectors, [`index`]
//! answers exact cosine top-k queries, and [`eval`] scores QA sets by
//! whether any chunk of the correct table is retrieved.

mod binio;
pub mod chunker;
pub mod docmodel;
pub mod embed;
pub mod eval;
pub mod index;
pub mod ingest;

pub use chunker::{build_corpus, Chunk, ChunkKind, ChunkLevel, Provenance, ReprConfig, Separator};
pub use docmodel::{Block, CorpusStats, Document, TableData};
pub use embed::{EmbeddingProvider, EmbeddingVector, ProviderDescriptor};
pub use eval::{QAItem, QType, RunReport};
pub use index::{SearchHit, VectorIndex};
