//! QA sets, the correct-table hit rule, top-k accuracy runs and the
//! representation grid.

mod judge;
mod qa;
mod report;
mod run;

pub use judge::judge_hit;
pub use qa::{load_qa, QAItem, QType};
pub use report::{emit_report, ReportFormat, CSV_COLUMNS};
pub use run::{
    build_index, evaluate_run, run_grid, GridOptions, QuestionOutcome, RunReport, DEFAULT_K,
};

use thiserror::Error;

use crate::chunker::ChunkerError;
use crate::embed::EmbedError;
use crate::index::IndexError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("QA line {line}: {message}")]
    SchemaViolation { line: usize, message: String },
    #[error("QA line {line}: duplicate qid {qid}")]
    DuplicateQid { qid: String, line: usize },
    #[error("retrieved chunk {0} has no provenance")]
    UnknownChunkId(String),
    #[error("question {qid}: gold table {table_id} not in corpus")]
    GoldTableMissing { qid: String, table_id: String },
    #[error("embedding {context}: {source}")]
    Provider {
        context: String,
        #[source]
        source: EmbedError,
    },
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Chunker(#[from] ChunkerError),
    #[error("at least one provider is required")]
    NoProviders,
}
