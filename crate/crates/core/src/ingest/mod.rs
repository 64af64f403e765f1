//! Document ingestion: OOXML (.docx) parsing and the normalized JSON format.

mod caption;
mod docx;
mod json;

pub use caption::{assemble_document, detect_caption, heading_level, RawContent, RawElement};
pub use docx::parse_docx;
pub use json::{load_normalized, save_normalized};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("not a zip archive: {0}")]
    NotAZip(String),
    #[error("missing main document part {0}")]
    MissingDocumentPart(String),
    #[error("malformed XML in {member}: {message}")]
    MalformedXml { member: String, message: String },
    #[error("schema violation at {path}: {message}")]
    SchemaViolation { path: String, message: String },
    #[error("element index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("element {0} is not a table")]
    NotATable(usize),
}

impl IngestError {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        IngestError::SchemaViolation {
            path: path.into(),
            message: message.into(),
        }
    }
}
