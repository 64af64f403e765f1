//! Chunk corpus construction under a [`ReprConfig`].

mod config;
mod sentence;
mod serialize;

pub use config::{ChunkLevel, ReprConfig, Separator};
pub use sentence::split_sentences;
pub use serialize::{render_cell, serialize_header, serialize_row, serialize_table};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::docmodel::{validate_corpus, Block, Document, TableData};

#[derive(Debug, Error)]
pub enum ChunkerError {
    #[error("row {row_index} out of range for table {table_id} ({rows} rows)")]
    IndexOutOfRange {
        table_id: String,
        row_index: usize,
        rows: usize,
    },
    #[error("invalid corpus: {}", .0.join("; "))]
    InvalidCorpus(Vec<String>),
    #[error("chunk file line {line}: {message}")]
    Format { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChunkKind {
    Row,
    Table,
    Header,
    Caption,
    Sentence,
}

impl ChunkKind {
    pub fn is_table_part(self) -> bool {
        self != ChunkKind::Sentence
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ChunkKind::Row => "row",
            ChunkKind::Table => "table",
            ChunkKind::Header => "header",
            ChunkKind::Caption => "caption",
            ChunkKind::Sentence => "sentence",
        }
    }

    pub(crate) fn code(self) -> u8 {
        self as u8
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        [
            ChunkKind::Row,
            ChunkKind::Table,
            ChunkKind::Header,
            ChunkKind::Caption,
            ChunkKind::Sentence,
        ]
        .get(code as usize)
        .copied()
    }
}

impl fmt::Display for ChunkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChunkKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "row" => Ok(ChunkKind::Row),
            "table" => Ok(ChunkKind::Table),
            "header" => Ok(ChunkKind::Header),
            "caption" => Ok(ChunkKind::Caption),
            "sentence" => Ok(ChunkKind::Sentence),
            _ => Err(format!("unknown chunk kind {s:?}")),
        }
    }
}

/// Where a chunk came from. `table_id` is set for every table-derived kind,
/// `row_index` only for [`ChunkKind::Row`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub doc_id: String,
    pub table_id: Option<String>,
    pub row_index: Option<usize>,
    pub kind: ChunkKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chunk {
    pub chunk_id: String,
    pub text: String,
    #[serde(flatten)]
    pub provenance: Provenance,
}

fn chunk_id(doc_id: &str, table_id: Option<&str>, kind: ChunkKind, index: usize) -> String {
    match table_id {
        // Table ids produced by ingestion are already qualified by doc id.
        Some(t) if t.starts_with(doc_id) && t[doc_id.len()..].starts_with('/') => {
            format!("{t}/{kind}/{index}")
        }
        Some(t) => format!("{doc_id}/{t}/{kind}/{index}"),
        None => format!("{doc_id}/{kind}/{index}"),
    }
}

struct Builder<'a> {
    doc_id: &'a str,
    out: &'a mut Vec<Chunk>,
}

impl Builder<'_> {
    fn push(&mut self, text: String, table_id: Option<&str>, row_index: Option<usize>, kind: ChunkKind, index: usize) {
        // Blank chunks carry nothing to embed.
        if text.trim().is_empty() {
            return;
        }
        self.out.push(Chunk {
            chunk_id: chunk_id(self.doc_id, table_id, kind, index),
            text,
            provenance: Provenance {
                doc_id: self.doc_id.to_string(),
                table_id: table_id.map(str::to_string),
                row_index,
                kind,
            },
        });
    }

    fn table(&mut self, t: &TableData, cfg: &ReprConfig) {
        let id = Some(t.table_id.as_str());
        match cfg.chunk_level {
            ChunkLevel::Row => {
                self.push(serialize_header(t, cfg), id, None, ChunkKind::Header, 0);
                for r in 0..t.rows.len() {
                    let text = serialize_row(t, r, cfg).expect("row index in range");
                    self.push(text, id, Some(r), ChunkKind::Row, r);
                }
            }
            ChunkLevel::Table => {
                self.push(serialize_table(t, cfg), id, None, ChunkKind::Table, 0);
            }
        }
        if let Some(c) = &t.caption {
            self.push(c.clone(), id, None, ChunkKind::Caption, 0);
        }
    }
}

/// Builds the chunk corpus in document order.
///
/// Per table, ROW level emits a header chunk, one chunk per body row and a
/// caption chunk when a caption exists; TABLE level emits one whole-table
/// chunk plus the caption chunk. With `include_text`, every paragraph adds
/// one chunk per sentence. Headings are never chunked.
pub fn build_corpus(docs: &[Document], cfg: &ReprConfig) -> Result<Vec<Chunk>, ChunkerError> {
    let violations = validate_corpus(docs);
    if !violations.is_empty() {
        return Err(ChunkerError::InvalidCorpus(
            violations
                .into_iter()
                .map(|(d, v)| format!("{d}: {v}"))
                .collect(),
        ));
    }
    let mut out = Vec::new();
    for doc in docs {
        let mut b = Builder {
            doc_id: &doc.doc_id,
            out: &mut out,
        };
        let mut sentence_no = 0usize;
        for block in &doc.blocks {
            match block {
                Block::Table(t) => b.table(t, cfg),
                Block::Paragraph { text } if cfg.include_text => {
                    for s in split_sentences(text) {
                        b.push(s, None, None, ChunkKind::Sentence, sentence_no);
                        sentence_no += 1;
                    }
                }
                _ => {}
            }
        }
    }
    Ok(out)
}

/// One JSON object per line.
pub fn write_chunks_jsonl(chunks: &[Chunk]) -> String {
    let mut s = String::new();
    for c in chunks {
        s.push_str(&serde_json::to_string(c).expect("chunk serialization cannot fail"));
        s.push('\n');
    }
    s
}

pub fn read_chunks_jsonl(text: &str) -> Result<Vec<Chunk>, ChunkerError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| ChunkerError::Format {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(caption: Option<&str>, rows: usize, paragraph: Option<&str>) -> Document {
        let mut blocks = vec![Block::Table(TableData {
            table_id: "d1/t1".into(),
            caption: caption.map(str::to_string),
            header: vec!["Use case".into(), "Latency".into()],
            rows: (0..rows)
                .map(|i| vec![format!("Case {i}"), format!("{i} ms")])
                .collect(),
            section_path: vec![],
        })];
        if let Some(p) = paragraph {
            blocks.push(Block::Paragraph { text: p.into() });
        }
        Document::new("d1", "", blocks)
    }

    fn cfg(chunk_level: ChunkLevel, include_text: bool) -> ReprConfig {
        ReprConfig {
            chunk_level,
            separator: Separator::Pipe,
            repeat_header: false,
            include_text,
        }
    }

    fn kinds(chunks: &[Chunk]) -> Vec<ChunkKind> {
        chunks.iter().map(|c| c.provenance.kind).collect()
    }

    #[test]
    fn row_level_counts() {
        let c = build_corpus(&[doc(Some("Table 1: KPIs"), 3, None)], &cfg(ChunkLevel::Row, false)).unwrap();
        use ChunkKind::*;
        assert_eq!(kinds(&c), vec![Header, Row, Row, Row, Caption]);
        assert_eq!(c[1].chunk_id, "d1/t1/row/0");
        assert_eq!(c[1].provenance.row_index, Some(0));
        assert_eq!(c[0].text, "Use case | Latency");
    }

    #[test]
    fn table_level_counts() {
        let c = build_corpus(&[doc(Some("Table 1: KPIs"), 3, None)], &cfg(ChunkLevel::Table, false)).unwrap();
        assert_eq!(kinds(&c), vec![ChunkKind::Table, ChunkKind::Caption]);
        assert!(c[0].text.starts_with("Table 1: KPIs\n"));
    }

    #[test]
    fn sentences_when_text_included() {
        let d = doc(Some("Table 1: KPIs"), 3, Some("First one. Second one."));
        let c = build_corpus(std::slice::from_ref(&d), &cfg(ChunkLevel::Row, true)).unwrap();
        assert_eq!(c.len(), 7);
        assert_eq!(c[5].chunk_id, "d1/sentence/0");
        assert_eq!(c[6].text, "Second one.");
        assert_eq!(c[6].provenance.table_id, None);
        let without = build_corpus(&[d], &cfg(ChunkLevel::Row, false)).unwrap();
        assert_eq!(without.len(), 5);
    }

    #[test]
    fn header_only_table() {
        let c = build_corpus(&[doc(None, 0, None)], &cfg(ChunkLevel::Row, false)).unwrap();
        assert_eq!(kinds(&c), vec![ChunkKind::Header]);
    }

    #[test]
    fn unqualified_table_ids_get_doc_prefix() {
        assert_eq!(chunk_id("d1", Some("t9"), ChunkKind::Caption, 0), "d1/t9/caption/0");
        assert_eq!(chunk_id("d1", Some("d10/t9"), ChunkKind::Row, 2), "d1/d10/t9/row/2");
    }

    #[test]
    fn invalid_corpus_is_rejected() {
        let mut d = doc(None, 1, None);
        if let Block::Table(t) = &mut d.blocks[0] {
            t.rows[0].pop();
        }
        assert!(matches!(
            build_corpus(&[d], &cfg(ChunkLevel::Row, false)),
            Err(ChunkerError::InvalidCorpus(_))
        ));
    }

    #[test]
    fn jsonl_shape() {
        let c = build_corpus(&[doc(None, 1, None)], &cfg(ChunkLevel::Row, false)).unwrap();
        let text = write_chunks_jsonl(&c);
        let first = text.lines().next().unwrap();
        assert_eq!(
            first,
            r#"{"chunk_id":"d1/t1/header/0","text":"Use case | Latency","doc_id":"d1","table_id":"d1/t1","row_index":null,"kind":"header"}"#
        );
        assert_eq!(read_chunks_jsonl(&text).unwrap(), c);
    }
}
