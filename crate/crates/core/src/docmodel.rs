//! Normalized in-memory document representation.
//!
//! A [`Document`] is a flat, ordered list of [`Block`]s. Section structure is
//! carried by heading levels rather than nested objects; each table records the
//! enclosing heading texts in [`TableData::section_path`], derived from the
//! headings that precede it.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub title: String,
    pub blocks: Vec<Block>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Block {
    Heading { level: u32, text: String },
    Paragraph { text: String },
    Table(TableData),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableData {
    pub table_id: String,
    pub caption: Option<String>,
    /// First source row. Always at least one cell for a valid table.
    pub header: Vec<String>,
    /// Body rows, header excluded.
    pub rows: Vec<Vec<String>>,
    /// Enclosing heading texts, outermost first.
    pub section_path: Vec<String>,
}

impl Document {
    /// Builds a document and derives every table's `section_path` from the
    /// headings preceding it.
    pub fn new(doc_id: impl Into<String>, title: impl Into<String>, blocks: Vec<Block>) -> Self {
        let mut doc = Document {
            doc_id: doc_id.into(),
            title: title.into(),
            blocks,
        };
        doc.assign_section_paths();
        doc
    }

    /// Recomputes `section_path` for every table. A heading at level `n`
    /// closes every open heading at level `>= n`.
    pub fn assign_section_paths(&mut self) {
        let mut open: Vec<(u32, String)> = Vec::new();
        for block in &mut self.blocks {
            match block {
                Block::Heading { level, text } => {
                    open.retain(|(l, _)| *l < *level);
                    open.push((*level, text.clone()));
                }
                Block::Table(table) => {
                    table.section_path = open.iter().map(|(_, t)| t.clone()).collect();
                }
                Block::Paragraph { .. } => {}
            }
        }
    }

    pub fn tables(&self) -> impl Iterator<Item = &TableData> {
        self.blocks.iter().filter_map(|b| match b {
            Block::Table(t) => Some(t),
            _ => None,
        })
    }

    pub fn paragraphs(&self) -> impl Iterator<Item = &str> {
        self.blocks.iter().filter_map(|b| match b {
            Block::Paragraph { text } => Some(text.as_str()),
            _ => None,
        })
    }
}

impl TableData {
    pub fn width(&self) -> usize {
        self.header.len()
    }
}

/// Collapses internal whitespace runs to a single space and trims the ends.
pub fn normalize_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// A broken document invariant, located by block index where applicable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyDocId,
    HeadingLevelZero { block: usize },
    EmptyTableId { block: usize },
    EmptyHeader { block: usize, table_id: String },
    RaggedRow {
        block: usize,
        table_id: String,
        row: usize,
        expected: usize,
        got: usize,
    },
    DuplicateTableId { block: usize, table_id: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyDocId => write!(f, "doc_id is empty"),
            Violation::HeadingLevelZero { block } => {
                write!(f, "block {block}: heading level must be >= 1")
            }
            Violation::EmptyTableId { block } => write!(f, "block {block}: table_id is empty"),
            Violation::EmptyHeader { block, table_id } => {
                write!(f, "block {block}: table {table_id} has an empty header")
            }
            Violation::RaggedRow {
                block,
                table_id,
                row,
                expected,
                got,
            } => write!(
                f,
                "block {block}: table {table_id} row {row} has {got} cells, header has {expected}"
            ),
            Violation::DuplicateTableId { block, table_id } => {
                write!(f, "block {block}: duplicate table_id {table_id}")
            }
        }
    }
}

/// Checks every document and table invariant. Returns an empty list iff the
/// document is valid.
pub fn validate_document(doc: &Document) -> Vec<Violation> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    if doc.doc_id.is_empty() {
        out.push(Violation::EmptyDocId);
    }
    for (i, block) in doc.blocks.iter().enumerate() {
        check_block(i, block, &mut seen, &mut out);
    }
    out
}

/// Validates each document and additionally enforces corpus-wide table id
/// uniqueness. Violations are paired with the owning doc_id.
pub fn validate_corpus(docs: &[Document]) -> Vec<(String, Violation)> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for doc in docs {
        let mut local = Vec::new();
        if doc.doc_id.is_empty() {
            local.push(Violation::EmptyDocId);
        }
        for (i, block) in doc.blocks.iter().enumerate() {
            check_block(i, block, &mut seen, &mut local);
        }
        out.extend(local.into_iter().map(|v| (doc.doc_id.clone(), v)));
    }
    out
}

fn check_block<'a>(
    index: usize,
    block: &'a Block,
    seen: &mut HashSet<&'a str>,
    out: &mut Vec<Violation>,
) {
    match block {
        Block::Heading { level, .. } if *level == 0 => {
            out.push(Violation::HeadingLevelZero { block: index })
        }
        Block::Table(t) => {
            if t.table_id.is_empty() {
                out.push(Violation::EmptyTableId { block: index });
            } else if !seen.insert(t.table_id.as_str()) {
                out.push(Violation::DuplicateTableId {
                    block: index,
                    table_id: t.table_id.clone(),
                });
            }
            if t.header.is_empty() {
                out.push(Violation::EmptyHeader {
                    block: index,
                    table_id: t.table_id.clone(),
                });
            }
            for (r, row) in t.rows.iter().enumerate() {
                if row.len() != t.header.len() {
                    out.push(Violation::RaggedRow {
                        block: index,
                        table_id: t.table_id.clone(),
                        row: r,
                        expected: t.header.len(),
                        got: row.len(),
                    });
                }
            }
        }
        _ => {}
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub num_documents: usize,
    pub num_tables: usize,
    pub num_sentences: usize,
    /// Body-row count (header excluded) to number of tables with that count.
    pub row_count_histogram: BTreeMap<usize, usize>,
}

pub fn corpus_stats<F>(docs: &[Document], mut sentence_counter: F) -> CorpusStats
where
    F: FnMut(&str) -> usize,
{
    let mut stats = CorpusStats {
        num_documents: docs.len(),
        ..Default::default()
    };
    for doc in docs {
        for block in &doc.blocks {
            match block {
                Block::Table(t) => {
                    stats.num_tables += 1;
                    *stats.row_count_histogram.entry(t.rows.len()).or_insert(0) += 1;
                }
                Block::Paragraph { text } => stats.num_sentences += sentence_counter(text),
                Block::Heading { .. } => {}
            }
        }
    }
    stats
}
