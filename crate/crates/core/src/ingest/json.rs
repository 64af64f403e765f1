//! Normalized document JSON, one file per document:
//!
//! ```json
//! {"doc_id": "...", "title": "...", "blocks": [
//!   {"kind": "heading", "level": 1, "text": "..."},
//!   {"kind": "paragraph", "text": "..."},
//!   {"kind": "table", "table_id": "...", "caption": null, "header": ["..."], "rows": [["..."]]}
//! ]}
//! ```
//!
//! Unknown keys and unknown block kinds are rejected. `section_path` is not
//! stored; it is re-derived from the headings on load.

use serde::Serialize;
use serde_json::{Map, Value};

use super::IngestError;
use crate::docmodel::{normalize_whitespace, validate_document, Block, Document, TableData};

#[derive(Serialize)]
struct DocOut<'a> {
    doc_id: &'a str,
    title: &'a str,
    blocks: Vec<BlockOut<'a>>,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum BlockOut<'a> {
    Heading {
        level: u32,
        text: &'a str,
    },
    Paragraph {
        text: &'a str,
    },
    Table {
        table_id: &'a str,
        caption: Option<&'a str>,
        header: &'a [String],
        rows: &'a [Vec<String>],
    },
}

/// Serializes with a fixed key order so identical documents give identical
/// bytes.
pub fn save_normalized(doc: &Document) -> String {
    let out = DocOut {
        doc_id: &doc.doc_id,
        title: &doc.title,
        blocks: doc
            .blocks
            .iter()
            .map(|b| match b {
                Block::Heading { level, text } => BlockOut::Heading { level: *level, text },
                Block::Paragraph { text } => BlockOut::Paragraph { text },
                Block::Table(t) => BlockOut::Table {
                    table_id: &t.table_id,
                    caption: t.caption.as_deref(),
                    header: &t.header,
                    rows: &t.rows,
                },
            })
            .collect(),
    };
    serde_json::to_string_pretty(&out).expect("document serialization cannot fail")
}

pub fn load_normalized(json_text: &str) -> Result<Document, IngestError> {
    let value: Value = serde_json::from_str(json_text)
        .map_err(|e| IngestError::schema("$", format!("invalid JSON: {e}")))?;
    let obj = as_object(&value, "$")?;
    check_keys(obj, "$", &["doc_id", "title", "blocks"])?;
    let doc_id = string_field(obj, "$", "doc_id")?;
    let title = string_field(obj, "$", "title")?;
    let blocks_v = obj
        .get("blocks")
        .ok_or_else(|| IngestError::schema("$.blocks", "missing field"))?;
    let blocks_arr = blocks_v
        .as_array()
        .ok_or_else(|| IngestError::schema("$.blocks", "expected array"))?;

    let mut blocks = Vec::with_capacity(blocks_arr.len());
    for (i, b) in blocks_arr.iter().enumerate() {
        blocks.push(parse_block(b, &format!("blocks[{i}]"))?);
    }
    let doc = Document::new(doc_id, title, blocks);
    if let Some(v) = validate_document(&doc).into_iter().next() {
        return Err(IngestError::schema("$", v.to_string()));
    }
    Ok(doc)
}

fn parse_block(v: &Value, path: &str) -> Result<Block, IngestError> {
    let obj = as_object(v, path)?;
    let kind = string_field(obj, path, "kind")?;
    match kind.as_str() {
        "heading" => {
            check_keys(obj, path, &["kind", "level", "text"])?;
            let level = obj
                .get("level")
                .and_then(Value::as_u64)
                .filter(|&l| l >= 1 && l <= u32::MAX as u64)
                .ok_or_else(|| IngestError::schema(format!("{path}.level"), "expected integer >= 1"))?;
            Ok(Block::Heading {
                level: level as u32,
                text: string_field(obj, path, "text")?,
            })
        }
        "paragraph" => {
            check_keys(obj, path, &["kind", "text"])?;
            Ok(Block::Paragraph {
                text: string_field(obj, path, "text")?,
            })
        }
        "table" => {
            check_keys(obj, path, &["kind", "table_id", "caption", "header", "rows"])?;
            let caption = match obj.get("caption") {
                None | Some(Value::Null) => None,
                Some(Value::String(s)) => Some(normalize_whitespace(s)),
                Some(_) => {
                    return Err(IngestError::schema(
                        format!("{path}.caption"),
                        "expected string or null",
                    ))
                }
            };
            let header = string_list(
                obj.get("header")
                    .ok_or_else(|| IngestError::schema(format!("{path}.header"), "missing field"))?,
                &format!("{path}.header"),
            )?;
            let rows_v = obj
                .get("rows")
                .ok_or_else(|| IngestError::schema(format!("{path}.rows"), "missing field"))?;
            let rows = rows_v
                .as_array()
                .ok_or_else(|| IngestError::schema(format!("{path}.rows"), "expected array"))?
                .iter()
                .enumerate()
                .map(|(r, row)| string_list(row, &format!("{path}.rows[{r}]")))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Block::Table(TableData {
                table_id: string_field(obj, path, "table_id")?,
                caption,
                header,
                rows,
                section_path: Vec::new(),
            }))
        }
        other => Err(IngestError::schema(
            format!("{path}.kind"),
            format!("unknown block kind {other:?}"),
        )),
    }
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, IngestError> {
    v.as_object()
        .ok_or_else(|| IngestError::schema(path, "expected object"))
}

fn check_keys(obj: &Map<String, Value>, path: &str, allowed: &[&str]) -> Result<(), IngestError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(IngestError::schema(format!("{path}.{k}"), "unknown key")),
        None => Ok(()),
    }
}

fn string_field(obj: &Map<String, Value>, path: &str, key: &str) -> Result<String, IngestError> {
    match obj.get(key) {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(IngestError::schema(format!("{path}.{key}"), "expected string")),
        None => Err(IngestError::schema(format!("{path}.{key}"), "missing field")),
    }
}

/// Cell lists are whitespace-normalized on the way in.
fn string_list(v: &Value, path: &str) -> Result<Vec<String>, IngestError> {
    v.as_array()
        .ok_or_else(|| IngestError::schema(path, "expected array of strings"))?
        .iter()
        .enumerate()
        .map(|(i, c)| {
            c.as_str()
                .map(normalize_whitespace)
                .ok_or_else(|| IngestError::schema(format!("{path}[{i}]"), "expected string"))
        })
        .collect()
}
