use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::EvalError;

/// Question category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QType {
    /// Single-cell extraction.
    E,
    /// Multiple rows or columns of one table.
    M,
    /// Aggregation (count, average, ...) over a row or column.
    A,
    /// Inference across rows and columns.
    I,
}

impl QType {
    pub const ALL: [QType; 4] = [QType::E, QType::M, QType::A, QType::I];
}

impl fmt::Display for QType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QAItem {
    pub qid: String,
    pub question: String,
    pub gold_table_ids: Vec<String>,
    pub qtype: QType,
}

/// Reads one QA item per non-blank line, in file order.
pub fn load_qa(jsonl_text: &str) -> Result<Vec<QAItem>, EvalError> {
    let mut items = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in jsonl_text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let item: QAItem = serde_json::from_str(line).map_err(|e| EvalError::SchemaViolation {
            line: line_no,
            message: e.to_string(),
        })?;
        let problem = if item.qid.is_empty() {
            Some("qid is empty")
        } else if item.question.trim().is_empty() {
            Some("question is empty")
        } else if item.gold_table_ids.is_empty() {
            Some("gold_table_ids is empty")
        } else {
            None
        };
        if let Some(message) = problem {
            return Err(EvalError::SchemaViolation {
                line: line_no,
                message: message.to_string(),
            });
        }
        if !seen.insert(item.qid.clone()) {
            return Err(EvalError::DuplicateQid {
                qid: item.qid,
                line: line_no,
            });
        }
        items.push(item);
    }
    Ok(items)
}
