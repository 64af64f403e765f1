//! Table linearization.

use super::{ChunkerError, ReprConfig};
use crate::docmodel::TableData;

/// `"<header>: <value>"` when repeating headers, otherwise the bare value.
pub fn render_cell(header: &str, value: &str, repeat_header: bool) -> String {
    if repeat_header {
        format!("{header}: {value}")
    } else {
        value.to_string()
    }
}

/// One body row, cells in column order joined by the configured separator.
pub fn serialize_row(
    table: &TableData,
    row_index: usize,
    cfg: &ReprConfig,
) -> Result<String, ChunkerError> {
    let row = table
        .rows
        .get(row_index)
        .ok_or(ChunkerError::IndexOutOfRange {
            table_id: table.table_id.clone(),
            row_index,
            rows: table.rows.len(),
        })?;
    Ok(table
        .header
        .iter()
        .zip(row)
        .map(|(h, v)| render_cell(h, v, cfg.repeat_header))
        .collect::<Vec<_>>()
        .join(cfg.separator.as_str()))
}

/// Header cells joined by the separator. Headers are never repeated against
/// themselves.
pub fn serialize_header(table: &TableData, cfg: &ReprConfig) -> String {
    table.header.join(cfg.separator.as_str())
}

/// Whole-table text: optional caption line, header line, then one line per
/// body row.
pub fn serialize_table(table: &TableData, cfg: &ReprConfig) -> String {
    let mut lines = Vec::with_capacity(table.rows.len() + 2);
    if let Some(c) = &table.caption {
        lines.push(c.clone());
    }
    lines.push(serialize_header(table, cfg));
    for i in 0..table.rows.len() {
        lines.push(serialize_row(table, i, cfg).expect("row index in range"));
    }
    lines.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chunker::{ChunkLevel, Separator};

    fn cfg(separator: Separator, repeat_header: bool) -> ReprConfig {
        ReprConfig {
            chunk_level: ChunkLevel::Row,
            separator,
            repeat_header,
            include_text: false,
        }
    }

    fn kpi_table(caption: Option<&str>, rows: usize) -> TableData {
        TableData {
            table_id: "d1/t1".into(),
            caption: caption.map(str::to_string),
            header: vec!["Use case".into(), "Latency".into()],
            rows: vec![vec!["UK Home".into(), "10 ms".into()]; rows],
            section_path: vec![],
        }
    }

    #[test]
    fn cells() {
        assert_eq!(render_cell("Latency", "10 ms", true), "Latency: 10 ms");
        assert_eq!(render_cell("Latency", "10 ms", false), "10 ms");
        assert_eq!(render_cell("KPI", "", true), "KPI: ");
    }

    #[test]
    fn rows() {
        let t = kpi_table(None, 1);
        assert_eq!(
            serialize_row(&t, 0, &cfg(Separator::Pipe, true)).unwrap(),
            "Use case: UK Home | Latency: 10 ms"
        );
        assert_eq!(serialize_row(&t, 0, &cfg(Separator::Space, false)).unwrap(), "UK Home 10 ms");
        assert_eq!(serialize_row(&t, 0, &cfg(Separator::Pipe, false)).unwrap(), "UK Home | 10 ms");
        assert!(matches!(
            serialize_row(&t, 1, &cfg(Separator::Pipe, false)),
            Err(ChunkerError::IndexOutOfRange { row_index: 1, .. })
        ));
    }

    #[test]
    fn tables() {
        let t = kpi_table(Some("Table 1: KPIs"), 1);
        assert_eq!(
            serialize_table(&t, &cfg(Separator::Pipe, false)),
            "Table 1: KPIs\nUse case | Latency\nUK Home | 10 ms"
        );
        assert_eq!(
            serialize_table(&t, &cfg(Separator::Pipe, true)),
            "Table 1: KPIs\nUse case | Latency\nUse case: UK Home | Latency: 10 ms"
        );
        assert_eq!(
            serialize_table(&kpi_table(None, 0), &cfg(Separator::Space, false)),
            "Use case Latency"
        );
        assert_eq!(
            serialize_table(&kpi_table(Some("Table 2"), 0), &cfg(Separator::Space, true)),
            "Table 2\nUse case Latency"
        );
    }
}
