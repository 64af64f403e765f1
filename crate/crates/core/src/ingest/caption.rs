use crate::docmodel::{normalize_whitespace, Block, Document, TableData};

use super::IngestError;

/// A body-level element in source order, before heading and caption
/// resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawElement {
    /// Position in the source body.
    pub index: usize,
    pub content: RawContent,
    /// Resolved paragraph style name, e.g. `heading 2`.
    pub style_name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawContent {
    Paragraph(String),
    /// Rectangular cell grid, merged cells already expanded.
    Table(Vec<Vec<String>>),
}

impl RawElement {
    pub fn paragraph(index: usize, text: impl Into<String>, style: Option<&str>) -> Self {
        RawElement {
            index,
            content: RawContent::Paragraph(text.into()),
            style_name: style.map(str::to_string),
        }
    }

    pub fn table(index: usize, cells: Vec<Vec<String>>) -> Self {
        RawElement {
            index,
            content: RawContent::Table(cells),
            style_name: None,
        }
    }

    fn heading_level(&self) -> Option<u32> {
        match self.content {
            RawContent::Paragraph(_) => self.style_name.as_deref().and_then(heading_level),
            RawContent::Table(_) => None,
        }
    }
}

/// Maps a style name of the form `Heading<N>` (case and inner spaces
/// ignored) to its level. `N` must be at least 1.
pub fn heading_level(style: &str) -> Option<u32> {
    let compact: String = style
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_ascii_lowercase();
    let digits = compact.strip_prefix("heading")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().filter(|&l| l >= 1)
}

/// Returns the caption for the table at `table_index`: the text of the
/// immediately preceding non-heading paragraph when it starts with "table"
/// (case-insensitive, after trimming).
pub fn detect_caption(
    elements: &[RawElement],
    table_index: usize,
) -> Result<Option<String>, IngestError> {
    let el = elements.get(table_index).ok_or(IngestError::IndexOutOfRange {
        index: table_index,
        len: elements.len(),
    })?;
    if !matches!(el.content, RawContent::Table(_)) {
        return Err(IngestError::NotATable(table_index));
    }
    let Some(prev) = table_index.checked_sub(1).map(|i| &elements[i]) else {
        return Ok(None);
    };
    if prev.heading_level().is_some() {
        return Ok(None);
    }
    match &prev.content {
        RawContent::Paragraph(text) if starts_with_table(text) => Ok(Some(text.trim().to_string())),
        _ => Ok(None),
    }
}

fn starts_with_table(text: &str) -> bool {
    text.trim_start()
        .get(..5)
        .is_some_and(|p| p.eq_ignore_ascii_case("table"))
}

/// Turns ordered raw elements into a [`Document`]: drops empty paragraphs,
/// resolves headings, splits each table grid into header and body rows, and
/// moves caption paragraphs into their table.
pub fn assemble_document(
    doc_id: &str,
    title: &str,
    elements: Vec<RawElement>,
) -> Result<Document, IngestError> {
    let elements: Vec<RawElement> = elements
        .into_iter()
        .filter_map(|mut el| {
            match &mut el.content {
                RawContent::Paragraph(text) => {
                    *text = normalize_whitespace(text);
                    if text.is_empty() {
                        return None;
                    }
                }
                RawContent::Table(grid) => {
                    for cell in grid.iter_mut().flatten() {
                        *cell = normalize_whitespace(cell);
                    }
                    if grid.is_empty() {
                        return None;
                    }
                }
            }
            Some(el)
        })
        .collect();

    let mut captions = vec![None; elements.len()];
    let mut consumed = vec![false; elements.len()];
    for i in 0..elements.len() {
        if matches!(elements[i].content, RawContent::Table(_)) {
            if let Some(c) = detect_caption(&elements, i)? {
                captions[i] = Some(c);
                consumed[i - 1] = true;
            }
        }
    }

    let mut blocks = Vec::with_capacity(elements.len());
    let mut table_no = 0usize;
    for (i, el) in elements.into_iter().enumerate() {
        if consumed[i] {
            continue;
        }
        let level = el.heading_level();
        match el.content {
            RawContent::Paragraph(text) => match level {
                Some(level) => blocks.push(Block::Heading { level, text }),
                None => blocks.push(Block::Paragraph { text }),
            },
            RawContent::Table(mut grid) => {
                table_no += 1;
                let width = grid.iter().map(Vec::len).max().unwrap_or(0).max(1);
                for row in &mut grid {
                    row.resize(width, String::new());
                }
                let mut rows = grid.into_iter();
                let header = rows.next().unwrap_or_default();
                blocks.push(Block::Table(TableData {
                    table_id: format!("{doc_id}/t{table_no}"),
                    caption: captions[i].take(),
                    header,
                    rows: rows.collect(),
                    section_path: Vec::new(),
                }));
            }
        }
    }
    Ok(Document::new(doc_id, title, blocks))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(rows: &[&[&str]]) -> Vec<Vec<String>> {
        rows.iter()
            .map(|r| r.iter().map(|s| s.to_string()).collect())
            .collect()
    }

    #[test]
    fn caption_from_table_prefixed_paragraph() {
        let els = vec![
            RawElement::paragraph(0, "Table 1: KPIs", None),
            RawElement::table(1, grid(&[&["a"]])),
        ];
        assert_eq!(detect_caption(&els, 1).unwrap().as_deref(), Some("Table 1: KPIs"));
    }

    #[test]
    fn caption_prefix_is_case_insensitive() {
        let els = vec![
            RawElement::paragraph(0, "  TABLE A.1-2 Parameters", None),
            RawElement::table(1, grid(&[&["a"]])),
        ];
        assert_eq!(
            detect_caption(&els, 1).unwrap().as_deref(),
            Some("TABLE A.1-2 Parameters")
        );
    }

    #[test]
    fn no_caption_on_prefix_mismatch() {
        let els = vec![
            RawElement::paragraph(0, "The KPIs are:", None),
            RawElement::table(1, grid(&[&["a"]])),
        ];
        assert_eq!(detect_caption(&els, 1).unwrap(), None);
    }

    #[test]
    fn no_caption_for_first_element() {
        let els = vec![RawElement::table(0, grid(&[&["a"]]))];
        assert_eq!(detect_caption(&els, 0).unwrap(), None);
    }

    #[test]
    fn heading_is_never_a_caption() {
        let els = vec![
            RawElement::paragraph(0, "Tables of parameters", Some("heading 2")),
            RawElement::table(1, grid(&[&["a"]])),
        ];
        assert_eq!(detect_caption(&els, 1).unwrap(), None);
    }

    #[test]
    fn caption_errors() {
        let els = vec![RawElement::paragraph(0, "x", None)];
        assert!(matches!(
            detect_caption(&els, 3),
            Err(IngestError::IndexOutOfRange { index: 3, len: 1 })
        ));
        assert!(matches!(detect_caption(&els, 0), Err(IngestError::NotATable(0))));
    }

    #[test]
    fn heading_styles() {
        assert_eq!(heading_level("Heading1"), Some(1));
        assert_eq!(heading_level("heading 3"), Some(3));
        assert_eq!(heading_level("Heading 0"), None);
        assert_eq!(heading_level("Heading"), None);
        assert_eq!(heading_level("HeadingX"), None);
        assert_eq!(heading_level("Normal"), None);
    }

    #[test]
    fn assembled_caption_is_consumed() {
        let els = vec![
            RawElement::paragraph(0, "5 Requirements", Some("Heading 1")),
            RawElement::paragraph(1, "", None),
            RawElement::paragraph(2, "Table 5.1-1: Latency KPIs", None),
            RawElement::table(3, grid(&[&["Use case", "Latency"], &["UK  Home", "10 ms"]])),
            RawElement::paragraph(4, "Some text.", None),
        ];
        let doc = assemble_document("d1", "", els).unwrap();
        assert_eq!(doc.blocks.len(), 3);
        let t = doc.tables().next().unwrap();
        assert_eq!(t.table_id, "d1/t1");
        assert_eq!(t.caption.as_deref(), Some("Table 5.1-1: Latency KPIs"));
        assert_eq!(t.rows, grid(&[&["UK Home", "10 ms"]]));
        assert_eq!(t.section_path, vec!["5 Requirements".to_string()]);
        assert_eq!(doc.paragraphs().collect::<Vec<_>>(), vec!["Some text."]);
    }

    #[test]
    fn empty_paragraph_between_caption_and_table_is_ignored() {
        let els = vec![
            RawElement::paragraph(0, "Table 2: X", None),
            RawElement::paragraph(1, "   ", None),
            RawElement::table(2, grid(&[&["a"]])),
        ];
        let doc = assemble_document("d", "", els).unwrap();
        assert_eq!(doc.blocks.len(), 1);
        assert_eq!(doc.tables().next().unwrap().caption.as_deref(), Some("Table 2: X"));
    }

    #[test]
    fn short_rows_are_padded() {
        let els = vec![RawElement::table(0, grid(&[&["a", "b"], &["1"]]))];
        let doc = assemble_document("d", "", els).unwrap();
        let t = doc.tables().next().unwrap();
        assert_eq!(t.rows, grid(&[&["1", ""]]));
    }
}
