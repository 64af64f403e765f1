//! OOXML WordprocessingML reader.
//!
//! Only the main document part, the style part and the core properties are
//! read. Page header and footer parts are never opened.

use std::collections::HashMap;
use std::io::{Cursor, Read};

use roxmltree::Node;
use zip::ZipArchive;

use super::caption::{assemble_document, RawElement};
use super::IngestError;
use crate::docmodel::Document;

const W_NS: &str = "http://schemas.openxmlformats.org/wordprocessingml/2006/main";
const DEFAULT_MAIN_PART: &str = "word/document.xml";

type Archive<'a> = ZipArchive<Cursor<&'a [u8]>>;

/// Parses a .docx archive into a [`Document`] with the given id.
pub fn parse_docx(archive_bytes: &[u8], doc_id: &str) -> Result<Document, IngestError> {
    let mut archive =
        ZipArchive::new(Cursor::new(archive_bytes)).map_err(|e| IngestError::NotAZip(e.to_string()))?;

    let main_part = main_part_name(&mut archive)?;
    let main_xml = read_member(&mut archive, &main_part)?
        .ok_or_else(|| IngestError::MissingDocumentPart(main_part.clone()))?;

    let styles_part = match main_part.rsplit_once('/') {
        Some((dir, _)) => format!("{dir}/styles.xml"),
        None => "styles.xml".to_string(),
    };
    let styles = match read_member(&mut archive, &styles_part)? {
        Some(xml) => style_names(&xml, &styles_part)?,
        None => HashMap::new(),
    };
    let title = match read_member(&mut archive, "docProps/core.xml")? {
        Some(xml) => core_title(&xml)?,
        None => String::new(),
    };

    let xml = parse_xml(&main_xml, &main_part)?;
    let body = xml
        .root_element()
        .children()
        .find(|n| is_w(n, "body"))
        .ok_or_else(|| IngestError::MalformedXml {
            member: main_part.clone(),
            message: "no w:body element".into(),
        })?;

    let mut elements = Vec::new();
    collect_body_elements(body, &styles, &mut elements);
    assemble_document(doc_id, &title, elements)
}

fn main_part_name(archive: &mut Archive<'_>) -> Result<String, IngestError> {
    let Some(rels) = read_member(archive, "_rels/.rels")? else {
        return Ok(DEFAULT_MAIN_PART.to_string());
    };
    let doc = parse_xml(&rels, "_rels/.rels")?;
    let target = doc
        .descendants()
        .filter(|n| n.is_element() && n.tag_name().name() == "Relationship")
        .find(|n| {
            n.attribute("Type")
                .is_some_and(|t| t.ends_with("/officeDocument"))
        })
        .and_then(|n| n.attribute("Target"))
        .map(|t| t.trim_start_matches('/').to_string());
    Ok(target.unwrap_or_else(|| DEFAULT_MAIN_PART.to_string()))
}

fn read_member(archive: &mut Archive<'_>, name: &str) -> Result<Option<String>, IngestError> {
    let mut file = match archive.by_name(name) {
        Ok(f) => f,
        Err(zip::result::ZipError::FileNotFound) => return Ok(None),
        Err(e) => return Err(IngestError::NotAZip(format!("{name}: {e}"))),
    };
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes)
        .map_err(|e| IngestError::NotAZip(format!("{name}: {e}")))?;
    let text = String::from_utf8(bytes).map_err(|e| IngestError::MalformedXml {
        member: name.to_string(),
        message: e.to_string(),
    })?;
    Ok(Some(text.trim_start_matches('\u{feff}').to_string()))
}

fn parse_xml<'a>(text: &'a str, member: &str) -> Result<roxmltree::Document<'a>, IngestError> {
    let opts = roxmltree::ParsingOptions {
        allow_dtd: true,
        ..Default::default()
    };
    roxmltree::Document::parse_with_options(text, opts).map_err(|e| IngestError::MalformedXml {
        member: member.to_string(),
        message: e.to_string(),
    })
}

fn is_w(node: &Node, name: &str) -> bool {
    node.is_element() && node.tag_name().name() == name && node.tag_name().namespace() == Some(W_NS)
}

fn w_attr<'a>(node: &Node<'a, '_>, name: &str) -> Option<&'a str> {
    node.attribute((W_NS, name))
}

fn w_child<'a, 'i>(node: Node<'a, 'i>, name: &str) -> Option<Node<'a, 'i>> {
    node.children().find(|c| is_w(c, name))
}

/// styleId -> display name for paragraph styles.
fn style_names(xml: &str, member: &str) -> Result<HashMap<String, String>, IngestError> {
    let doc = parse_xml(xml, member)?;
    Ok(doc
        .root_element()
        .children()
        .filter(|n| is_w(n, "style"))
        .filter_map(|n| {
            let id = w_attr(&n, "styleId")?;
            let name = w_child(n, "name").and_then(|c| w_attr(&c, "val")).unwrap_or(id);
            Some((id.to_string(), name.to_string()))
        })
        .collect())
}

fn core_title(xml: &str) -> Result<String, IngestError> {
    let doc = parse_xml(xml, "docProps/core.xml")?;
    Ok(doc
        .descendants()
        .find(|n| n.is_element() && n.tag_name().name() == "title")
        .and_then(|n| n.text())
        .map(crate::docmodel::normalize_whitespace)
        .unwrap_or_default())
}

fn collect_body_elements(
    container: Node,
    styles: &HashMap<String, String>,
    out: &mut Vec<RawElement>,
) {
    for child in container.children().filter(Node::is_element) {
        if is_w(&child, "p") {
            let style = paragraph_style(child, styles);
            out.push(RawElement::paragraph(
                out.len(),
                paragraph_text(child),
                style.as_deref(),
            ));
        } else if is_w(&child, "tbl") {
            out.push(RawElement::table(out.len(), table_grid(child)));
        } else if is_w(&child, "sdt") {
            if let Some(content) = w_child(child, "sdtContent") {
                collect_body_elements(content, styles, out);
            }
        } else if is_w(&child, "customXml") {
            collect_body_elements(child, styles, out);
        }
    }
}

fn paragraph_style(p: Node, styles: &HashMap<String, String>) -> Option<String> {
    let id = w_child(p, "pPr")
        .and_then(|ppr| w_child(ppr, "pStyle"))
        .and_then(|s| w_attr(&s, "val"))?;
    Some(styles.get(id).cloned().unwrap_or_else(|| id.to_string()))
}

/// Visible text of a paragraph. Drawings and text boxes are skipped.
fn paragraph_text(p: Node) -> String {
    let mut out = String::new();
    push_run_text(p, &mut out);
    out
}

fn push_run_text(node: Node, out: &mut String) {
    for child in node.children().filter(Node::is_element) {
        let name = child.tag_name().name();
        match name {
            "drawing" | "pict" | "object" | "AlternateContent" | "txbxContent" | "pPr" | "rPr" => {}
            "t" if is_w(&child, "t") => out.push_str(child.text().unwrap_or("")),
            "tab" | "br" | "cr" if child.tag_name().namespace() == Some(W_NS) => out.push(' '),
            "noBreakHyphen" if child.tag_name().namespace() == Some(W_NS) => out.push('-'),
            _ => push_run_text(child, out),
        }
    }
}

/// Text of a table cell: every paragraph in it, nested tables included, in
/// document order joined by single spaces.
fn cell_text(tc: Node) -> String {
    let mut parts = Vec::new();
    for p in tc.descendants().filter(|n| is_w(n, "p")) {
        let t = paragraph_text(p);
        if !t.trim().is_empty() {
            parts.push(t);
        }
    }
    parts.join(" ")
}

enum VMerge {
    None,
    Restart,
    Continue,
}

fn table_grid(tbl: Node) -> Vec<Vec<String>> {
    let mut grid: Vec<Vec<String>> = Vec::new();
    for tr in row_nodes(tbl) {
        let mut row: Vec<String> = Vec::new();
        let trpr = w_child(tr, "trPr");
        let before = trpr
            .and_then(|p| w_child(p, "gridBefore"))
            .and_then(|g| w_attr(&g, "val"))
            .and_then(|v| v.parse::<usize>().ok())
            .unwrap_or(0);
        row.resize(before, String::new());

        for tc in cell_nodes(tr) {
            let tcpr = w_child(tc, "tcPr");
            let span = tcpr
                .and_then(|p| w_child(p, "gridSpan"))
                .and_then(|g| w_attr(&g, "val"))
                .and_then(|v| v.parse::<usize>().ok())
                .unwrap_or(1)
                .max(1);
            let vmerge = match tcpr.and_then(|p| w_child(p, "vMerge")) {
                None => VMerge::None,
                Some(v) => match w_attr(&v, "val") {
                    Some("restart") => VMerge::Restart,
                    _ => VMerge::Continue,
                },
            };
            let col = row.len();
            let text = match vmerge {
                VMerge::Continue => grid
                    .last()
                    .and_then(|prev| prev.get(col))
                    .cloned()
                    .unwrap_or_default(),
                VMerge::None | VMerge::Restart => cell_text(tc),
            };
            for _ in 0..span {
                row.push(text.clone());
            }
        }
        grid.push(row);
    }
    grid
}

fn row_nodes<'a, 'i>(tbl: Node<'a, 'i>) -> Vec<Node<'a, 'i>> {
    let mut out = Vec::new();
    for child in tbl.children() {
        if is_w(&child, "tr") {
            out.push(child);
        } else if is_w(&child, "sdt") || is_w(&child, "customXml") {
            let inner = w_child(child, "sdtContent").unwrap_or(child);
            out.extend(row_nodes(inner));
        }
    }
    out
}

fn cell_nodes<'a, 'i>(tr: Node<'a, 'i>) -> Vec<Node<'a, 'i>> {
    let mut out = Vec::new();
    for child in tr.children() {
        if is_w(&child, "tc") {
            out.push(child);
        } else if is_w(&child, "sdt") || is_w(&child, "customXml") {
            let inner = w_child(child, "sdtContent").unwrap_or(child);
            out.extend(cell_nodes(inner));
        }
    }
    out
}
