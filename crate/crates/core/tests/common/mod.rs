//! Helpers shared by the integration tests: an in-memory .docx writer,
//! fixture loaders and seeded random corpora.
#![allow(dead_code)]

use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tabrep::docmodel::{Block, Document, TableData};
use tabrep::eval::{load_qa, QAItem};
use tabrep::ingest::load_normalized;

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// The hand-written 3-document, 10-table corpus and its 20 questions.
pub fn synthetic_fixture() -> (Vec<Document>, Vec<QAItem>) {
    let dir = fixture_dir().join("synthetic");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    let docs = paths
        .iter()
        .map(|p| load_normalized(&std::fs::read_to_string(p).unwrap()).unwrap())
        .collect();
    let qa = load_qa(&std::fs::read_to_string(dir.join("qa.jsonl")).unwrap()).unwrap();
    (docs, qa)
}

// ---------------------------------------------------------------------------
// docx writer

const W_NS: &str = "http://schemas.openxmlformats.org/wordprocessingml/2006/main";

pub fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Body XML builder. Output is a minimal but well-formed WordprocessingML
/// package with styles, core properties and an optional page header part.
#[derive(Default)]
pub struct Docx {
    body: String,
    title: Option<String>,
    page_header: Option<String>,
}

impl Docx {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn title(mut self, t: &str) -> Self {
        self.title = Some(t.to_string());
        self
    }

    pub fn page_header(mut self, text: &str) -> Self {
        self.page_header = Some(text.to_string());
        self
    }

    pub fn para(mut self, text: &str) -> Self {
        self.body.push_str(&paragraph_xml(None, text));
        self
    }

    /// `style_id` must be one of the ids declared in the styles part
    /// (`Heading1`..`Heading3`, `Caption`, `Normal`).
    pub fn styled(mut self, style_id: &str, text: &str) -> Self {
        self.body.push_str(&paragraph_xml(Some(style_id), text));
        self
    }

    pub fn heading(self, level: u32, text: &str) -> Self {
        self.styled(&format!("Heading{level}"), text)
    }

    pub fn table(mut self, rows: &[&[&str]]) -> Self {
        self.body.push_str(&table_xml(rows));
        self
    }

    pub fn raw(mut self, xml: &str) -> Self {
        self.body.push_str(xml);
        self
    }

    pub fn build(&self) -> Vec<u8> {
        let mut files: Vec<(&str, String)> = vec![
            ("[Content_Types].xml", CONTENT_TYPES.to_string()),
            ("_rels/.rels", ROOT_RELS.to_string()),
            ("word/styles.xml", STYLES.to_string()),
            ("word/_rels/document.xml.rels", DOC_RELS.to_string()),
        ];
        let sect = if self.page_header.is_some() {
            r#"<w:sectPr><w:headerReference w:type="default" r:id="rIdHdr"/></w:sectPr>"#
        } else {
            "<w:sectPr/>"
        };
        files.push((
            "word/document.xml",
            format!(
                r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>
<w:document xmlns:w="{W_NS}" xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships"><w:body>{}{sect}</w:body></w:document>"#,
                self.body
            ),
        ));
        if let Some(h) = &self.page_header {
            files.push((
                "word/header1.xml",
                format!(r#"<w:hdr xmlns:w="{W_NS}">{}</w:hdr>"#, paragraph_xml(None, h)),
            ));
        }
        if let Some(t) = &self.title {
            files.push((
                "docProps/core.xml",
                format!(
                    r#"<cp:coreProperties xmlns:cp="http://schemas.openxmlformats.org/package/2006/metadata/core-properties" xmlns:dc="http://purl.org/dc/elements/1.1/"><dc:title>{}</dc:title></cp:coreProperties>"#,
                    xml_escape(t)
                ),
            ));
        }
        zip_files(&files)
    }
}

pub fn zip_files(files: &[(&str, String)]) -> Vec<u8> {
    let mut zw = zip::ZipWriter::new(std::io::Cursor::new(Vec::new()));
    let opts = zip::write::SimpleFileOptions::default()
        .compression_method(zip::CompressionMethod::Deflated);
    for (name, content) in files {
        zw.start_file(*name, opts).unwrap();
        zw.write_all(content.as_bytes()).unwrap();
    }
    zw.finish().unwrap().into_inner()
}

pub fn paragraph_xml(style_id: Option<&str>, text: &str) -> String {
    let ppr = style_id
        .map(|s| format!(r#"<w:pPr><w:pStyle w:val="{s}"/></w:pPr>"#))
        .unwrap_or_default();
    format!(
        r#"<w:p>{ppr}<w:r><w:t xml:space="preserve">{}</w:t></w:r></w:p>"#,
        xml_escape(text)
    )
}

pub fn cell_xml(text: &str) -> String {
    format!("<w:tc><w:tcPr/>{}</w:tc>", paragraph_xml(None, text))
}

pub fn table_xml(rows: &[&[&str]]) -> String {
    let mut s = String::from("<w:tbl><w:tblPr/>");
    for r in rows {
        s.push_str("<w:tr>");
        for c in *r {
            s.push_str(&cell_xml(c));
        }
        s.push_str("</w:tr>");
    }
    s.push_str("</w:tbl>");
    s
}

const CONTENT_TYPES: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types"><Default Extension="rels" ContentType="application/vnd.openxmlformats-package.relationships+xml"/><Default Extension="xml" ContentType="application/xml"/><Override PartName="/word/document.xml" ContentType="application/vnd.openxmlformats-officedocument.wordprocessingml.document.main+xml"/></Types>"#;

const ROOT_RELS: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships"><Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument" Target="word/document.xml"/><Relationship Id="rId2" Type="http://schemas.openxmlformats.org/package/2006/relationships/metadata/core-properties" Target="docProps/core.xml"/></Relationships>"#;

const DOC_RELS: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships"><Relationship Id="rIdHdr" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/header" Target="header1.xml"/></Relationships>"#;

const STYLES: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<w:styles xmlns:w="http://schemas.openxmlformats.org/wordprocessingml/2006/main">
<w:style w:type="paragraph" w:styleId="Normal"><w:name w:val="Normal"/></w:style>
<w:style w:type="paragraph" w:styleId="Heading1"><w:name w:val="heading 1"/></w:style>
<w:style w:type="paragraph" w:styleId="Heading2"><w:name w:val="heading 2"/></w:style>
<w:style w:type="paragraph" w:styleId="Heading3"><w:name w:val="heading 3"/></w:style>
<w:style w:type="paragraph" w:styleId="Caption"><w:name w:val="caption"/></w:style>
</w:styles>"#;

// ---------------------------------------------------------------------------
// random corpora

const WORDS: &[&str] = &[
    "latency", "carrier", "uplink", "downlink", "timer", "buffer", "grant", "slot", "frame",
    "beam", "power", "margin", "cell", "node", "device", "budget", "report", "counter",
    "spacing", "band", "layer", "scheduler", "handover", "paging", "session", "key",
    "slice", "profile", "threshold", "offset", "window", "symbol", "block", "code", "rate",
];

fn word(rng: &mut ChaCha8Rng) -> &'static str {
    WORDS.choose(rng).unwrap()
}

fn words(rng: &mut ChaCha8Rng, n: usize) -> String {
    (0..n).map(|_| word(rng)).collect::<Vec<_>>().join(" ")
}

/// Cell values are word pairs with a numeric suffix so they are never blank.
fn cell(rng: &mut ChaCha8Rng) -> String {
    format!("{} {}", word(rng), rng.gen_range(0..1000))
}

fn sentence(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(3..10);
    let mut s = words(rng, n);
    s[..1].make_ascii_uppercase();
    s.push('.');
    s
}

pub fn random_table(rng: &mut ChaCha8Rng, table_id: String) -> TableData {
    let width = rng.gen_range(1..=5);
    let n_rows = rng.gen_range(0..=8);
    let header = (0..width).map(|i| format!("{} {i}", word(rng))).collect();
    let rows = (0..n_rows)
        .map(|_| (0..width).map(|_| cell(rng)).collect())
        .collect();
    let caption = rng
        .gen_bool(0.5)
        .then(|| format!("Table {}: {}", rng.gen_range(1..50), words(rng, 3)));
    TableData {
        table_id,
        caption,
        header,
        rows,
        section_path: Vec::new(),
    }
}

/// A valid document mixing headings, multi-sentence paragraphs and tables.
pub fn random_document(rng: &mut ChaCha8Rng, doc_id: &str) -> Document {
    let mut blocks = Vec::new();
    let mut n_tables = 0;
    for _ in 0..rng.gen_range(0..12) {
        match rng.gen_range(0..4) {
            0 => blocks.push(Block::Heading {
                level: rng.gen_range(1..=3),
                text: words(rng, 2),
            }),
            1 | 2 => {
                let n = rng.gen_range(1..5);
                let text = (0..n).map(|_| sentence(rng)).collect::<Vec<_>>().join(" ");
                blocks.push(Block::Paragraph { text });
            }
            _ => {
                n_tables += 1;
                blocks.push(Block::Table(random_table(rng, format!("{doc_id}/t{n_tables}"))));
            }
        }
    }
    Document::new(doc_id, words(rng, 2), blocks)
}

pub fn random_corpus(rng: &mut ChaCha8Rng, n_docs: usize) -> Vec<Document> {
    (0..n_docs)
        .map(|i| random_document(rng, &format!("doc{i}")))
        .collect()
}

/// Questions built from cell values of random tables, so some are
/// answerable by token overlap and some are not.
pub fn random_qa(rng: &mut ChaCha8Rng, docs: &[Document], n: usize) -> Vec<QAItem> {
    let tables: Vec<&TableData> = docs.iter().flat_map(|d| d.tables()).collect();
    if tables.is_empty() {
        return Vec::new();
    }
    (0..n)
        .map(|i| {
            let t = tables.choose(rng).unwrap();
            let mut q = format!("what is the {}", t.header.choose(rng).unwrap());
            if let Some(row) = t.rows.choose(rng) {
                q.push_str(" for ");
                q.push_str(row.choose(rng).unwrap());
            }
            QAItem {
                qid: format!("q{i}"),
                question: q,
                gold_table_ids: vec![t.table_id.clone()],
                qtype: tabrep::eval::QType::ALL[i % 4],
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// providers

/// Returns preset vectors by exact text. Unknown texts are an error.
pub struct LookupProvider {
    pub descriptor: tabrep::embed::ProviderDescriptor,
    pub vectors: std::collections::HashMap<String, Vec<f64>>,
}

impl LookupProvider {
    pub fn new(dim: usize) -> Self {
        LookupProvider {
            descriptor: tabrep::embed::ProviderDescriptor::remote("lookup", Some(dim)).unwrap(),
            vectors: Default::default(),
        }
    }

    pub fn set(&mut self, text: &str, v: Vec<f64>) {
        assert_eq!(v.len(), self.descriptor.dim);
        self.vectors.insert(text.to_string(), v);
    }
}

impl tabrep::EmbeddingProvider for LookupProvider {
    fn descriptor(&self) -> &tabrep::embed::ProviderDescriptor {
        &self.descriptor
    }

    fn embed_raw(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, tabrep::embed::EmbedError> {
        texts
            .iter()
            .map(|t| {
                self.vectors.get(*t).cloned().ok_or_else(|| tabrep::embed::EmbedError::RemoteRejected {
                    status: 404,
                    message: format!("no vector for {t:?}"),
                })
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// mock embedding service

pub type Handler = dyn Fn(usize, &tabrep::embed::EmbedRequest) -> (u16, String) + Send + Sync;

/// Local HTTP server speaking the `/embed` protocol. The handler gets the
/// 0-based request number and the parsed request body. Every received
/// request is recorded.
pub struct MockService {
    pub url: String,
    server: std::sync::Arc<tiny_http::Server>,
    pub requests: std::sync::Arc<std::sync::Mutex<Vec<tabrep::embed::EmbedRequest>>>,
    thread: Option<std::thread::JoinHandle<()>>,
}

impl MockService {
    pub fn start(handler: Box<Handler>) -> Self {
        let server = std::sync::Arc::new(tiny_http::Server::http("127.0.0.1:0").unwrap());
        let port = server.server_addr().to_ip().unwrap().port();
        let requests = std::sync::Arc::new(std::sync::Mutex::new(Vec::new()));
        let (srv, log) = (server.clone(), requests.clone());
        let thread = std::thread::spawn(move || {
            for mut req in srv.incoming_requests() {
                let mut body = String::new();
                req.as_reader().read_to_string(&mut body).unwrap();
                let (status, reply) = if req.url() != "/embed" {
                    (404, r#"{"error":"not found"}"#.to_string())
                } else {
                    match serde_json::from_str::<tabrep::embed::EmbedRequest>(&body) {
                        Ok(parsed) => {
                            let n = {
                                let mut l = log.lock().unwrap();
                                l.push(parsed.clone());
                                l.len() - 1
                            };
                            handler(n, &parsed)
                        }
                        Err(e) => (400, serde_json::json!({ "error": e.to_string() }).to_string()),
                    }
                };
                let header =
                    tiny_http::Header::from_bytes(&b"Content-Type"[..], &b"application/json"[..]).unwrap();
                let _ = req.respond(
                    tiny_http::Response::from_string(reply)
                        .with_status_code(status)
                        .with_header(header),
                );
            }
        });
        MockService {
            url: format!("http://127.0.0.1:{port}"),
            server,
            requests,
            thread: Some(thread),
        }
    }

    /// A well-behaved service: hash embeddings scaled by 3 so the client
    /// has to renormalize.
    pub fn hashing(dim: usize) -> Self {
        Self::start(Box::new(move |_, req| {
            let vectors: Vec<Vec<f64>> = req
                .texts
                .iter()
                .map(|t| {
                    let v = tabrep::embed::hash_embed(t, dim)
                        .map(|v| v.into_values())
                        .unwrap_or_else(|_| vec![1.0; dim]);
                    v.into_iter().map(|x| 3.0 * x).collect()
                })
                .collect();
            (200, serde_json::json!({ "dim": dim, "vectors": vectors }).to_string())
        }))
    }

    pub fn request_count(&self) -> usize {
        self.requests.lock().unwrap().len()
    }
}

impl Drop for MockService {
    fn drop(&mut self) {
        self.server.unblock();
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}
