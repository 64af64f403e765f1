use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Serialize;
use walkdir::WalkDir;

use tabrep::chunker::{build_corpus, read_chunks_jsonl, split_sentences, write_chunks_jsonl, Chunk, ChunkKind};
use tabrep::docmodel::{corpus_stats, Document};
use tabrep::embed::embed_batch;
use tabrep::eval::{build_index, emit_report, evaluate_run, load_qa, run_grid, GridOptions, QAItem, ReportFormat};
use tabrep::index::VectorIndex;
use tabrep::ingest::{load_normalized, parse_docx, save_normalized};

use crate::args::*;
use crate::lock::DirLock;
use crate::provider::{write_atomic, Providers};
use crate::{Outcome, UsageError};

const SUMMARY_NAME: &str = "ingest_summary.json";

fn require_exists(p: &Path, what: &str) -> Result<(), UsageError> {
    if p.exists() {
        Ok(())
    } else {
        Err(UsageError(format!("{what} {} does not exist", p.display())))
    }
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    write_atomic(path, |w| w.write_all(text.as_bytes()))
}

fn has_ext(p: &Path, ext: &str) -> bool {
    p.extension().is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct IngestEntry {
    input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    doc_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tables: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    paragraphs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    captions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct IngestSummary {
    documents: usize,
    failures: usize,
    tables: usize,
    captioned_tables: usize,
    /// Share of tables that received a caption; `null` without tables.
    caption_hit_rate: Option<f64>,
    files: Vec<IngestEntry>,
}

fn ingest_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, UsageError> {
    let mut files = Vec::new();
    for input in inputs {
        require_exists(input, "input")?;
        if input.is_dir() {
            let mut found: Vec<PathBuf> = WalkDir::new(input)
                .into_iter()
                .filter_map(Result::ok)
                .filter(|e| e.file_type().is_file() && has_ext(e.path(), "docx"))
                // Word lock files (~$name.docx) are not documents.
                .filter(|e| !e.file_name().to_string_lossy().starts_with("~$"))
                .map(|e| e.into_path())
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(input.clone());
        }
    }
    Ok(files)
}

fn ingest_one(path: &Path) -> anyhow::Result<Document> {
    let doc_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .filter(|s| !s.is_empty())
        .context("file name has no stem")?;
    let bytes = std::fs::read(path)?;
    if has_ext(path, "json") {
        Ok(load_normalized(std::str::from_utf8(&bytes)?)?)
    } else {
        Ok(parse_docx(&bytes, &doc_id)?)
    }
}

pub fn ingest(a: &IngestArgs, file: &FileConfig) -> anyhow::Result<Outcome> {
    let keep_going = a.keep_going || file.keep_going.unwrap_or(false);
    let files = ingest_inputs(&a.inputs)?;
    if files.is_empty() {
        return Err(UsageError("no .docx files found in the inputs".into()).into());
    }
    let _lock = DirLock::acquire(&a.out)?;

    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    let mut fatal = None;
    for path in &files {
        let result = ingest_one(path).and_then(|doc| {
            if !seen.insert(doc.doc_id.clone()) {
                bail!("duplicate doc_id {}", doc.doc_id);
            }
            let out = a.out.join(format!("{}.json", doc.doc_id));
            write_text(&out, &save_normalized(&doc))?;
            Ok(doc)
        });
        let input = path.display().to_string();
        match result {
            Ok(doc) => {
                log::info!("{input}: {} tables", doc.tables().count());
                entries.push(IngestEntry {
                    input,
                    doc_id: Some(doc.doc_id.clone()),
                    tables: Some(doc.tables().count()),
                    paragraphs: Some(doc.paragraphs().count()),
                    captions: Some(doc.tables().filter(|t| t.caption.is_some()).count()),
                    error: None,
                });
            }
            Err(e) => {
                eprintln!("{input}: {e:#}");
                entries.push(IngestEntry {
                    input: input.clone(),
                    doc_id: None,
                    tables: None,
                    paragraphs: None,
                    captions: None,
                    error: Some(format!("{e:#}")),
                });
                if !keep_going {
                    fatal = Some(e.context(format!("ingesting {input}")));
                    break;
                }
            }
        }
    }

    let tables: usize = entries.iter().filter_map(|e| e.tables).sum();
    let captioned: usize = entries.iter().filter_map(|e| e.captions).sum();
    let summary = IngestSummary {
        documents: entries.iter().filter(|e| e.error.is_none()).count(),
        failures: entries.iter().filter(|e| e.error.is_some()).count(),
        tables,
        captioned_tables: captioned,
        caption_hit_rate: (tables > 0).then(|| captioned as f64 / tables as f64),
        files: entries,
    };
    write_text(
        &a.out.join(SUMMARY_NAME),
        &(serde_json::to_string_pretty(&summary)? + "\n"),
    )?;
    println!(
        "ingested {} of {} files: {} tables, {} with captions",
        summary.documents,
        files.len(),
        tables,
        captioned
    );
    if let Some(e) = fatal {
        return Err(e);
    }
    Ok(if summary.failures > 0 { Outcome::Partial } else { Outcome::Success })
}

// ---------------------------------------------------------------------------

/// Normalized documents directly inside `dir`, in file name order.
fn load_corpus(dir: &Path) -> anyhow::Result<Vec<Document>> {
    require_exists(dir, "corpus directory")?;
    if !dir.is_dir() {
        return Err(UsageError(format!("{} is not a directory", dir.display())).into());
    }
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.is_file() && has_ext(p, "json"))
        .filter(|p| p.file_name().is_some_and(|n| n != SUMMARY_NAME))
        .collect();
    paths.sort();
    let docs = paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            load_normalized(&text).with_context(|| format!("loading {}", p.display()))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    if docs.is_empty() {
        bail!("EmptyCorpus: no normalized documents in {}", dir.display());
    }
    Ok(docs)
}

pub fn stats(a: &StatsArgs) -> anyhow::Result<Outcome> {
    let docs = load_corpus(&a.corpus)?;
    let s = corpus_stats(&docs, |p| split_sentences(p).len());
    println!("documents  {}", s.num_documents);
    println!("tables     {}", s.num_tables);
    println!("sentences  {}", s.num_sentences);
    println!();
    println!("{:>8}  {:>8}", "rows", "tables");
    for (rows, n) in &s.row_count_histogram {
        println!("{rows:>8}  {n:>8}");
    }
    if let Some(out) = &a.out {
        let _lock = DirLock::for_file(out)?;
        write_text(out, &(serde_json::to_string_pretty(&s)? + "\n"))?;
    }
    Ok(Outcome::Success)
}

// ---------------------------------------------------------------------------

pub fn chunk(a: &ChunkArgs, file: &FileConfig) -> anyhow::Result<Outcome> {
    let cfg = file.repr(&a.repr);
    let docs = load_corpus(&a.corpus)?;
    let _lock = DirLock::for_file(&a.out)?;
    let chunks = build_corpus(&docs, &cfg)?;
    write_text(&a.out, &write_chunks_jsonl(&chunks))?;
    let mut by_kind: BTreeMap<ChunkKind, usize> = BTreeMap::new();
    for c in &chunks {
        *by_kind.entry(c.provenance.kind).or_default() += 1;
    }
    let parts: Vec<String> = by_kind.iter().map(|(k, n)| format!("{n} {k}")).collect();
    println!("{}: {} chunks ({})", cfg.label(), chunks.len(), parts.join(", "));
    Ok(Outcome::Success)
}

fn load_chunks(path: &Path) -> anyhow::Result<Vec<Chunk>> {
    require_exists(path, "chunk file")?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_chunks_jsonl(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn embed(a: &EmbedArgs, file: &FileConfig) -> anyhow::Result<Outcome> {
    let pa = file.providers(&a.provider);
    let Some(cache_path) = &pa.cache else {
        return Err(UsageError("embed needs --cache to store vectors in".into()).into());
    };
    let chunks = load_chunks(&a.chunks)?;
    let _lock = DirLock::for_file(cache_path)?;
    let providers = Providers::from_args(&pa)?;
    let before = providers.cache.len();
    for p in providers.refs() {
        let texts: Vec<&str> = chunks.iter().map(|c| c.text.as_str()).collect();
        embed_batch(p, &texts, Some(&providers.cache))
            .with_context(|| format!("embedding with {}", p.descriptor().name))?;
    }
    providers.save_cache()?;
    println!(
        "{} chunks, {} new vectors, cache holds {}",
        chunks.len(),
        providers.cache.len() - before,
        providers.cache.len()
    );
    Ok(Outcome::Success)
}

pub fn index(a: &IndexArgs, file: &FileConfig) -> anyhow::Result<Outcome> {
    let pa = file.providers(&a.provider);
    let chunks = load_chunks(&a.chunks)?;
    let providers = Providers::from_args(&pa)?;
    let p = providers.single()?;
    let _lock = DirLock::for_file(&a.out)?;
    let index = build_index(&chunks, p, Some(&providers.cache))?;
    write_atomic(&a.out, |w| w.write_all(&index.save()))?;
    providers.save_cache()?;
    println!("{} vectors of dim {} from {}", index.len(), index.dim(), p.descriptor().name);
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct QueryHit<'a> {
    rank: usize,
    score: f64,
    chunk_id: &'a str,
    #[serde(flatten)]
    provenance: &'a tabrep::Provenance,
}

pub fn query(a: &QueryArgs, file: &FileConfig) -> anyhow::Result<Outcome> {
    let k = file.k(a.k)?;
    let pa = file.providers(&a.provider);
    require_exists(&a.index, "index file")?;
    let providers = Providers::from_args(&pa)?;
    let p = providers.single()?;
    let bytes = std::fs::read(&a.index).with_context(|| format!("reading {}", a.index.display()))?;
    let index = VectorIndex::load(&bytes).with_context(|| format!("loading {}", a.index.display()))?;
    if index.dim() != p.descriptor().dim {
        bail!(
            "index has dimension {} but {} produces {}",
            index.dim(),
            p.descriptor().name,
            p.descriptor().dim
        );
    }
    let qv = embed_batch(p, &[a.question.as_str()], Some(&providers.cache))?.remove(0);
    let hits = index.topk(&qv, k)?;
    let rows: Vec<QueryHit> = hits
        .iter()
        .map(|h| QueryHit {
            rank: h.rank,
            score: h.score,
            chunk_id: &h.chunk_id,
            provenance: index.provenance(&h.chunk_id).expect("hit ids come from the index"),
        })
        .collect();
    for h in &rows {
        println!("{:>3}  {:.4}  {}", h.rank, h.score, h.chunk_id);
    }
    if let Some(out) = &a.out {
        let _lock = DirLock::for_file(out)?;
        write_text(out, &(serde_json::to_string_pretty(&rows)? + "\n"))?;
    }
    providers.save_cache()?;
    Ok(Outcome::Success)
}

// ---------------------------------------------------------------------------

fn load_qa_file(path: &Path) -> anyhow::Result<Vec<QAItem>> {
    require_exists(path, "QA file")?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    load_qa(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn evaluate(a: &EvaluateArgs, file: &FileConfig) -> anyhow::Result<Outcome> {
    let k = file.k(a.k)?;
    let cfg = file.repr(&a.repr);
    let pa = file.providers(&a.provider);
    require_exists(&a.corpus, "corpus directory")?;
    require_exists(&a.qa, "QA file")?;
    let providers = Providers::from_args(&pa)?;
    let p = providers.single()?;
    let docs = load_corpus(&a.corpus)?;
    let qa = load_qa_file(&a.qa)?;
    let _lock = DirLock::acquire(&a.out)?;

    let chunks = build_corpus(&docs, &cfg)?;
    let index = build_index(&chunks, p, Some(&providers.cache))?;
    let report = evaluate_run(&qa, &index, p, k, cfg, Some(&providers.cache))?;
    write_text(&a.out.join("report.csv"), &emit_report(std::slice::from_ref(&report), ReportFormat::Csv))?;
    write_text(&a.out.join("run.json"), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    providers.save_cache()?;

    let per_type: Vec<String> = report
        .per_type_accuracy
        .iter()
        .map(|(t, v)| format!("{t} {v:.1}"))
        .collect();
    println!(
        "{} / {}: top-{k} accuracy {:.1}% ({})",
        cfg.label(),
        p.descriptor().name,
        report.overall_accuracy,
        per_type.join(", ")
    );
    Ok(Outcome::Success)
}

pub fn grid(a: &GridArgs, file: &FileConfig) -> anyhow::Result<Outcome> {
    let k = file.k(a.k)?;
    let configs = crate::args::select_configs(a.configs.as_deref().or(file.configs.as_deref()))?;
    let pa = file.providers(&a.provider);
    require_exists(&a.corpus, "corpus directory")?;
    require_exists(&a.qa, "QA file")?;
    let providers = Providers::from_args(&pa)?;
    let docs = load_corpus(&a.corpus)?;
    let qa = load_qa_file(&a.qa)?;
    let _lock = DirLock::acquire(&a.out)?;

    let options = GridOptions {
        configs,
        parallel: a.parallel || file.parallel.unwrap_or(false),
    };
    let reports = run_grid(&docs, &qa, &providers.refs(), k, &options, Some(&providers.cache))?;
    write_text(&a.out.join("report.csv"), &emit_report(&reports, ReportFormat::Csv))?;
    write_text(
        &a.out.join("figure3_data.json"),
        &(emit_report(&reports, ReportFormat::GroupedBars) + "\n"),
    )?;
    providers.save_cache()?;

    let failed = reports.iter().filter(|r| r.failed()).count();
    let best = reports
        .iter()
        .filter(|r| !r.failed())
        .fold(None, |best: Option<&tabrep::RunReport>, r| match best {
            Some(b) if b.overall_accuracy >= r.overall_accuracy => Some(b),
            _ => Some(r),
        });
    println!("{} cells, {failed} failed", reports.len());
    if let Some(b) = best {
        println!(
            "best: {} / {} with top-{k} accuracy {:.1}%",
            b.config.label(),
            b.provider.name,
            b.overall_accuracy
        );
    }
    for r in reports.iter().filter(|r| r.failed()) {
        eprintln!(
            "failed: {} / {}: {}",
            r.config.label(),
            r.provider.name,
            r.error.as_deref().unwrap_or_default()
        );
    }
    Ok(if failed > 0 { Outcome::Partial } else { Outcome::Success })
}
