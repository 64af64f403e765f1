mod common;

use tabrep::chunker::{build_corpus, ChunkLevel, ReprConfig};
use tabrep::embed::{EmbedError, EmbeddingCache, EmbeddingProvider, HashEmbedder, ProviderDescriptor};
use tabrep::eval::{build_index, emit_report, evaluate_run, run_grid, EvalError, GridOptions, QAItem, QType, ReportFormat};
use tabrep::index::{IndexError, VectorIndex};

/// Hash embedder that refuses any text containing a marker, so it fails
/// only on corpora where that text is a chunk.
struct Picky {
    inner: HashEmbedder,
    marker: &'static str,
}

impl EmbeddingProvider for Picky {
    fn descriptor(&self) -> &ProviderDescriptor {
        self.inner.descriptor()
    }

    fn embed_raw(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, EmbedError> {
        if texts.iter().any(|t| t.contains(self.marker)) {
            return Err(EmbedError::RemoteRejected {
                status: 413,
                message: "payload too large".into(),
            });
        }
        self.inner.embed_raw(texts)
    }
}

#[test]
fn failing_cells_are_isolated() {
    let (docs, qa) = common::synthetic_fixture();
    // The full-table text of the modulation table only exists at TABLE
    // level with a space separator and no header repetition.
    let p = Picky {
        inner: HashEmbedder::default(),
        marker: "Scheme Bits per symbol\nQPSK",
    };
    let reports = run_grid(&docs, &qa, &[&p], 5, &GridOptions::default(), None).unwrap();
    assert_eq!(reports.len(), 16);
    let failed: Vec<String> = reports.iter().filter(|r| r.failed()).map(|r| r.config.label()).collect();
    assert_eq!(failed.len(), 2, "{failed:?}");
    assert!(failed.iter().all(|l| l.starts_with("table-space-noheader")));

    let csv = emit_report(&reports, ReportFormat::Csv);
    assert_eq!(csv.lines().filter(|l| l.ends_with(",true")).count(), 2);
}

#[test]
fn unresolvable_gold_table() {
    let (docs, mut qa) = common::synthetic_fixture();
    qa.push(QAItem {
        qid: "lost".into(),
        question: "where is it".into(),
        gold_table_ids: vec!["nowhere/t1".into()],
        qtype: QType::I,
    });
    let p = HashEmbedder::default();
    assert!(matches!(
        run_grid(&docs, &qa, &[&p], 5, &GridOptions::default(), None),
        Err(EvalError::GoldTableMissing { ref qid, .. }) if qid == "lost"
    ));
    let chunks = build_corpus(&docs, &ReprConfig::grid()[0]).unwrap();
    let index = build_index(&chunks, &p, None).unwrap();
    assert!(matches!(
        evaluate_run(&qa, &index, &p, 5, ReprConfig::grid()[0], None),
        Err(EvalError::GoldTableMissing { .. })
    ));
    assert!(matches!(
        run_grid(&docs, &qa[..1], &[], 5, &GridOptions::default(), None),
        Err(EvalError::NoProviders)
    ));
}

#[test]
fn small_accuracy_examples() {
    let (docs, qa) = common::synthetic_fixture();
    let p = HashEmbedder::default();
    let cfg = ReprConfig {
        chunk_level: ChunkLevel::Row,
        ..ReprConfig::grid()[0]
    };
    let index = build_index(&build_corpus(&docs, &cfg).unwrap(), &p, None).unwrap();

    // "default value of T310" puts the T310 row first.
    let r = evaluate_run(&qa[..1], &index, &p, 5, cfg, None).unwrap();
    assert_eq!(r.overall_accuracy, 100.0);
    assert_eq!(r.per_question[0].first_gold_rank, Some(1));

    let mut two = vec![qa[0].clone(), qa[0].clone()];
    two[1].qid = "wrong".into();
    two[1].gold_table_ids = vec!["core-security/t4".into()];
    let r = evaluate_run(&two, &index, &p, 1, cfg, None).unwrap();
    assert_eq!(r.per_type_accuracy[&QType::E], 50.0);
    assert_eq!(r.overall_accuracy, 50.0);
    assert_eq!(r.per_type_accuracy.len(), 1);
}

#[test]
fn index_and_cache_files_survive_a_round_trip() {
    let (docs, _) = common::synthetic_fixture();
    let p = HashEmbedder::new(64).unwrap();
    let cache = EmbeddingCache::new();
    let chunks = build_corpus(&docs, &ReprConfig::grid()[15]).unwrap();
    let index = build_index(&chunks, &p, Some(&cache)).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("index.bin");
    std::fs::write(&path, index.save()).unwrap();
    let back = VectorIndex::load(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(back.len(), chunks.len());
    for c in &chunks {
        assert_eq!(back.provenance(&c.chunk_id), Some(&c.provenance));
    }

    let mut bytes = Vec::new();
    cache.save(&mut bytes).unwrap();
    let cache2 = EmbeddingCache::load(bytes.as_slice()).unwrap();
    assert_eq!(cache2.len(), cache.len());
    let again = build_index(&chunks, &p, Some(&cache2)).unwrap();
    assert_eq!(again.save(), index.save());

    let mut corrupt = index.save();
    corrupt[0] = b'X';
    assert!(matches!(VectorIndex::load(&corrupt), Err(IndexError::CorruptIndexFile { .. })));
    let truncated = &index.save()[..100];
    assert!(matches!(VectorIndex::load(truncated), Err(IndexError::CorruptIndexFile { .. })));
}
