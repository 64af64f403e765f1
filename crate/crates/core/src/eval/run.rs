use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use super::{judge_hit, EvalError, QAItem, QType};
use crate::chunker::{build_corpus, Chunk, ReprConfig};
use crate::docmodel::Document;
use crate::embed::{embed_batch, EmbedError, EmbeddingCache, EmbeddingProvider, ProviderDescriptor};
use crate::index::VectorIndex;

pub const DEFAULT_K: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuestionOutcome {
    pub qid: String,
    pub qtype: QType,
    pub hit: bool,
    pub first_gold_rank: Option<usize>,
}

/// Result of one (configuration, provider) cell. A failed cell carries the
/// error text and no outcomes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub config: ReprConfig,
    pub provider: ProviderDescriptor,
    pub k: usize,
    /// Percentage in [0, 100].
    pub overall_accuracy: f64,
    /// Only question types present in the QA set appear.
    pub per_type_accuracy: BTreeMap<QType, f64>,
    pub per_question: Vec<QuestionOutcome>,
    pub error: Option<String>,
}

impl RunReport {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }

    fn failure(config: ReprConfig, provider: ProviderDescriptor, k: usize, error: String) -> Self {
        RunReport {
            config,
            provider,
            k,
            overall_accuracy: 0.0,
            per_type_accuracy: BTreeMap::new(),
            per_question: Vec::new(),
            error: Some(error),
        }
    }
}

fn percent(hits: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        hits as f64 * 100.0 / total as f64
    }
}

/// Embeds every chunk with `provider` and loads the vectors into a fresh
/// index.
pub fn build_index(
    chunks: &[Chunk],
    provider: &dyn EmbeddingProvider,
    cache: Option<&EmbeddingCache>,
) -> Result<VectorIndex, EvalError> {
    let texts: Vec<&str> = chunks.iter().map(|c| c.text.as_str()).collect();
    let vectors = embed_batch(provider, &texts, cache).map_err(|source| EvalError::Provider {
        context: match &source {
            EmbedError::EmptyText(i) => format!("chunk {}", chunks[*i].chunk_id),
            _ => "corpus".to_string(),
        },
        source,
    })?;
    let mut index = VectorIndex::new(provider.descriptor().dim);
    for (c, v) in chunks.iter().zip(&vectors) {
        index.add(&c.chunk_id, v, c.provenance.clone())?;
    }
    Ok(index)
}

/// Top-k accuracy of `qa` against `index`.
pub fn evaluate_run(
    qa: &[QAItem],
    index: &VectorIndex,
    provider: &dyn EmbeddingProvider,
    k: usize,
    config: ReprConfig,
    cache: Option<&EmbeddingCache>,
) -> Result<RunReport, EvalError> {
    let tables: HashSet<&str> = index
        .entries()
        .filter_map(|(_, _, p)| p.table_id.as_deref())
        .collect();
    check_gold(qa, &tables)?;

    let questions: Vec<&str> = qa.iter().map(|q| q.question.as_str()).collect();
    let query_vecs = embed_batch(provider, &questions, cache).map_err(|source| EvalError::Provider {
        context: match &source {
            EmbedError::EmptyText(i) => format!("question {}", qa[*i].qid),
            _ => "questions".to_string(),
        },
        source,
    })?;

    let per_question = qa
        .par_iter()
        .zip(query_vecs.par_iter())
        .map(|(item, qv)| {
            let hits = index.topk(qv, k)?;
            let (hit, first_gold_rank) =
                judge_hit(&hits, |id| index.provenance(id), &item.gold_table_ids)?;
            Ok(QuestionOutcome {
                qid: item.qid.clone(),
                qtype: item.qtype,
                hit,
                first_gold_rank,
            })
        })
        .collect::<Result<Vec<_>, EvalError>>()?;

    let mut by_type: BTreeMap<QType, (usize, usize)> = BTreeMap::new();
    for o in &per_question {
        let e = by_type.entry(o.qtype).or_default();
        e.0 += o.hit as usize;
        e.1 += 1;
    }
    let hits = per_question.iter().filter(|o| o.hit).count();
    Ok(RunReport {
        config,
        provider: provider.descriptor().clone(),
        k,
        overall_accuracy: percent(hits, per_question.len()),
        per_type_accuracy: by_type
            .into_iter()
            .map(|(t, (h, n))| (t, percent(h, n)))
            .collect(),
        per_question,
        error: None,
    })
}

fn check_gold(qa: &[QAItem], tables: &HashSet<&str>) -> Result<(), EvalError> {
    for item in qa {
        if let Some(missing) = item
            .gold_table_ids
            .iter()
            .find(|g| !tables.contains(g.as_str()))
        {
            return Err(EvalError::GoldTableMissing {
                qid: item.qid.clone(),
                table_id: missing.clone(),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct GridOptions {
    /// Cells to run, in output order. Defaults to the full grid.
    pub configs: Vec<ReprConfig>,
    /// Run configurations concurrently.
    pub parallel: bool,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            configs: ReprConfig::grid().to_vec(),
            parallel: false,
        }
    }
}

/// Evaluates every configuration against every provider. Reports are
/// ordered configuration-major, provider-minor. A cell that fails is
/// reported with its error instead of aborting the grid; only invalid
/// inputs (no providers, invalid corpus, unresolvable gold ids) are errors.
pub fn run_grid(
    docs: &[Document],
    qa: &[QAItem],
    providers: &[&dyn EmbeddingProvider],
    k: usize,
    options: &GridOptions,
    cache: Option<&EmbeddingCache>,
) -> Result<Vec<RunReport>, EvalError> {
    if providers.is_empty() {
        return Err(EvalError::NoProviders);
    }
    let tables: HashSet<&str> = docs
        .iter()
        .flat_map(|d| d.tables().map(|t| t.table_id.as_str()))
        .collect();
    check_gold(qa, &tables)?;

    let run_config = |cfg: &ReprConfig| -> Result<Vec<RunReport>, EvalError> {
        let chunks = build_corpus(docs, cfg)?;
        Ok(providers
            .iter()
            .map(|p| {
                let outcome = build_index(&chunks, *p, cache)
                    .and_then(|index| evaluate_run(qa, &index, *p, k, *cfg, cache));
                outcome.unwrap_or_else(|e| {
                    log::warn!("grid cell {} / {} failed: {e}", cfg.label(), p.descriptor().name);
                    RunReport::failure(*cfg, p.descriptor().clone(), k, e.to_string())
                })
            })
            .collect())
    };

    let per_config: Vec<Vec<RunReport>> = if options.parallel {
        options
            .configs
            .par_iter()
            .map(run_config)
            .collect::<Result<_, _>>()?
    } else {
        options
            .configs
            .iter()
            .map(run_config)
            .collect::<Result<_, _>>()?
    };
    Ok(per_config.into_iter().flatten().collect())
}
