//! Command-line surface and the optional TOML config file. A value given on
//! the command line always wins over the file; the file wins over built-in
//! defaults.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use tabrep::chunker::{ChunkLevel, ReprConfig, Separator};
use tabrep::eval::DEFAULT_K;

use crate::UsageError;

pub const URL_ENV: &str = "TABREP_EMBED_URL";

#[derive(Debug, Parser)]
#[command(name = "tabrep", version, about = "Table-aware retrieval benchmark harness")]
pub struct Cli {
    /// TOML file with default option values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse .docx (or normalized .json) files into normalized JSON.
    Ingest(IngestArgs),
    /// Print corpus statistics.
    Stats(StatsArgs),
    /// Build the chunk corpus for one representation.
    Chunk(ChunkArgs),
    /// Embed chunk texts into a cache file.
    Embed(EmbedArgs),
    /// Embed chunks and write a vector index.
    Index(IndexArgs),
    /// Run one question against an index.
    Query(QueryArgs),
    /// Top-k accuracy of one representation and provider.
    Evaluate(EvaluateArgs),
    /// Evaluate every representation against every provider.
    Grid(GridArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Files or directories; directories are searched recursively for .docx.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Continue past files that fail to parse.
    #[arg(long)]
    pub keep_going: bool,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub corpus: PathBuf,
    /// Also write the statistics as JSON.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct ReprArgs {
    #[arg(long, value_name = "row|table")]
    pub chunk_level: Option<ChunkLevel>,
    #[arg(long, value_name = "pipe|space")]
    pub separator: Option<Separator>,
    /// Prefix every cell with its column header.
    #[arg(long)]
    pub repeat_header: bool,
    /// Add paragraph sentences to the corpus.
    #[arg(long)]
    pub include_text: bool,
}

#[derive(Debug, Args, Clone)]
pub struct ProviderArgs {
    /// `hash[:dim]` or `remote:<model>[:dim]`. Repeatable for `grid`.
    #[arg(long = "provider", short = 'p', value_name = "SPEC")]
    pub providers: Vec<String>,
    /// Base URL of the embedding service.
    #[arg(long, env = URL_ENV)]
    pub embed_url: Option<String>,
    /// Embedding cache file, read if present and rewritten afterwards.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ChunkArgs {
    pub corpus: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
    #[command(flatten)]
    pub repr: ReprArgs,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Chunk JSONL written by `chunk`.
    pub chunks: PathBuf,
    #[command(flatten)]
    pub provider: ProviderArgs,
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    pub chunks: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
    #[command(flatten)]
    pub provider: ProviderArgs,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long)]
    pub index: PathBuf,
    pub question: String,
    #[arg(short)]
    pub k: Option<usize>,
    /// Write hits as JSON.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub provider: ProviderArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub qa: PathBuf,
    #[arg(short)]
    pub k: Option<usize>,
    /// Output directory for report.csv and run.json.
    #[arg(long, short)]
    pub out: PathBuf,
    #[command(flatten)]
    pub repr: ReprArgs,
    #[command(flatten)]
    pub provider: ProviderArgs,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub qa: PathBuf,
    #[arg(short)]
    pub k: Option<usize>,
    /// Output directory for report.csv and figure3_data.json.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Comma-separated filter over row, table, pipe, space, header,
    /// noheader, text, notext. A cell runs when it matches every token.
    #[arg(long)]
    pub configs: Option<String>,
    /// Evaluate configurations concurrently.
    #[arg(long)]
    pub parallel: bool,
    #[command(flatten)]
    pub provider: ProviderArgs,
}

/// Keys accepted in the config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub k: Option<usize>,
    pub providers: Option<Vec<String>>,
    pub embed_url: Option<String>,
    pub cache: Option<PathBuf>,
    pub chunk_level: Option<ChunkLevel>,
    pub separator: Option<Separator>,
    pub repeat_header: Option<bool>,
    pub include_text: Option<bool>,
    pub configs: Option<String>,
    pub keep_going: Option<bool>,
    pub parallel: Option<bool>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, UsageError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("config file {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| UsageError(format!("config file {}: {e}", path.display())))
    }

    pub fn k(&self, flag: Option<usize>) -> Result<usize, UsageError> {
        let k = flag.or(self.k).unwrap_or(DEFAULT_K);
        if k == 0 {
            return Err(UsageError("k must be at least 1".into()));
        }
        Ok(k)
    }

    pub fn repr(&self, a: &ReprArgs) -> ReprConfig {
        ReprConfig {
            chunk_level: a.chunk_level.or(self.chunk_level).unwrap_or(ChunkLevel::Row),
            separator: a.separator.or(self.separator).unwrap_or(Separator::Pipe),
            repeat_header: a.repeat_header || self.repeat_header.unwrap_or(false),
            include_text: a.include_text || self.include_text.unwrap_or(false),
        }
    }

    pub fn providers(&self, a: &ProviderArgs) -> ProviderArgs {
        ProviderArgs {
            providers: if a.providers.is_empty() {
                self.providers.clone().unwrap_or_else(|| vec!["hash".into()])
            } else {
                a.providers.clone()
            },
            embed_url: a.embed_url.clone().or_else(|| self.embed_url.clone()),
            cache: a.cache.clone().or_else(|| self.cache.clone()),
        }
    }
}

/// Grid cells matching every token of `filter`.
type Pred = Box<dyn Fn(&ReprConfig) -> bool>;

pub fn select_configs(filter: Option<&str>) -> Result<Vec<ReprConfig>, UsageError> {
    let grid = ReprConfig::grid();
    let Some(filter) = filter else {
        return Ok(grid.to_vec());
    };
    let mut preds: Vec<Pred> = Vec::new();
    for tok in filter.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        preds.push(match tok {
            "row" => Box::new(|c| c.chunk_level == ChunkLevel::Row),
            "table" => Box::new(|c| c.chunk_level == ChunkLevel::Table),
            "pipe" => Box::new(|c| c.separator == Separator::Pipe),
            "space" => Box::new(|c| c.separator == Separator::Space),
            "header" => Box::new(|c| c.repeat_header),
            "noheader" => Box::new(|c| !c.repeat_header),
            "text" => Box::new(|c| c.include_text),
            "notext" => Box::new(|c| !c.include_text),
            other => return Err(UsageError(format!("unknown --configs token {other:?}"))),
        });
    }
    let out: Vec<ReprConfig> = grid.into_iter().filter(|c| preds.iter().all(|p| p(c))).collect();
    if out.is_empty() {
        return Err(UsageError(format!("--configs {filter:?} selects no configuration")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_filter() {
        assert_eq!(select_configs(Some("row,pipe")).unwrap().len(), 4);
        assert_eq!(select_configs(None).unwrap().len(), 16);
        assert_eq!(select_configs(Some("text")).unwrap().len(), 8);
        assert!(select_configs(Some("row,table")).is_err());
        assert!(select_configs(Some("bogus")).is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let file: FileConfig = toml::from_str("k = 10\nchunk_level = \"table\"\nrepeat_header = true").unwrap();
        assert_eq!(file.k(None).unwrap(), 10);
        assert_eq!(file.k(Some(3)).unwrap(), 3);
        let flags = ReprArgs {
            chunk_level: Some(ChunkLevel::Row),
            separator: None,
            repeat_header: false,
            include_text: false,
        };
        let cfg = file.repr(&flags);
        assert_eq!(cfg.chunk_level, ChunkLevel::Row);
        assert!(cfg.repeat_header);
        assert!(toml::from_str::<FileConfig>("nope = 1").is_err());
    }
}
