use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChunkLevel {
    Table,
    Row,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Separator {
    Pipe,
    Space,
}

impl Separator {
    pub fn as_str(self) -> &'static str {
        match self {
            Separator::Pipe => " | ",
            Separator::Space => " ",
        }
    }
}

/// One cell of the representation grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReprConfig {
    pub chunk_level: ChunkLevel,
    pub separator: Separator,
    pub repeat_header: bool,
    pub include_text: bool,
}

impl ReprConfig {
    /// All 16 configurations: chunk level major, then separator, then header
    /// repetition, then text inclusion; `false` before `true`.
    pub fn grid() -> [ReprConfig; 16] {
        let mut out = [ReprConfig {
            chunk_level: ChunkLevel::Table,
            separator: Separator::Pipe,
            repeat_header: false,
            include_text: false,
        }; 16];
        let mut i = 0;
        for chunk_level in [ChunkLevel::Table, ChunkLevel::Row] {
            for separator in [Separator::Pipe, Separator::Space] {
                for repeat_header in [false, true] {
                    for include_text in [false, true] {
                        out[i] = ReprConfig {
                            chunk_level,
                            separator,
                            repeat_header,
                            include_text,
                        };
                        i += 1;
                    }
                }
            }
        }
        out
    }

    /// Short stable label, e.g. `row-pipe-header-text`.
    pub fn label(&self) -> String {
        format!(
            "{}-{}-{}-{}",
            self.chunk_level,
            self.separator,
            if self.repeat_header { "header" } else { "noheader" },
            if self.include_text { "text" } else { "notext" },
        )
    }
}

impl fmt::Display for ChunkLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChunkLevel::Table => "table",
            ChunkLevel::Row => "row",
        })
    }
}

impl fmt::Display for Separator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Separator::Pipe => "pipe",
            Separator::Space => "space",
        })
    }
}

impl FromStr for ChunkLevel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(ChunkLevel::Table),
            "row" => Ok(ChunkLevel::Row),
            _ => Err(format!("unknown chunk level {s:?} (expected row|table)")),
        }
    }
}

impl FromStr for Separator {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pipe" => Ok(Separator::Pipe),
            "space" => Ok(Separator::Space),
            _ => Err(format!("unknown separator {s:?} (expected pipe|space)")),
        }
    }
}
