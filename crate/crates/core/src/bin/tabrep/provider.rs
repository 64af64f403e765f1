use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::Context;
use tabrep::embed::{
    EmbeddingCache, EmbeddingProvider, HashEmbedder, ProviderDescriptor, RemoteEmbedder, DEFAULT_HASH_DIM,
};

use crate::args::{ProviderArgs, URL_ENV};
use crate::UsageError;

/// Parses `hash[:dim]` or `remote:<model>[:dim]`. Model names may contain
/// `/` but not `:`.
pub fn parse_spec(spec: &str, url: Option<&str>) -> Result<Box<dyn EmbeddingProvider>, UsageError> {
    let bad = |msg: String| UsageError(format!("provider {spec:?}: {msg}"));
    let parse_dim = |s: &str| s.parse::<usize>().map_err(|_| bad(format!("invalid dimension {s:?}")));
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["hash"] => Ok(Box::new(HashEmbedder::new(DEFAULT_HASH_DIM).expect("default dim"))),
        ["hash", d] => Ok(Box::new(HashEmbedder::new(parse_dim(d)?).map_err(|e| bad(e.to_string()))?)),
        ["remote", model, rest @ ..] if !model.is_empty() && rest.len() <= 1 => {
            let dim = rest.first().map(|d| parse_dim(d)).transpose()?;
            let desc = ProviderDescriptor::remote(model, dim).map_err(|e| bad(e.to_string()))?;
            let url = url.ok_or_else(|| bad(format!("no service URL (set --embed-url or {URL_ENV})")))?;
            Ok(Box::new(RemoteEmbedder::new(desc, url)))
        }
        _ => Err(bad("expected hash[:dim] or remote:<model>[:dim]".into())),
    }
}

pub struct Providers {
    pub list: Vec<Box<dyn EmbeddingProvider>>,
    pub cache: EmbeddingCache,
    cache_path: Option<std::path::PathBuf>,
}

impl Providers {
    pub fn from_args(a: &ProviderArgs) -> anyhow::Result<Self> {
        let mut list = Vec::new();
        for spec in &a.providers {
            list.push(parse_spec(spec, a.embed_url.as_deref())?);
        }
        let mut names: Vec<&str> = list.iter().map(|p| p.descriptor().name.as_str()).collect();
        names.sort();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(UsageError("the same provider is listed twice".into()).into());
        }
        let cache = match &a.cache {
            Some(p) if p.exists() => {
                let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
                EmbeddingCache::load(std::io::BufReader::new(f))
                    .with_context(|| format!("reading cache {}", p.display()))?
            }
            _ => EmbeddingCache::new(),
        };
        Ok(Providers {
            list,
            cache,
            cache_path: a.cache.clone(),
        })
    }

    pub fn single(&self) -> Result<&dyn EmbeddingProvider, UsageError> {
        match self.list.as_slice() {
            [p] => Ok(p.as_ref()),
            _ => Err(UsageError("exactly one --provider is required".into())),
        }
    }

    pub fn refs(&self) -> Vec<&dyn EmbeddingProvider> {
        self.list.iter().map(|p| p.as_ref()).collect()
    }

    pub fn save_cache(&self) -> anyhow::Result<()> {
        if let Some(p) = &self.cache_path {
            write_atomic(p, |w| self.cache.save(w))?;
        }
        Ok(())
    }
}

/// Writes via a temporary sibling file and a rename so readers never see a
/// partial file.
pub fn write_atomic(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> anyhow::Result<()> {
    let tmp = path.with_extension("tmp~");
    let mut w = BufWriter::new(File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?);
    f(&mut w).with_context(|| format!("writing {}", tmp.display()))?;
    w.into_inner()
        .map_err(|e| e.into_error())
        .and_then(|f| f.sync_all())
        .with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs() {
        assert_eq!(parse_spec("hash", None).unwrap().descriptor().dim, 256);
        assert_eq!(parse_spec("hash:64", None).unwrap().descriptor().name, "hash-64");
        let r = parse_spec("remote:all-MiniLM-L6-v2", Some("http://x")).unwrap();
        assert_eq!(r.descriptor().dim, 384);
        assert_eq!(parse_spec("remote:custom:12", Some("http://x")).unwrap().descriptor().dim, 12);
        assert!(parse_spec("remote:custom", Some("http://x")).is_err());
        assert!(parse_spec("remote:bge-m3", None).is_err());
        assert!(parse_spec("hash:4", None).is_err());
        assert!(parse_spec("hash:x", None).is_err());
        assert!(parse_spec("bert", None).is_err());
    }
}
