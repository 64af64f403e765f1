use std::collections::HashMap;
use std::io::{Read, Write};
use std::sync::RwLock;

use sha2::{Digest, Sha256};

use super::{EmbedError, EmbeddingVector};

const MAGIC: &[u8; 4] = b"TBRC";
const VERSION: u32 = 1;

type Key = [u8; 32];

/// Embedding cache keyed by provider name and SHA-256 of the text.
///
/// Readers proceed concurrently; inserts take the write lock.
#[derive(Debug, Default)]
pub struct EmbeddingCache {
    inner: RwLock<HashMap<String, HashMap<Key, EmbeddingVector>>>,
}

fn key(text: &str) -> Key {
    Sha256::digest(text.as_bytes()).into()
}

impl EmbeddingCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, provider: &str, text: &str) -> Option<EmbeddingVector> {
        let map = self.inner.read().expect("cache lock poisoned");
        map.get(provider)?.get(&key(text)).cloned()
    }

    pub fn insert(&self, provider: &str, text: &str, v: EmbeddingVector) {
        let mut map = self.inner.write().expect("cache lock poisoned");
        map.entry(provider.to_string()).or_default().insert(key(text), v);
    }

    pub fn len(&self) -> usize {
        let map = self.inner.read().expect("cache lock poisoned");
        map.values().map(HashMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Binary layout: magic `TBRC`, u32 version, u64 entry count, then per
    /// entry u32 name length, name bytes, 32-byte key, u32 dim and `dim`
    /// f64 values. Integers and floats are little-endian. Entries are sorted
    /// so identical caches serialize identically.
    pub fn save<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let map = self.inner.read().expect("cache lock poisoned");
        let mut entries: Vec<(&String, &Key, &EmbeddingVector)> = map
            .iter()
            .flat_map(|(p, m)| m.iter().map(move |(k, v)| (p, k, v)))
            .collect();
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(entries.len() as u64).to_le_bytes())?;
        for (name, k, v) in entries {
            w.write_all(&(name.len() as u32).to_le_bytes())?;
            w.write_all(name.as_bytes())?;
            w.write_all(k)?;
            w.write_all(&(v.dim() as u32).to_le_bytes())?;
            for x in v.values() {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        w.flush()
    }

    pub fn load<R: Read>(mut r: R) -> Result<Self, EmbedError> {
        let err = |what: &str| EmbedError::Cache(format!("corrupt cache file: {what}"));
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)
            .map_err(|e| EmbedError::Cache(e.to_string()))?;
        let mut rd = crate::binio::Reader::new(&buf);
        if rd.take(4).ok_or_else(|| err("magic"))? != MAGIC {
            return Err(err("magic"));
        }
        let version = rd.u32().ok_or_else(|| err("version"))?;
        if version != VERSION {
            return Err(EmbedError::Cache(format!("unsupported cache version {version}")));
        }
        let count = rd.u64().ok_or_else(|| err("count"))?;
        let cache = EmbeddingCache::new();
        {
            let mut map = cache.inner.write().expect("cache lock poisoned");
            for _ in 0..count {
                let name = rd.string().ok_or_else(|| err("provider name"))?;
                let k: Key = rd
                    .take(32)
                    .ok_or_else(|| err("key"))?
                    .try_into()
                    .expect("32 bytes");
                let dim = rd.u32().ok_or_else(|| err("dim"))? as usize;
                let values = rd.f64s(dim).ok_or_else(|| err("vector"))?;
                let v = EmbeddingVector::from_unit(values)?;
                map.entry(name).or_default().insert(k, v);
            }
        }
        if !rd.is_empty() {
            return Err(err("trailing bytes"));
        }
        Ok(cache)
    }
}
