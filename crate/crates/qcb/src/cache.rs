//! Content-addressed on-disk cache with digest-checked payloads.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Bumped whenever cached payloads change meaning.
pub const ARTIFACT_VERSION: &str = "qcb-cache-1";

pub fn sha256_hex(data: &[u8]) -> String {
    Sha256::digest(data).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{:02x}", b);
        s
    })
}

/// Hash of (datum, operation, parameters, artifact version).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CacheKey(pub String);

impl CacheKey {
    pub fn new(datum: &str, op: &str, params: &str) -> Self {
        let mut text = String::new();
        for part in [ARTIFACT_VERSION, datum, op, params] {
            let _ = writeln!(text, "{}:{}", part.len(), part);
        }
        CacheKey(sha256_hex(text.as_bytes()))
    }
}

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    digest: String,
    body: String,
}

/// Outcome of a lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lookup {
    Hit(String),
    Miss,
    /// The entry exists but fails its digest; it will be rebuilt.
    Corrupt,
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    /// `--cache-dir`, else `QCB_CACHE_DIR`, else no caching.
    pub fn open(dir: Option<&Path>) -> Result<Self, CliError> {
        let dir = dir.map(Path::to_path_buf).or_else(|| std::env::var_os("QCB_CACHE_DIR").map(PathBuf::from));
        if let Some(d) = &dir {
            std::fs::create_dir_all(d).map_err(|e| CliError::Io(format!("cache directory {}: {}", d.display(), e)))?;
        }
        Ok(Cache { dir })
    }

    pub fn disabled() -> Self {
        Cache { dir: None }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn path(&self, key: &CacheKey) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.json", key.0)))
    }

    pub fn get(&self, key: &CacheKey) -> Lookup {
        let Some(p) = self.path(key) else { return Lookup::Miss };
        let Ok(text) = std::fs::read_to_string(&p) else { return Lookup::Miss };
        match serde_json::from_str::<Entry>(&text) {
            Ok(e) if e.key == key.0 && e.digest == sha256_hex(e.body.as_bytes()) => Lookup::Hit(e.body),
            _ => Lookup::Corrupt,
        }
    }

    /// Writes atomically: a temporary file in the cache directory is renamed
    /// over the entry.
    pub fn put(&self, key: &CacheKey, body: &str) -> Result<(), CliError> {
        let (Some(dir), Some(p)) = (&self.dir, self.path(key)) else { return Ok(()) };
        let entry = Entry { key: key.0.clone(), digest: sha256_hex(body.as_bytes()), body: body.to_string() };
        let io = |e: std::io::Error| CliError::Io(format!("cache write {}: {}", p.display(), e));
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
        tmp.write_all(serde_json::to_string(&entry).expect("entry serializes").as_bytes()).map_err(io)?;
        tmp.persist(&p).map_err(|e| io(e.error))?;
        Ok(())
    }

    /// Cached body for `key`, computing and storing it on a miss or a
    /// corrupt entry.
    pub fn get_or_insert_with<E>(&self, key: &CacheKey, f: impl FnOnce() -> Result<String, E>) -> Result<String, E>
    where
        E: From<CliError>,
    {
        if let Lookup::Hit(body) = self.get(key) {
            return Ok(body);
        }
        let body = f()?;
        self.put(key, &body)?;
        Ok(body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::open(Some(dir.path())).unwrap();
        let k = CacheKey::new("d", "op", "p");
        assert_eq!(c.get(&k), Lookup::Miss);
        c.put(&k, "payload").unwrap();
        assert_eq!(c.get(&k), Lookup::Hit("payload".into()));
        let p = dir.path().join(format!("{}.json", k.0));
        let text = std::fs::read_to_string(&p).unwrap().replace("payload", "tampered");
        std::fs::write(&p, text).unwrap();
        assert_eq!(c.get(&k), Lookup::Corrupt);
        let body: Result<String, CliError> = c.get_or_insert_with(&k, || Ok("payload".into()));
        assert_eq!(body.unwrap(), "payload");
        assert_eq!(c.get(&k), Lookup::Hit("payload".into()));
    }

    #[test]
    fn keys_separate_fields() {
        assert_ne!(CacheKey::new("ab", "c", ""), CacheKey::new("a", "bc", ""));
        assert_eq!(CacheKey::new("a", "b", "c"), CacheKey::new("a", "b", "c"));
        assert_eq!(sha256_hex(b"").len(), 64);
        assert!(sha256_hex(b"").starts_with("e3b0c442"));
    }
}
