//! On-disk cache of single-string compressions.
//!
//! Entries are archives of one string, named by the SHA-256 of the input, its data type
//! and the parameter fingerprint, so each distinct input is compressed at most once per
//! parameter set.

use std::fs;
use std::path::{Path, PathBuf};

use parselet_rd::RdParams;
use parselet_serialize::DataType;
use sha2::{Digest, Sha256};

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "PARSELET_CACHE";

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// `$PARSELET_CACHE`, else `$XDG_CACHE_HOME/parselet`, else `~/.cache/parselet`.
    pub fn from_env() -> Self {
        if let Some(d) = std::env::var_os(CACHE_ENV) {
            return Cache::new(d);
        }
        let base = std::env::var_os("XDG_CACHE_HOME")
            .map(PathBuf::from)
            .or_else(|| std::env::var_os("HOME").map(|h| Path::new(&h).join(".cache")))
            .unwrap_or_else(std::env::temp_dir);
        Cache::new(base.join("parselet"))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(data: &[u8], dtype: DataType, params: &RdParams) -> String {
        let mut h = Sha256::new();
        h.update(data);
        h.update(format!("{dtype:?}|{}", params.fingerprint()).as_bytes());
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.prsl"))
    }

    pub fn get(&self, key: &str) -> std::io::Result<Option<Vec<u8>>> {
        match fs::read(self.path(key)) {
            Ok(b) => Ok(Some(b)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Stores an entry; written to a temporary name first so readers never see a partial
    /// file.
    pub fn put(&self, key: &str, bytes: &[u8]) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let tmp = self.dir.join(format!(".{key}.{}.tmp", std::process::id()));
        fs::write(&tmp, bytes)?;
        fs::rename(tmp, self.path(key))
    }

    /// Keys and sizes of all entries.
    pub fn entries(&self) -> std::io::Result<Vec<(String, u64)>> {
        let mut out = Vec::new();
        let rd = match fs::read_dir(&self.dir) {
            Ok(rd) => rd,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(out),
            Err(e) => return Err(e),
        };
        for e in rd {
            let e = e?;
            let name = e.file_name().to_string_lossy().into_owned();
            if let Some(key) = name.strip_suffix(".prsl") {
                out.push((key.to_string(), e.metadata()?.len()));
            }
        }
        out.sort();
        Ok(out)
    }

    pub fn clear(&self) -> std::io::Result<usize> {
        let entries = self.entries()?;
        for (k, _) in &entries {
            fs::remove_file(self.path(k))?;
        }
        Ok(entries.len())
    }
}
