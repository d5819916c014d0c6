//! On-disk cache of intermediate results.
//!
//! Each entry is a CSV payload `<kind>.csv` plus a manifest
//! `<kind>.manifest.json` holding the schema version, the SHA-256 of the
//! payload and the fingerprint of the configuration that produced it. Both
//! files are written to a temporary name and renamed into place, and a
//! payload is only returned when its checksum matches the manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{ensure_dir, hex};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Gram,
    Boundaries,
    Zeros,
    Strips,
}

impl Kind {
    pub const ALL: [Kind; 4] = [Kind::Gram, Kind::Boundaries, Kind::Zeros, Kind::Strips];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Gram => "gram",
            Kind::Boundaries => "boundaries",
            Kind::Zeros => "zeros",
            Kind::Strips => "strips",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub kind: Kind,
    pub sha256: String,
    pub fingerprint: String,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Lookup {
    Hit(String),
    Absent,
    /// Present but written by another schema version or configuration.
    Stale(String),
    /// Manifest unreadable or checksum mismatch.
    Corrupt(String),
}

pub struct Cache {
    dir: PathBuf,
    write_lock: Mutex<()>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("")
    ));
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming {} into place", path.display()))
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            write_lock: Mutex::new(()),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn payload_path(&self, kind: Kind) -> PathBuf {
        self.dir.join(format!("{}.csv", kind.name()))
    }

    pub fn manifest_path(&self, kind: Kind) -> PathBuf {
        self.dir.join(format!("{}.manifest.json", kind.name()))
    }

    pub fn store(&self, kind: Kind, fingerprint: &str, payload: &str, rows: usize) -> Result<()> {
        let _guard = self.write_lock.lock().unwrap_or_else(|p| p.into_inner());
        ensure_dir(&self.dir)?;
        let manifest = Manifest {
            schema_version: SCHEMA_VERSION,
            kind,
            sha256: sha256_hex(payload.as_bytes()),
            fingerprint: fingerprint.to_string(),
            rows,
        };
        write_atomic(&self.payload_path(kind), payload.as_bytes())?;
        let json = serde_json::to_string_pretty(&manifest)?;
        write_atomic(&self.manifest_path(kind), json.as_bytes())
    }

    pub fn read_manifest(&self, kind: Kind) -> Result<Option<Manifest>, String> {
        let path = self.manifest_path(kind);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(format!("{}: {e}", path.display())),
        };
        serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Checks schema and checksum without regard to the configuration.
    pub fn check(&self, kind: Kind) -> Lookup {
        self.lookup(kind, None)
    }

    pub fn load(&self, kind: Kind, fingerprint: &str) -> Lookup {
        self.lookup(kind, Some(fingerprint))
    }

    fn lookup(&self, kind: Kind, fingerprint: Option<&str>) -> Lookup {
        let manifest = match self.read_manifest(kind) {
            Ok(Some(m)) => m,
            Ok(None) => return Lookup::Absent,
            Err(e) => return Lookup::Corrupt(e),
        };
        if manifest.schema_version != SCHEMA_VERSION || manifest.kind != kind {
            return Lookup::Stale(format!(
                "{} cache has schema {} (expected {SCHEMA_VERSION})",
                kind.name(),
                manifest.schema_version
            ));
        }
        if fingerprint.is_some_and(|f| f != manifest.fingerprint) {
            return Lookup::Stale(format!("{} cache was built with another configuration", kind.name()));
        }
        let path = self.payload_path(kind);
        let payload = match fs::read_to_string(&path) {
            Ok(p) => p,
            Err(e) => return Lookup::Corrupt(format!("{}: {e}", path.display())),
        };
        let actual = sha256_hex(payload.as_bytes());
        if actual != manifest.sha256 {
            return Lookup::Corrupt(format!(
                "{}: checksum mismatch (manifest {}, file {actual})",
                path.display(),
                manifest.sha256
            ));
        }
        Lookup::Hit(payload)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_checksum() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path().join("c"));
        assert_eq!(cache.load(Kind::Gram, "fp"), Lookup::Absent);
        cache.store(Kind::Gram, "fp", "n,g\n-1,9.6\n", 1).unwrap();
        assert_eq!(cache.load(Kind::Gram, "fp"), Lookup::Hit("n,g\n-1,9.6\n".into()));
        assert!(matches!(cache.load(Kind::Gram, "other"), Lookup::Stale(_)));
        assert!(matches!(cache.check(Kind::Gram), Lookup::Hit(_)));

        fs::write(cache.payload_path(Kind::Gram), "n,g\n-1,9.7\n").unwrap();
        assert!(matches!(cache.load(Kind::Gram, "fp"), Lookup::Corrupt(_)));
    }

    #[test]
    fn schema_mismatch_invalidates() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        cache.store(Kind::Strips, "fp", "m\n1\n", 1).unwrap();
        let text = fs::read_to_string(cache.manifest_path(Kind::Strips)).unwrap();
        let bumped = text.replace("\"schema_version\": 1", "\"schema_version\": 99");
        fs::write(cache.manifest_path(Kind::Strips), bumped).unwrap();
        assert!(matches!(cache.load(Kind::Strips, "fp"), Lookup::Stale(_)));
    }

    #[test]
    fn no_temporary_files_left() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        cache.store(Kind::Zeros, "fp", "j,t,strip_m\n", 0).unwrap();
        let names: Vec<String> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        assert!(names.iter().all(|n| !n.ends_with(".tmp")), "{names:?}");
        assert_eq!(names.len(), 2);
    }
}
