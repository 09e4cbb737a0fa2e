//! On-disk cache of reports, keyed by a SHA-256 digest of the subcommand,
//! its canonicalized inputs and the cap. Every computation is a pure
//! function of those, so entries never go stale.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::report::Report;

pub const CACHE_DIR_ENV: &str = "RHT_CACHE_DIR";

/// `$RHT_CACHE_DIR`, else `$XDG_CACHE_HOME/rht`, else `$HOME/.cache/rht`.
pub fn default_dir() -> Option<PathBuf> {
    if let Some(dir) = std::env::var_os(CACHE_DIR_ENV) {
        return Some(PathBuf::from(dir));
    }
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME") {
        return Some(PathBuf::from(dir).join("rht"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("rht"))
}

/// Content address of a request.
pub fn key(subcommand: &str, inputs: &[String], cap: Option<usize>) -> String {
    let mut h = Sha256::new();
    h.update(subcommand.as_bytes());
    h.update([0]);
    for input in inputs {
        h.update(input.as_bytes());
        h.update([0]);
    }
    h.update(format!("cap={cap:?}").as_bytes());
    hex::encode(h.finalize())
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: PathBuf) -> Self {
        Cache { dir }
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// A stored report, or `None` on a miss. Unreadable entries are
    /// reported through `warn` and treated as misses.
    pub fn lookup(&self, key: &str, warn: &mut dyn FnMut(String)) -> Option<Report> {
        let path = self.path(key);
        let text = fs::read_to_string(&path).ok()?;
        match serde_json::from_str(&text) {
            Ok(report) => Some(report),
            Err(e) => {
                warn(format!("ignoring corrupt cache entry {}: {e}", path.display()));
                None
            }
        }
    }

    /// Writes to a temporary file and renames it into place.
    pub fn store(&self, key: &str, report: &Report) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let target = self.path(key);
        let tmp = self.dir.join(format!("{key}.{}.tmp", std::process::id()));
        let mut f = fs::File::create(&tmp)?;
        f.write_all(report.to_json().as_bytes())?;
        f.sync_all()?;
        drop(f);
        fs::rename(&tmp, &target)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}
