//! Per-msisdn record of who has already seen the disclaimer.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;

use tracing::warn;

/// In memory, optionally mirrored to an append-only file so the flag
/// survives restarts.
#[derive(Debug, Default)]
pub struct DisclaimerRegistry {
    inner: Mutex<(HashSet<String>, Option<File>)>,
}

impl DisclaimerRegistry {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn open(path: &Path) -> io::Result<Self> {
        let mut seen = HashSet::new();
        if path.exists() {
            for line in BufReader::new(File::open(path)?).lines() {
                let line = line?;
                if !line.trim().is_empty() {
                    seen.insert(line.trim().to_string());
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self { inner: Mutex::new((seen, Some(file))) })
    }

    pub fn seen(&self, msisdn: &str) -> bool {
        self.inner.lock().expect("registry poisoned").0.contains(msisdn)
    }

    /// Returns false when the number was already marked.
    pub fn mark(&self, msisdn: &str) -> bool {
        let mut inner = self.inner.lock().expect("registry poisoned");
        if !inner.0.insert(msisdn.to_string()) {
            return false;
        }
        if let Some(file) = inner.1.as_mut() {
            if let Err(e) = writeln!(file, "{msisdn}") {
                warn!(error = %e, "could not persist disclaimer flag");
            }
        }
        true
    }
}
