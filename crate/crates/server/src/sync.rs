//! Offline-client support: phone authorization and usage-log ingestion.

use std::collections::{HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use kichabi_core::logbatch::{decode_batch, encode_record, version_bytes, FacetLabels, LogError, PayloadDisplay};
use kichabi_core::msisdn::normalize_msisdn;
use kichabi_core::records::ActionLine;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::info;

use crate::gateway::Gateway;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthResponse {
    pub authorized: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phone: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// How many times this number has asked, this one included.
    pub attempts: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestResponse {
    pub accepted: usize,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("device phone is not authorized")]
    Unauthorized,
    #[error("batch belongs to {batch}, not to {device}")]
    PhoneMismatch { device: String, batch: String },
    #[error("invalid batch: {0}")]
    Decode(#[from] LogError),
    #[error("action store: {0}")]
    Io(#[from] io::Error),
}

impl IngestError {
    /// 1-based index of the offending record, for decode failures.
    pub fn record(&self) -> Option<usize> {
        match self {
            IngestError::Decode(e) => e.record(),
            _ => None,
        }
    }
}

/// Expanded, newline-delimited action log plus the keys of batches already
/// appended to it.
pub struct ActionStore {
    lines: Option<File>,
    keys: Option<File>,
    seen: HashSet<String>,
}

impl ActionStore {
    pub fn in_memory() -> Self {
        Self { lines: None, keys: None, seen: HashSet::new() }
    }

    /// Opens `path` for appending. Ingested batch keys live next to it in
    /// `<path>.batches` so duplicate detection survives restarts.
    pub fn open(path: &Path) -> io::Result<Self> {
        let keys_path = keys_path(path);
        let mut seen = HashSet::new();
        if keys_path.exists() {
            for line in BufReader::new(File::open(&keys_path)?).lines() {
                seen.insert(line?.trim().to_string());
            }
        }
        let append = |p: &Path| OpenOptions::new().create(true).append(true).open(p);
        Ok(Self { lines: Some(append(path)?), keys: Some(append(&keys_path)?), seen })
    }

    fn append(&mut self, key: String, lines: &[ActionLine]) -> io::Result<()> {
        if let Some(out) = self.lines.as_mut() {
            let mut text = String::new();
            for l in lines {
                text.push_str(&l.to_line());
                text.push('\n');
            }
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
        if let Some(out) = self.keys.as_mut() {
            writeln!(out, "{key}")?;
            out.flush()?;
        }
        self.seen.insert(key);
        Ok(())
    }
}

fn keys_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".batches");
    path.with_file_name(name)
}

pub struct SyncService {
    gateway: Arc<Gateway>,
    attempts: Mutex<HashMap<String, u64>>,
    store: Mutex<ActionStore>,
    /// Facet labels of every directory version served since startup.
    labels: Mutex<HashMap<[u8; 8], Arc<FacetLabels>>>,
}

impl SyncService {
    pub fn new(gateway: Arc<Gateway>, store: ActionStore) -> Self {
        Self { gateway, attempts: Mutex::new(HashMap::new()), store: Mutex::new(store), labels: Mutex::new(HashMap::new()) }
    }

    pub fn gateway(&self) -> &Arc<Gateway> {
        &self.gateway
    }

    pub fn authorize(&self, phone_raw: &str) -> AuthResponse {
        let normalized = normalize_msisdn(phone_raw);
        let key = match &normalized {
            Ok(m) => m.to_string(),
            Err(_) => phone_raw.trim().to_string(),
        };
        let attempts = {
            let mut map = self.attempts.lock().expect("attempts poisoned");
            let n = map.entry(key).or_default();
            *n += 1;
            *n
        };
        match normalized {
            Err(_) => AuthResponse { authorized: false, phone: None, reason: Some("invalid format".into()), attempts },
            Ok(m) if self.gateway.whitelist().contains(m.as_str()) => {
                AuthResponse { authorized: true, phone: Some(m.to_string()), reason: None, attempts }
            }
            Ok(m) => AuthResponse { authorized: false, phone: Some(m.to_string()), reason: Some("not enrolled".into()), attempts },
        }
    }

    pub fn attempts(&self, canonical: &str) -> u64 {
        self.attempts.lock().expect("attempts poisoned").get(canonical).copied().unwrap_or(0)
    }

    fn labels_for(&self, version: [u8; 8]) -> Option<Arc<FacetLabels>> {
        let loaded = self.gateway.current();
        let mut map = self.labels.lock().expect("labels poisoned");
        if version_bytes(loaded.version()) == Some(version) && !map.contains_key(&version) {
            map.insert(version, Arc::new(FacetLabels::new(loaded.directory())));
        }
        map.get(&version).cloned()
    }

    /// Decodes a whole batch and appends it to the action store. A batch seen
    /// before (same phone, base time, count and first record) is accepted as
    /// zero records.
    pub fn ingest(&self, phone_raw: &str, body: &[u8]) -> Result<IngestResponse, IngestError> {
        let device = self.gateway.admit(phone_raw).ok_or(IngestError::Unauthorized)?;
        let batch = decode_batch(body)?;
        if batch.msisdn.as_str() != device {
            return Err(IngestError::PhoneMismatch { device, batch: batch.msisdn.to_string() });
        }
        let Some(first) = batch.records.first() else {
            return Ok(IngestResponse { accepted: 0 });
        };
        let mut first_bytes = Vec::new();
        encode_record(&mut first_bytes, first, 1)?;
        let hex: String = first_bytes.iter().map(|b| format!("{b:02x}")).collect();
        let key = format!("{}:{}:{}:{}", device, batch.base_ts, batch.records.len(), hex);

        let labels = self.labels_for(batch.directory_version);
        let lines: Vec<ActionLine> = batch
            .timestamps()
            .into_iter()
            .zip(&batch.records)
            .map(|(ts, r)| ActionLine {
                ts,
                msisdn: device.clone(),
                action: r.action.name().to_string(),
                payload: PayloadDisplay { action: &r.action, labels: labels.as_deref() }.to_string(),
            })
            .collect();

        let mut store = self.store.lock().expect("action store poisoned");
        if store.seen.contains(&key) {
            info!(%device, "duplicate batch ignored");
            return Ok(IngestResponse { accepted: 0 });
        }
        store.append(key, &lines)?;
        info!(%device, records = lines.len(), "batch ingested");
        Ok(IngestResponse { accepted: lines.len() })
    }
}
