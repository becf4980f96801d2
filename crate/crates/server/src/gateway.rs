//! USSD gateway emulation: whitelist, TTL sessions, page cache, hit log.

use std::hash::{DefaultHasher, Hash, Hasher};
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use kichabi_core::directory::{decode_snapshot, encode_snapshot, SnapshotError};
use kichabi_core::msisdn::normalize_msisdn;
use kichabi_core::records::{HitRecord, REFUSED_NODE};
use kichabi_core::search::EvalMode;
use kichabi_core::session::{
    self, deserialize_session, serialize_session, PageSource, Screen, ScreenKind, StepEnv, Strings, Uncached,
};
use kichabi_core::{Catalog, Directory};
use serde::Deserialize;
use thiserror::Error;
use tracing::{debug, info};

use crate::cache::ScreenCache;
use crate::disclaimer::DisclaimerRegistry;
use crate::hitlog::HitLog;
use crate::store::{MemoryStore, SessionStore};
use crate::whitelist::Whitelist;

const LOCK_STRIPES: usize = 64;

/// One request as an aggregator would send it. `text` is every input of the
/// session so far joined by `*`.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct GatewayRequest {
    #[serde(rename = "sessionId")]
    pub session_id: String,
    #[serde(rename = "serviceCode", default)]
    pub service_code: String,
    #[serde(rename = "phoneNumber")]
    pub msisdn_raw: String,
    #[serde(default)]
    pub text: String,
}

impl GatewayRequest {
    pub fn new(session_id: &str, msisdn: &str, text: &str) -> Self {
        Self {
            session_id: session_id.to_string(),
            service_code: "*149*26#".to_string(),
            msisdn_raw: msisdn.to_string(),
            text: text.to_string(),
        }
    }

    /// Only the newest segment is consumed; the stored state is authoritative.
    pub fn last_segment(&self) -> &str {
        self.text.rsplit('*').next().unwrap_or("")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GatewayError {
    #[error("sessionId is empty")]
    EmptySessionId,
    #[error("phoneNumber is empty")]
    EmptyPhone,
}

#[derive(Debug, Error)]
pub enum ReloadError {
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
}

#[derive(Debug, Clone)]
pub struct GatewayConfig {
    /// `None` renders every page afresh.
    pub cache_capacity: Option<NonZeroUsize>,
    pub mode: EvalMode,
    pub strings: Strings,
}

impl Default for GatewayConfig {
    fn default() -> Self {
        Self { cache_capacity: NonZeroUsize::new(4096), mode: EvalMode::Indexed, strings: Strings::default() }
    }
}

/// A loaded directory with everything derived from it.
pub struct Loaded {
    pub catalog: Catalog,
    pub snapshot: Arc<Vec<u8>>,
}

impl Loaded {
    pub fn version(&self) -> &str {
        self.catalog.version()
    }

    pub fn directory(&self) -> &Directory {
        self.catalog.directory()
    }
}

pub struct Gateway {
    loaded: RwLock<Arc<Loaded>>,
    whitelist: RwLock<Arc<Whitelist>>,
    store: Box<dyn SessionStore>,
    cache: Option<ScreenCache>,
    hitlog: HitLog,
    disclaimers: DisclaimerRegistry,
    strings: Strings,
    mode: EvalMode,
    stripes: Vec<Mutex<()>>,
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

impl Gateway {
    pub fn new(directory: Directory, whitelist: Whitelist, config: GatewayConfig) -> Self {
        Self::with_parts(
            directory,
            whitelist,
            config,
            Box::new(MemoryStore::default()),
            HitLog::disabled(),
            DisclaimerRegistry::in_memory(),
        )
    }

    pub fn with_parts(
        directory: Directory,
        whitelist: Whitelist,
        config: GatewayConfig,
        store: Box<dyn SessionStore>,
        hitlog: HitLog,
        disclaimers: DisclaimerRegistry,
    ) -> Self {
        let loaded = Self::load(directory, config.mode);
        Self {
            loaded: RwLock::new(Arc::new(loaded)),
            whitelist: RwLock::new(Arc::new(whitelist)),
            store,
            cache: config.cache_capacity.map(ScreenCache::new),
            hitlog,
            disclaimers,
            strings: config.strings,
            mode: config.mode,
            stripes: (0..LOCK_STRIPES).map(|_| Mutex::new(())).collect(),
        }
    }

    fn load(directory: Directory, mode: EvalMode) -> Loaded {
        let snapshot = Arc::new(encode_snapshot(&directory));
        Loaded { catalog: Catalog::with_mode(directory, mode), snapshot }
    }

    pub fn current(&self) -> Arc<Loaded> {
        Arc::clone(&self.loaded.read().expect("directory lock poisoned"))
    }

    pub fn whitelist(&self) -> Arc<Whitelist> {
        Arc::clone(&self.whitelist.read().expect("whitelist lock poisoned"))
    }

    pub fn set_whitelist(&self, whitelist: Whitelist) {
        info!(numbers = whitelist.len(), "whitelist replaced");
        *self.whitelist.write().expect("whitelist lock poisoned") = Arc::new(whitelist);
    }

    /// Canonical form when the number is admitted.
    pub fn admit(&self, raw: &str) -> Option<String> {
        let m = normalize_msisdn(raw).ok()?;
        self.whitelist().contains(m.as_str()).then(|| m.to_string())
    }

    /// Swaps in a new directory. A bad snapshot leaves the old one serving.
    pub fn reload_directory(&self, snapshot: &[u8]) -> Result<String, ReloadError> {
        let directory = decode_snapshot(snapshot)?;
        let loaded = Self::load(directory, self.mode);
        let version = loaded.version().to_string();
        *self.loaded.write().expect("directory lock poisoned") = Arc::new(loaded);
        if let Some(cache) = &self.cache {
            cache.clear();
        }
        info!(%version, "directory reloaded");
        Ok(version)
    }

    pub fn cache(&self) -> Option<&ScreenCache> {
        self.cache.as_ref()
    }

    pub fn hitlog(&self) -> &HitLog {
        &self.hitlog
    }

    pub fn sessions(&self) -> &dyn SessionStore {
        self.store.as_ref()
    }

    pub fn disclaimers(&self) -> &DisclaimerRegistry {
        &self.disclaimers
    }

    pub fn strings(&self) -> &Strings {
        &self.strings
    }

    pub fn handle(&self, req: &GatewayRequest) -> Result<Screen, GatewayError> {
        self.handle_at(req, unix_now())
    }

    /// Same as [`Gateway::handle`] with an explicit clock.
    pub fn handle_at(&self, req: &GatewayRequest, now: u64) -> Result<Screen, GatewayError> {
        if req.session_id.is_empty() {
            return Err(GatewayError::EmptySessionId);
        }
        if req.msisdn_raw.trim().is_empty() {
            return Err(GatewayError::EmptyPhone);
        }
        let input = req.last_segment();
        let Some(msisdn) = self.admit(&req.msisdn_raw) else {
            let logged: String = req.msisdn_raw.chars().filter(char::is_ascii_digit).collect();
            self.log(now, req, &logged, REFUSED_NODE, input);
            return Ok(Screen { kind: ScreenKind::End, body: self.strings.get("refusal").to_string() });
        };

        let _guard = self.stripe(&req.session_id).lock().expect("session stripe poisoned");
        let loaded = self.current();
        let pages: &dyn PageSource = match &self.cache {
            Some(cache) => cache,
            None => &Uncached,
        };
        let env = StepEnv {
            catalog: &loaded.catalog,
            strings: &self.strings,
            pages,
            disclaimer_seen: self.disclaimers.seen(&msisdn),
            now,
        };

        let resumed = self
            .store
            .get(&req.session_id, now)
            .and_then(|compact| deserialize_session(&compact).ok())
            .filter(|s| s.msisdn == msisdn);
        let (state, screen) = match resumed {
            Some(state) => {
                let out = session::step(&state, input, &env);
                if out.showed_disclaimer {
                    self.disclaimers.mark(&msisdn);
                }
                (out.state, out.screen)
            }
            None => {
                debug!(session = %req.session_id, "new session");
                session::start(&msisdn, &env)
            }
        };

        match screen.kind {
            ScreenKind::Continue => self.store.put(&req.session_id, serialize_session(&state), now),
            ScreenKind::End => self.store.remove(&req.session_id),
        }
        self.log(now, req, &msisdn, state.node.name(), input);
        Ok(screen)
    }

    fn stripe(&self, session_id: &str) -> &Mutex<()> {
        let mut h = DefaultHasher::new();
        session_id.hash(&mut h);
        &self.stripes[h.finish() as usize % self.stripes.len()]
    }

    fn log(&self, now: u64, req: &GatewayRequest, msisdn: &str, node: &str, input: &str) {
        self.hitlog.append(&HitRecord {
            ts: now,
            session_id: req.session_id.clone(),
            msisdn: msisdn.to_string(),
            node: node.to_string(),
            input: input.to_string(),
        });
    }
}
