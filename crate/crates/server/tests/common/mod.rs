#![allow(dead_code)]

use std::collections::{HashMap, HashSet};
use std::io::{self, Write};
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};

use kichabi_core::directory::fixture::fifty;
use kichabi_core::search::EvalMode;
use kichabi_core::session::{self, Screen, ScreenKind, SessionState, StepEnv, Strings, Uncached};
use kichabi_core::{Catalog, Directory};
use kichabi_server::disclaimer::DisclaimerRegistry;
use kichabi_server::hitlog::HitLog;
use kichabi_server::store::{MemoryStore, SESSION_TTL_SECS};
use kichabi_server::{Gateway, GatewayConfig, GatewayRequest, Whitelist};

pub const PHONE: &str = "255712345678";
pub const T0: u64 = 1_700_000_000;

#[derive(Clone, Default)]
pub struct SharedBuf(pub Arc<Mutex<Vec<u8>>>);

impl SharedBuf {
    pub fn text(&self) -> String {
        String::from_utf8(self.0.lock().unwrap().clone()).unwrap()
    }
}

impl Write for SharedBuf {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.0.lock().unwrap().extend_from_slice(buf);
        Ok(buf.len())
    }
    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

pub fn config(cache: bool) -> GatewayConfig {
    GatewayConfig {
        cache_capacity: if cache { NonZeroUsize::new(1024) } else { None },
        mode: if cache { EvalMode::Indexed } else { EvalMode::Scan },
        strings: Strings::default(),
    }
}

pub fn gateway_with(directory: Directory, phones: &[&str], cache: bool) -> (Gateway, SharedBuf) {
    let buf = SharedBuf::default();
    let gw = Gateway::with_parts(
        directory,
        Whitelist::from_numbers(phones).unwrap(),
        config(cache),
        Box::new(MemoryStore::default()),
        HitLog::to_writer(Box::new(buf.clone())),
        DisclaimerRegistry::in_memory(),
    );
    (gw, buf)
}

pub fn fixture_gateway() -> (Gateway, SharedBuf) {
    gateway_with(fifty(), &[PHONE], true)
}

/// Dials and sends each input with cumulative text, one second apart.
pub fn dial(gw: &Gateway, session: &str, phone: &str, inputs: &[&str], start: u64) -> Vec<Screen> {
    let mut text = String::new();
    let mut out = vec![gw.handle_at(&GatewayRequest::new(session, phone, ""), start).unwrap()];
    for (i, input) in inputs.iter().enumerate() {
        if i > 0 {
            text.push('*');
        }
        text.push_str(input);
        out.push(gw.handle_at(&GatewayRequest::new(session, phone, &text), start + 1 + i as u64).unwrap());
    }
    out
}

/// Straightforward re-statement of the gateway contract over the pure
/// session functions, used as the oracle for randomized schedules.
pub struct Model {
    catalog: Catalog,
    strings: Strings,
    whitelist: HashSet<String>,
    sessions: HashMap<String, (SessionState, u64)>,
    seen: HashSet<String>,
}

impl Model {
    pub fn new(directory: Directory, whitelist: &[&str]) -> Self {
        Self {
            catalog: Catalog::new(directory),
            strings: Strings::default(),
            whitelist: whitelist.iter().map(|s| s.to_string()).collect(),
            sessions: HashMap::new(),
            seen: HashSet::new(),
        }
    }

    /// `phone` must already be canonical or obviously invalid.
    pub fn handle(&mut self, session: &str, phone: &str, input: &str, now: u64) -> Screen {
        if !self.whitelist.contains(phone) {
            return Screen { kind: ScreenKind::End, body: self.strings.get("refusal").to_string() };
        }
        let env = StepEnv {
            catalog: &self.catalog,
            strings: &self.strings,
            pages: &Uncached,
            disclaimer_seen: self.seen.contains(phone),
            now,
        };
        let live = self
            .sessions
            .get(session)
            .filter(|(s, last)| s.msisdn == phone && now - last <= SESSION_TTL_SECS)
            .map(|(s, _)| s.clone());
        let (state, screen) = match live {
            Some(s) => {
                let out = session::step(&s, input, &env);
                if out.showed_disclaimer {
                    self.seen.insert(phone.to_string());
                }
                (out.state, out.screen)
            }
            None => session::start(phone, &env),
        };
        if screen.kind == ScreenKind::End {
            self.sessions.remove(session);
        } else {
            self.sessions.insert(session.to_string(), (state, now));
        }
        screen
    }
}
