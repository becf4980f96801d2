//! Session storage keyed by gateway session id.

use std::collections::HashMap;
use std::sync::Mutex;

/// Sessions idle longer than this are never resumed.
pub const SESSION_TTL_SECS: u64 = 180;

/// Get/put/expire over compact session strings. The in-process map below is
/// the default; an external cache can stand behind the same calls.
pub trait SessionStore: Send + Sync {
    /// The stored string, unless it was last touched more than the TTL ago.
    fn get(&self, session_id: &str, now: u64) -> Option<String>;
    fn put(&self, session_id: &str, compact: String, now: u64);
    fn remove(&self, session_id: &str);
    /// Drops every expired entry.
    fn purge(&self, now: u64);
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug)]
pub struct MemoryStore {
    ttl: u64,
    inner: Mutex<Inner>,
}

#[derive(Debug, Default)]
struct Inner {
    entries: HashMap<String, (String, u64)>,
    puts: u64,
}

impl MemoryStore {
    pub fn new(ttl: u64) -> Self {
        Self { ttl, inner: Mutex::new(Inner::default()) }
    }

    fn expired(&self, last: u64, now: u64) -> bool {
        now.saturating_sub(last) > self.ttl
    }
}

impl Default for MemoryStore {
    fn default() -> Self {
        Self::new(SESSION_TTL_SECS)
    }
}

impl SessionStore for MemoryStore {
    fn get(&self, session_id: &str, now: u64) -> Option<String> {
        let mut inner = self.inner.lock().expect("session store poisoned");
        match inner.entries.get(session_id) {
            Some((_, last)) if self.expired(*last, now) => {
                inner.entries.remove(session_id);
                None
            }
            Some((compact, _)) => Some(compact.clone()),
            None => None,
        }
    }

    fn put(&self, session_id: &str, compact: String, now: u64) {
        let mut inner = self.inner.lock().expect("session store poisoned");
        inner.entries.insert(session_id.to_string(), (compact, now));
        inner.puts += 1;
        // sweep now and then so abandoned sessions do not pile up
        if inner.puts % 1024 == 0 {
            let ttl = self.ttl;
            inner.entries.retain(|_, (_, last)| now.saturating_sub(*last) <= ttl);
        }
    }

    fn remove(&self, session_id: &str) {
        self.inner.lock().expect("session store poisoned").entries.remove(session_id);
    }

    fn purge(&self, now: u64) {
        let ttl = self.ttl;
        self.inner
            .lock()
            .expect("session store poisoned")
            .entries
            .retain(|_, (_, last)| now.saturating_sub(*last) <= ttl);
    }

    fn len(&self) -> usize {
        self.inner.lock().expect("session store poisoned").entries.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ttl_boundary() {
        let store = MemoryStore::default();
        store.put("a", "x".into(), 1000);
        assert_eq!(store.get("a", 1180).as_deref(), Some("x"));
        assert_eq!(store.get("a", 1181), None);
        assert!(store.is_empty());
    }

    #[test]
    fn purge_keeps_live_entries() {
        let store = MemoryStore::new(10);
        store.put("old", "1".into(), 0);
        store.put("new", "2".into(), 15);
        store.purge(20);
        assert_eq!(store.len(), 1);
        assert_eq!(store.get("new", 20).as_deref(), Some("2"));
    }
}
