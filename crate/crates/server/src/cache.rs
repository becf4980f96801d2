//! Bounded LRU memo of rendered pages.

use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use kichabi_core::session::{PageKey, PageSource, RenderedPage};
use lru::LruCache;

pub struct ScreenCache {
    entries: Mutex<LruCache<PageKey, Arc<RenderedPage>>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl ScreenCache {
    pub fn new(capacity: NonZeroUsize) -> Self {
        Self { entries: Mutex::new(LruCache::new(capacity)), hits: AtomicU64::new(0), misses: AtomicU64::new(0) }
    }

    pub fn clear(&self) {
        self.entries.lock().expect("screen cache poisoned").clear();
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("screen cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }
}

impl PageSource for ScreenCache {
    fn page(&self, key: PageKey, build: &mut dyn FnMut() -> RenderedPage) -> Arc<RenderedPage> {
        if let Some(page) = self.entries.lock().expect("screen cache poisoned").get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Arc::clone(page);
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        // render outside the lock; a racing duplicate render is harmless
        let page = Arc::new(build());
        self.entries.lock().expect("screen cache poisoned").put(key, Arc::clone(&page));
        page
    }
}
