//! Append-only hit log with a bounded flush interval.

use std::fs::OpenOptions;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use kichabi_core::records::HitRecord;
use tracing::warn;

/// The sink is flushed at least this often.
pub const FLUSH_EVERY: usize = 100;

pub struct HitLog {
    sink: Mutex<Sink>,
    written: AtomicU64,
    dropped: AtomicU64,
}

struct Sink {
    out: Option<BufWriter<Box<dyn Write + Send>>>,
    pending: usize,
}

impl HitLog {
    /// Discards every record without counting drops.
    pub fn disabled() -> Self {
        Self::with_writer(None)
    }

    pub fn to_writer(w: Box<dyn Write + Send>) -> Self {
        Self::with_writer(Some(w))
    }

    pub fn open(path: &Path) -> io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self::to_writer(Box::new(file)))
    }

    fn with_writer(w: Option<Box<dyn Write + Send>>) -> Self {
        Self {
            sink: Mutex::new(Sink { out: w.map(BufWriter::new), pending: 0 }),
            written: AtomicU64::new(0),
            dropped: AtomicU64::new(0),
        }
    }

    /// Never fails; a broken sink only bumps the drop counter.
    pub fn append(&self, record: &HitRecord) {
        let mut sink = self.sink.lock().expect("hit log poisoned");
        let Sink { out, pending } = &mut *sink;
        let Some(out) = out.as_mut() else { return };
        let mut line = record.to_line();
        line.push('\n');
        if let Err(e) = out.write_all(line.as_bytes()) {
            self.dropped.fetch_add(1, Ordering::Relaxed);
            warn!(error = %e, "hit log write failed");
            return;
        }
        self.written.fetch_add(1, Ordering::Relaxed);
        *pending += 1;
        if *pending >= FLUSH_EVERY {
            *pending = 0;
            if let Err(e) = out.flush() {
                warn!(error = %e, "hit log flush failed");
            }
        }
    }

    pub fn flush(&self) -> io::Result<()> {
        let mut sink = self.sink.lock().expect("hit log poisoned");
        sink.pending = 0;
        match sink.out.as_mut() {
            Some(out) => out.flush(),
            None => Ok(()),
        }
    }

    pub fn written(&self) -> u64 {
        self.written.load(Ordering::Relaxed)
    }

    pub fn dropped(&self) -> u64 {
        self.dropped.load(Ordering::Relaxed)
    }
}

impl Drop for HitLog {
    fn drop(&mut self) {
        let _ = self.flush();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[derive(Clone, Default)]
    struct Shared(Arc<Mutex<Vec<u8>>>);

    impl Write for Shared {
        fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
            self.0.lock().unwrap().extend_from_slice(buf);
            Ok(buf.len())
        }
        fn flush(&mut self) -> io::Result<()> {
            Ok(())
        }
    }

    struct Broken;

    impl Write for Broken {
        fn write(&mut self, _: &[u8]) -> io::Result<usize> {
            Err(io::Error::other("disk gone"))
        }
        fn flush(&mut self) -> io::Result<()> {
            Err(io::Error::other("disk gone"))
        }
    }

    fn record(i: u64) -> HitRecord {
        HitRecord { ts: i, session_id: "s".into(), msisdn: "255700000001".into(), node: "Welcome".into(), input: String::new() }
    }

    #[test]
    fn flushes_every_hundred() {
        let buf = Shared::default();
        let log = HitLog::to_writer(Box::new(buf.clone()));
        for i in 0..99 {
            log.append(&record(i));
        }
        assert!(buf.0.lock().unwrap().is_empty(), "small records stay buffered");
        log.append(&record(99));
        let text = String::from_utf8(buf.0.lock().unwrap().clone()).unwrap();
        assert_eq!(text.lines().count(), 100);
        assert_eq!(log.written(), 100);
    }

    #[test]
    fn broken_sink_counts_drops() {
        // BufWriter absorbs small writes, so push enough bytes to reach the sink
        let log = HitLog::to_writer(Box::new(Broken));
        for i in 0..2000 {
            log.append(&record(i));
        }
        assert!(log.dropped() > 0);
    }
}
