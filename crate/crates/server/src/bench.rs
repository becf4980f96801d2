//! Scripted random walks through the gateway and latency measurement.

use std::hash::{DefaultHasher, Hash, Hasher};
use std::num::NonZeroUsize;
use std::time::Instant;

use kichabi_core::search::{tokenize, EvalMode};
use kichabi_core::session::{Screen, ScreenKind, Strings};
use kichabi_core::Directory;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gateway::{Gateway, GatewayConfig, GatewayRequest};
use crate::whitelist::Whitelist;

/// Upper bound on requests in one walk, the dial-in included.
pub const MAX_WALK_STEPS: usize = 40;
const PHONE_POOL: u64 = 64;
const BASE_TS: u64 = 1_700_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BenchMode {
    /// Indexed search with the page cache.
    On,
    /// Full scans, every page rendered afresh.
    Off,
    Both,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BenchError {
    #[error("walk count must be positive")]
    NoWalks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub mode: String,
    pub walks: usize,
    pub requests: usize,
    pub p50_ms: f64,
    pub p95_ms: f64,
    pub max_ms: f64,
    /// Hash over every response in order; equal across modes when the
    /// cache is transparent.
    pub transcript: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub seed: u64,
    pub businesses: usize,
    pub results: Vec<BenchResult>,
    /// cache-off p50 over cache-on p50, when both ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speedup: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcripts_match: Option<bool>,
}

/// Every phone a walk may dial from.
pub fn walk_phones() -> Vec<String> {
    (0..PHONE_POOL).map(|i| format!("2557{:08}", 10_000_000 + i)).collect()
}

pub fn gateway_for(directory: Directory, on: bool) -> Gateway {
    let config = GatewayConfig {
        cache_capacity: if on { NonZeroUsize::new(65_536) } else { None },
        mode: if on { EvalMode::Indexed } else { EvalMode::Scan },
        ..GatewayConfig::default()
    };
    Gateway::new(directory, Whitelist::from_numbers(walk_phones()).expect("canonical"), config)
}

/// Ordinals offered on a screen, in display order.
pub fn ordinals(body: &str) -> Vec<u32> {
    body.lines()
        .filter_map(|l| {
            let (n, rest) = l.split_once(". ")?;
            (!rest.is_empty()).then_some(())?;
            n.parse().ok()
        })
        .collect()
}

/// Picks inputs for a walk. Mostly follows offered choices towards a detail
/// screen, sometimes pages, backs out, jumps or types nonsense.
pub struct Walker {
    rng: ChaCha8Rng,
    words: Vec<String>,
    prompts: Vec<String>,
    /// Probability of an arbitrary, usually invalid, input.
    pub chaos: f64,
}

impl Walker {
    pub fn new(directory: &Directory, seed: u64) -> Self {
        let mut words: Vec<String> = directory
            .businesses()
            .iter()
            .flat_map(|b| tokenize(&b.name).into_iter().chain(tokenize(&b.village)).chain(b.products.iter().cloned()))
            .filter(|w| w.len() >= 3)
            .collect();
        words.sort();
        words.dedup();
        if words.is_empty() {
            words.push("duka".into());
        }
        let strings = Strings::default();
        let prompts = ["name", "location", "products", "owner"]
            .iter()
            .map(|k| strings.get(&format!("prompt.{k}")).to_string())
            .collect();
        Self { rng: ChaCha8Rng::seed_from_u64(seed), words, prompts, chaos: 0.03 }
    }

    pub fn phone(&mut self) -> String {
        walk_phones().swap_remove(self.rng.gen_range(0..PHONE_POOL as usize))
    }

    fn query(&mut self) -> String {
        let mut w: Vec<char> = self.words.choose(&mut self.rng).expect("non-empty").chars().collect();
        if self.rng.gen_bool(0.4) && w.len() > 3 {
            // one typo: drop, swap or replace
            let i = self.rng.gen_range(1..w.len() - 1);
            match self.rng.gen_range(0..3) {
                0 => {
                    w.remove(i);
                }
                1 => w.swap(i, i + 1),
                _ => w[i] = self.rng.gen_range(b'a'..=b'z') as char,
            }
        }
        w.into_iter().collect()
    }

    pub fn next_input(&mut self, screen: &Screen) -> String {
        if self.rng.gen_bool(self.chaos) {
            return match self.rng.gen_range(0..4) {
                0 => self.rng.gen_range(0..120).to_string(),
                1 => "99".into(),
                2 => "98".into(),
                _ => "#*x".into(),
            };
        }
        let offered = ordinals(&screen.body);
        let choices: Vec<u32> = offered.iter().copied().filter(|n| !matches!(n, 0 | 96 | 98 | 99)).collect();
        if offered.contains(&0) && (choices.is_empty() || self.rng.gen_bool(0.15)) {
            return "0".into();
        }
        if offered.contains(&96) && self.rng.gen_bool(0.1) {
            return "96".into();
        }
        if offered.contains(&99) && self.rng.gen_bool(0.05) {
            return "99".into();
        }
        if let Some(n) = choices.choose(&mut self.rng) {
            return n.to_string();
        }
        if self.prompts.iter().any(|p| screen.body.contains(p.as_str())) {
            return self.query();
        }
        // a text page with nothing to pick, such as the end of help
        "98".into()
    }
}

/// One response with the time the gateway took to produce it.
#[derive(Debug, Clone)]
pub struct Step {
    pub request: GatewayRequest,
    pub screen: Screen,
    pub nanos: u128,
}

/// Drives one walk to an End screen or [`MAX_WALK_STEPS`]. `clock` is
/// advanced by one second per request.
pub fn walk(gateway: &Gateway, walker: &mut Walker, session_id: &str, clock: &mut u64) -> Vec<Step> {
    let phone = walker.phone();
    let mut text = String::new();
    let mut steps: Vec<Step> = Vec::new();
    for i in 0..MAX_WALK_STEPS {
        if i > 0 {
            let input = walker.next_input(&steps[i - 1].screen);
            if i > 1 {
                text.push('*');
            }
            text.push_str(&input);
        }
        let request = GatewayRequest::new(session_id, &phone, &text);
        *clock += 1;
        let t = Instant::now();
        let screen = gateway.handle_at(&request, *clock).expect("well-formed request");
        let nanos = t.elapsed().as_nanos();
        let end = screen.kind == ScreenKind::End;
        steps.push(Step { request, screen, nanos });
        if end {
            break;
        }
    }
    steps
}

fn percentile(sorted: &[u128], p: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1] as f64 / 1e6
}

/// Runs `walks` seeded walks against `gateway` and returns every step.
pub fn record(gateway: &Gateway, directory: &Directory, walks: usize, seed: u64) -> Vec<Step> {
    let mut walker = Walker::new(directory, seed);
    let mut clock = BASE_TS;
    (0..walks).flat_map(|w| walk(gateway, &mut walker, &format!("bench-{w}"), &mut clock)).collect()
}

pub fn summarize(mode: &str, walks: usize, steps: &[Step]) -> BenchResult {
    let mut times: Vec<u128> = steps.iter().map(|s| s.nanos).collect();
    times.sort_unstable();
    let mut transcript = DefaultHasher::new();
    for step in steps {
        step.screen.wire().hash(&mut transcript);
    }
    BenchResult {
        mode: mode.into(),
        walks,
        requests: times.len(),
        p50_ms: percentile(&times, 0.50),
        p95_ms: percentile(&times, 0.95),
        max_ms: percentile(&times, 1.0),
        transcript: format!("{:016x}", transcript.finish()),
    }
}

pub fn run_mode(directory: &Directory, walks: usize, on: bool, seed: u64) -> Result<BenchResult, BenchError> {
    if walks == 0 {
        return Err(BenchError::NoWalks);
    }
    let gateway = gateway_for(directory.clone(), on);
    let steps = record(&gateway, directory, walks, seed);
    Ok(summarize(if on { "on" } else { "off" }, walks, &steps))
}

pub fn bench(directory: &Directory, walks: usize, mode: BenchMode, seed: u64) -> Result<BenchReport, BenchError> {
    let mut results = Vec::new();
    if matches!(mode, BenchMode::On | BenchMode::Both) {
        results.push(run_mode(directory, walks, true, seed)?);
    }
    if matches!(mode, BenchMode::Off | BenchMode::Both) {
        results.push(run_mode(directory, walks, false, seed)?);
    }
    let (speedup, transcripts_match) = match results.as_slice() {
        [on, off] => (Some(off.p50_ms / on.p50_ms.max(1e-6)), Some(on.transcript == off.transcript)),
        _ => (None, None),
    };
    Ok(BenchReport { seed, businesses: directory.len(), results, speedup, transcripts_match })
}
