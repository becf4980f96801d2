use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::distance::distance_chars;
use super::{ResultSet, SearchError};
use crate::directory::{label_cmp, listing_key_cmp, Business, Directory};

/// Default number of candidates offered on the keyword-select screen.
pub const DEFAULT_CANDIDATES: usize = 8;

/// Keyword kinds, declared in ranking priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeywordKind {
    Sector,
    Subsector,
    Product,
    District,
    Village,
    Subvillage,
    OwnerName,
    BusinessName,
}

impl KeywordKind {
    pub const ALL: [KeywordKind; 8] = [
        KeywordKind::Sector,
        KeywordKind::Subsector,
        KeywordKind::Product,
        KeywordKind::District,
        KeywordKind::Village,
        KeywordKind::Subvillage,
        KeywordKind::OwnerName,
        KeywordKind::BusinessName,
    ];

    /// Ranking tier: sector < subsector < product < location < owner < business name.
    pub fn priority(self) -> u8 {
        match self {
            KeywordKind::Sector => 0,
            KeywordKind::Subsector => 1,
            KeywordKind::Product => 2,
            KeywordKind::District | KeywordKind::Village | KeywordKind::Subvillage => 3,
            KeywordKind::OwnerName => 4,
            KeywordKind::BusinessName => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KeywordKind::Sector => "sector",
            KeywordKind::Subsector => "subsector",
            KeywordKind::Product => "product",
            KeywordKind::District => "district",
            KeywordKind::Village => "village",
            KeywordKind::Subvillage => "subvillage",
            KeywordKind::OwnerName => "owner_name",
            KeywordKind::BusinessName => "business_name",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Source strings of `b` that feed this kind of keyword.
    pub fn sources(self, b: &Business) -> Vec<&str> {
        match self {
            KeywordKind::Sector => vec![b.sector.label()],
            KeywordKind::Subsector => vec![&b.subsector],
            KeywordKind::Product => b.products.iter().map(String::as_str).collect(),
            KeywordKind::District => vec![&b.district],
            KeywordKind::Village => vec![&b.village],
            KeywordKind::Subvillage => vec![&b.subvillage],
            KeywordKind::OwnerName => vec![&b.owner_name],
            KeywordKind::BusinessName => vec![&b.name],
        }
    }

    /// True when `b` is a referent of the keyword `(self, text)`.
    pub fn matches(self, text: &str, b: &Business) -> bool {
        self.sources(b).into_iter().any(|s| terms(s).iter().any(|t| t == text))
    }
}

impl fmt::Display for KeywordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Lowercased alphanumeric tokens of `s`, in order.
pub fn tokenize(s: &str) -> Vec<String> {
    s.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Normalized whole form of `s`: its tokens joined by single spaces.
pub fn normalize_text(s: &str) -> String {
    tokenize(s).join(" ")
}

/// Index terms for one source string: the whole normalized string plus each
/// token of two or more characters.
pub fn terms(s: &str) -> Vec<String> {
    let tokens = tokenize(s);
    let mut out = Vec::with_capacity(tokens.len() + 1);
    if tokens.is_empty() {
        return out;
    }
    out.push(tokens.join(" "));
    for t in tokens {
        if t.chars().count() >= 2 && !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

pub type KeywordId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Keyword {
    pub text: String,
    pub kind: KeywordKind,
    /// Original-case spelling used for display and for facet filters; the
    /// smallest variant when several spellings normalize to `text`.
    pub label: String,
    /// Business ids in listing order.
    pub referents: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub id: KeywordId,
    pub distance: usize,
}

#[derive(Debug, Clone, Default)]
pub struct KeywordIndex {
    keywords: Vec<Keyword>,
    chars: Vec<Vec<char>>,
    lookup: HashMap<(KeywordKind, String), KeywordId>,
    // keyword ids bucketed by character length
    by_len: Vec<Vec<KeywordId>>,
}

pub fn build_keyword_index(d: &Directory) -> KeywordIndex {
    let mut acc: BTreeMap<(KeywordKind, String), (String, Vec<&Business>)> = BTreeMap::new();
    for b in d.businesses() {
        for kind in KeywordKind::ALL {
            for source in kind.sources(b) {
                for (i, term) in terms(source).into_iter().enumerate() {
                    let label = if i == 0 { source.trim().to_string() } else { term.clone() };
                    let entry = acc.entry((kind, term)).or_insert_with(|| (label.clone(), Vec::new()));
                    if label_cmp(&label, &entry.0).is_lt() {
                        entry.0 = label;
                    }
                    if entry.1.last().map(|l| l.id) != Some(b.id) {
                        entry.1.push(b);
                    }
                }
            }
        }
    }

    let mut ix = KeywordIndex::default();
    for ((kind, text), (label, mut businesses)) in acc {
        businesses.sort_by(|a, b| listing_key_cmp(&a.name, a.id, &b.name, b.id));
        let id = ix.keywords.len() as KeywordId;
        let chars: Vec<char> = text.chars().collect();
        if ix.by_len.len() <= chars.len() {
            ix.by_len.resize(chars.len() + 1, Vec::new());
        }
        ix.by_len[chars.len()].push(id);
        ix.lookup.insert((kind, text.clone()), id);
        ix.keywords.push(Keyword { text, kind, label, referents: businesses.iter().map(|b| b.id).collect() });
        ix.chars.push(chars);
    }
    ix
}

/// Largest edit distance accepted for a keyword of `len` characters.
pub fn threshold(len: usize) -> usize {
    len.div_ceil(4).max(1)
}

impl KeywordIndex {
    pub fn len(&self) -> usize {
        self.keywords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keywords.is_empty()
    }

    pub fn get(&self, id: KeywordId) -> Option<&Keyword> {
        self.keywords.get(id as usize)
    }

    pub fn find(&self, kind: KeywordKind, text: &str) -> Option<KeywordId> {
        self.lookup.get(&(kind, text.to_string())).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (KeywordId, &Keyword)> {
        self.keywords.iter().enumerate().map(|(i, k)| (i as KeywordId, k))
    }

    /// Distinct keyword texts across all kinds.
    pub fn vocabulary(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.keywords.iter().map(|k| k.text.as_str()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn fuzzy_candidates(&self, query: &str, k: usize) -> Result<Vec<Candidate>, SearchError> {
        self.fuzzy_candidates_in(query, k, &KeywordKind::ALL)
    }

    /// Candidates restricted to `kinds`.
    pub fn fuzzy_candidates_in(
        &self,
        query: &str,
        k: usize,
        kinds: &[KeywordKind],
    ) -> Result<Vec<Candidate>, SearchError> {
        self.ranked(query, k, kinds, true)
    }

    /// Same answer as [`KeywordIndex::fuzzy_candidates_in`], computed by
    /// measuring the query against every entry with no length pruning.
    pub fn fuzzy_scan_in(&self, query: &str, k: usize, kinds: &[KeywordKind]) -> Result<Vec<Candidate>, SearchError> {
        self.ranked(query, k, kinds, false)
    }

    fn ranked(&self, query: &str, k: usize, kinds: &[KeywordKind], prune: bool) -> Result<Vec<Candidate>, SearchError> {
        let q = normalize_text(query);
        if q.is_empty() {
            return Err(SearchError::EmptyQuery);
        }
        if k == 0 {
            return Err(SearchError::ZeroCandidates);
        }
        let q: Vec<char> = q.chars().collect();
        let mut found = Vec::new();
        for (len, ids) in self.by_len.iter().enumerate() {
            let limit = threshold(len);
            if prune && len.abs_diff(q.len()) > limit {
                continue;
            }
            for &id in ids {
                if !kinds.contains(&self.keywords[id as usize].kind) {
                    continue;
                }
                let distance = distance_chars(&q, &self.chars[id as usize]);
                if distance <= limit {
                    found.push(Candidate { id, distance });
                }
            }
        }
        found.sort_by(|a, b| {
            let (ka, kb) = (&self.keywords[a.id as usize], &self.keywords[b.id as usize]);
            a.distance
                .cmp(&b.distance)
                .then(ka.kind.priority().cmp(&kb.kind.priority()))
                .then_with(|| ka.text.cmp(&kb.text))
                .then(ka.kind.cmp(&kb.kind))
        });
        found.truncate(k);
        Ok(found)
    }

    pub fn resolve_keyword(&self, kind: KeywordKind, text: &str) -> Result<ResultSet, SearchError> {
        let id = self
            .find(kind, text)
            .ok_or_else(|| SearchError::UnknownKeyword { kind, text: text.to_string() })?;
        Ok(ResultSet::new(self.keywords[id as usize].referents.clone()))
    }
}

pub fn fuzzy_candidates(ix: &KeywordIndex, query: &str, k: usize) -> Result<Vec<Candidate>, SearchError> {
    ix.fuzzy_candidates(query, k)
}

pub fn resolve_keyword(ix: &KeywordIndex, kw: &Keyword) -> Result<ResultSet, SearchError> {
    ix.resolve_keyword(kw.kind, &kw.text)
}
