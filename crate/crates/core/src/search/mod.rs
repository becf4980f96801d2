//! Faceted filtering and fuzzy keyword search over a [`Directory`].

mod distance;
mod keywords;

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::directory::{label_cmp, Business, Directory, Sector};

pub use self::distance::damerau_levenshtein;
pub use self::keywords::{
    build_keyword_index, fuzzy_candidates, normalize_text, resolve_keyword, terms, threshold, tokenize,
    Candidate, Keyword, KeywordId, KeywordIndex, KeywordKind, DEFAULT_CANDIDATES,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Sector,
    Subsector,
    District,
    Village,
    Subvillage,
}

impl Dimension {
    pub const ALL: [Dimension; 5] = [
        Dimension::Sector,
        Dimension::Subsector,
        Dimension::District,
        Dimension::Village,
        Dimension::Subvillage,
    ];

    /// The facet that must be set before this one may be.
    pub fn parent(self) -> Option<Dimension> {
        match self {
            Dimension::Subsector => Some(Dimension::Sector),
            Dimension::Village => Some(Dimension::District),
            Dimension::Subvillage => Some(Dimension::Village),
            Dimension::Sector | Dimension::District => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Sector => "sector",
            Dimension::Subsector => "subsector",
            Dimension::District => "district",
            Dimension::Village => "village",
            Dimension::Subvillage => "subvillage",
        }
    }

    /// Facet tag used in binary logs (1..=5).
    pub fn tag(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Self::ALL.get((tag as usize).checked_sub(1)?).copied()
    }

    pub fn value_of(self, b: &Business) -> &str {
        match self {
            Dimension::Sector => b.sector.label(),
            Dimension::Subsector => &b.subsector,
            Dimension::District => &b.district,
            Dimension::Village => &b.village,
            Dimension::Subvillage => &b.subvillage,
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("{dimension} is set but {requires} is not")]
    BrokenInvariant { dimension: Dimension, requires: Dimension },
    #[error("unknown {dimension} {value:?}")]
    UnknownValue { dimension: Dimension, value: String },
    #[error("{0} is already set")]
    DimensionSet(Dimension),
    #[error("{dimension} cannot be chosen before {requires}")]
    OutOfOrder { dimension: Dimension, requires: Dimension },
    #[error("query is empty")]
    EmptyQuery,
    #[error("candidate count must be at least 1")]
    ZeroCandidates,
    #[error("unknown keyword {kind}:{text}")]
    UnknownKeyword { kind: KeywordKind, text: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FilterState {
    pub sector: Option<Sector>,
    pub subsector: Option<String>,
    pub district: Option<String>,
    pub village: Option<String>,
    pub subvillage: Option<String>,
}

impl FilterState {
    pub fn get(&self, dim: Dimension) -> Option<&str> {
        match dim {
            Dimension::Sector => self.sector.map(Sector::label),
            Dimension::Subsector => self.subsector.as_deref(),
            Dimension::District => self.district.as_deref(),
            Dimension::Village => self.village.as_deref(),
            Dimension::Subvillage => self.subvillage.as_deref(),
        }
    }

    pub fn is_set(&self, dim: Dimension) -> bool {
        self.get(dim).is_some()
    }

    /// Sets `dim` to `value`. Sector values are parsed as labels or codes.
    pub fn set(&mut self, dim: Dimension, value: &str) -> Result<(), SearchError> {
        match dim {
            Dimension::Sector => {
                self.sector = Some(Sector::parse(value).ok_or_else(|| SearchError::UnknownValue {
                    dimension: dim,
                    value: value.to_string(),
                })?)
            }
            Dimension::Subsector => self.subsector = Some(value.to_string()),
            Dimension::District => self.district = Some(value.to_string()),
            Dimension::Village => self.village = Some(value.to_string()),
            Dimension::Subvillage => self.subvillage = Some(value.to_string()),
        }
        Ok(())
    }

    /// Clears `dim` and every facet that depends on it.
    pub fn clear(&mut self, dim: Dimension) {
        match dim {
            Dimension::Sector => {
                self.sector = None;
                self.subsector = None;
            }
            Dimension::Subsector => self.subsector = None,
            Dimension::District => {
                self.district = None;
                self.village = None;
                self.subvillage = None;
            }
            Dimension::Village => {
                self.village = None;
                self.subvillage = None;
            }
            Dimension::Subvillage => self.subvillage = None,
        }
    }

    pub fn check(&self) -> Result<(), SearchError> {
        for dim in Dimension::ALL {
            if let Some(parent) = dim.parent() {
                if self.is_set(dim) && !self.is_set(parent) {
                    return Err(SearchError::BrokenInvariant { dimension: dim, requires: parent });
                }
            }
        }
        Ok(())
    }

    pub fn set_count(&self) -> usize {
        Dimension::ALL.iter().filter(|d| self.is_set(**d)).count()
    }

    pub fn matches(&self, b: &Business) -> bool {
        self.sector.is_none_or(|s| s == b.sector)
            && self.subsector.as_deref().is_none_or(|v| v == b.subsector)
            && self.district.as_deref().is_none_or(|v| v == b.district)
            && self.village.as_deref().is_none_or(|v| v == b.village)
            && self.subvillage.as_deref().is_none_or(|v| v == b.subvillage)
    }
}

/// Business ids in listing order (case-insensitive name, then id).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResultSet {
    pub ids: Vec<u32>,
    pub total: usize,
}

impl ResultSet {
    pub fn new(ids: Vec<u32>) -> Self {
        let total = ids.len();
        Self { ids, total }
    }
}

/// A keyword chosen by the user, identified by kind and normalized text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KeywordRef {
    pub kind: KeywordKind,
    pub text: String,
}

impl KeywordRef {
    pub fn new(kind: KeywordKind, text: impl Into<String>) -> Self {
        Self { kind, text: text.into() }
    }
}

/// How queries are evaluated. `Scan` walks every business on every query and
/// exists as the unindexed baseline for benchmarks; results are identical.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Indexed,
    Scan,
}

#[derive(Debug, Default)]
struct VillageNode {
    ranks: Vec<u32>,
    subvillages: HashMap<String, Vec<u32>>,
}

#[derive(Debug, Default)]
struct DistrictNode {
    ranks: Vec<u32>,
    villages: HashMap<String, VillageNode>,
}

// Posting lists hold listing ranks, so every list is sorted in listing order.
#[derive(Debug, Default)]
struct FacetIndex {
    by_rank: Vec<u32>,
    sectors: [Vec<u32>; 6],
    subsectors: [HashMap<String, Vec<u32>>; 6],
    districts: HashMap<String, DistrictNode>,
    keyword_ranks: Vec<Vec<u32>>,
}

/// A directory together with its search indexes.
#[derive(Debug)]
pub struct Catalog {
    directory: Directory,
    keywords: KeywordIndex,
    mode: EvalMode,
    facets: FacetIndex,
}

impl Catalog {
    pub fn new(directory: Directory) -> Self {
        Self::with_mode(directory, EvalMode::Indexed)
    }

    pub fn with_mode(directory: Directory, mode: EvalMode) -> Self {
        let keywords = build_keyword_index(&directory);
        let facets = match mode {
            EvalMode::Indexed => build_facets(&directory, &keywords),
            EvalMode::Scan => FacetIndex::default(),
        };
        Self { directory, keywords, mode, facets }
    }

    pub fn directory(&self) -> &Directory {
        &self.directory
    }

    pub fn keywords(&self) -> &KeywordIndex {
        &self.keywords
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    pub fn version(&self) -> &str {
        self.directory.version()
    }

    /// Businesses matching every set facet of `f`, which must be valid and
    /// name only existing taxonomy and geography nodes.
    pub fn apply_filters(&self, f: &FilterState) -> Result<ResultSet, SearchError> {
        f.check()?;
        self.check_exists(f)?;
        Ok(self.select(f, None))
    }

    /// Labels of `dim` with at least one match under `f`. Sectors come in
    /// code order, everything else alphabetically.
    pub fn options_for(&self, f: &FilterState, dim: Dimension) -> Result<Vec<String>, SearchError> {
        f.check()?;
        if f.is_set(dim) {
            return Err(SearchError::DimensionSet(dim));
        }
        if let Some(parent) = dim.parent() {
            if !f.is_set(parent) {
                return Err(SearchError::OutOfOrder { dimension: dim, requires: parent });
            }
        }
        Ok(self.options(f, None, dim))
    }

    /// Businesses matching `f` and, when given, referenced by `keyword`.
    /// Unknown labels simply match nothing.
    pub fn select(&self, f: &FilterState, keyword: Option<&KeywordRef>) -> ResultSet {
        ResultSet::new(self.positions(f, keyword).into_iter().map(|p| self.directory.businesses()[p].id).collect())
    }

    pub fn count(&self, f: &FilterState, keyword: Option<&KeywordRef>) -> usize {
        self.positions(f, keyword).len()
    }

    /// Like [`Catalog::options_for`] but without ordering checks and with an
    /// optional keyword restriction.
    pub fn options(&self, f: &FilterState, keyword: Option<&KeywordRef>, dim: Dimension) -> Vec<String> {
        let businesses = self.directory.businesses();
        let positions = self.positions(f, keyword);
        if dim == Dimension::Sector {
            let mut present = [false; 6];
            for p in positions {
                present[businesses[p].sector.code() as usize - 1] = true;
            }
            return Sector::ALL
                .iter()
                .filter(|s| present[s.code() as usize - 1])
                .map(|s| s.label().to_string())
                .collect();
        }
        let labels: HashSet<&str> = positions.into_iter().map(|p| dim.value_of(&businesses[p])).collect();
        let mut labels: Vec<String> = labels.into_iter().map(str::to_string).collect();
        labels.sort_by(|a, b| label_cmp(a, b));
        labels
    }

    /// Fuzzy keyword candidates of the given kinds.
    pub fn fuzzy_candidates(
        &self,
        query: &str,
        k: usize,
        kinds: &[KeywordKind],
    ) -> Result<Vec<Candidate>, SearchError> {
        match self.mode {
            EvalMode::Indexed => self.keywords.fuzzy_candidates_in(query, k, kinds),
            EvalMode::Scan => self.keywords.fuzzy_scan_in(query, k, kinds),
        }
    }

    fn check_exists(&self, f: &FilterState) -> Result<(), SearchError> {
        let unknown = |dimension: Dimension, value: &str| SearchError::UnknownValue { dimension, value: value.to_string() };
        if let (Some(sector), Some(sub)) = (f.sector, f.subsector.as_deref()) {
            if !self.directory.taxonomy().contains(sector, sub) {
                return Err(unknown(Dimension::Subsector, sub));
            }
        }
        let geo = self.directory.geo();
        if let Some(d) = f.district.as_deref() {
            if !geo.has_district(d) {
                return Err(unknown(Dimension::District, d));
            }
            if let Some(v) = f.village.as_deref() {
                if !geo.has_village(d, v) {
                    return Err(unknown(Dimension::Village, v));
                }
                if let Some(s) = f.subvillage.as_deref() {
                    if !geo.has_subvillage(d, v, s) {
                        return Err(unknown(Dimension::Subvillage, s));
                    }
                }
            }
        }
        Ok(())
    }

    // Positions into `directory.businesses()` in listing order.
    fn positions(&self, f: &FilterState, keyword: Option<&KeywordRef>) -> Vec<usize> {
        match self.mode {
            EvalMode::Indexed => self.indexed_positions(f, keyword),
            EvalMode::Scan => {
                let mut hits: Vec<&Business> = self
                    .directory
                    .businesses()
                    .iter()
                    .filter(|b| f.matches(b) && keyword.is_none_or(|k| k.kind.matches(&k.text, b)))
                    .collect();
                hits.sort_by(|a, b| a.listing_cmp(b));
                hits.into_iter().map(|b| self.directory.position(b.id).expect("id from directory")).collect()
            }
        }
    }

    fn indexed_positions(&self, f: &FilterState, keyword: Option<&KeywordRef>) -> Vec<usize> {
        const EMPTY: &[u32] = &[];
        let ix = &self.facets;
        let mut lists: Vec<&[u32]> = Vec::with_capacity(3);

        if let Some(sector) = f.sector {
            let slot = sector.code() as usize - 1;
            match f.subsector.as_deref() {
                Some(sub) => lists.push(ix.subsectors[slot].get(sub).map_or(EMPTY, Vec::as_slice)),
                None => lists.push(&ix.sectors[slot]),
            }
        } else if f.subsector.is_some() {
            lists.push(EMPTY);
        }

        if let Some(d) = f.district.as_deref() {
            let district = ix.districts.get(d);
            let list = match (f.village.as_deref(), f.subvillage.as_deref()) {
                (None, None) => district.map(|n| n.ranks.as_slice()),
                (Some(v), None) => district.and_then(|n| n.villages.get(v)).map(|n| n.ranks.as_slice()),
                (Some(v), Some(s)) => district
                    .and_then(|n| n.villages.get(v))
                    .and_then(|n| n.subvillages.get(s))
                    .map(Vec::as_slice),
                (None, Some(_)) => None,
            };
            lists.push(list.unwrap_or(EMPTY));
        } else if f.village.is_some() || f.subvillage.is_some() {
            lists.push(EMPTY);
        }

        if let Some(k) = keyword {
            let list = self.keywords.find(k.kind, &k.text).map(|id| ix.keyword_ranks[id as usize].as_slice());
            lists.push(list.unwrap_or(EMPTY));
        }

        let ranks: Vec<u32> = if lists.is_empty() {
            (0..ix.by_rank.len() as u32).collect()
        } else {
            lists.sort_by_key(|l| l.len());
            let (first, rest) = lists.split_first().expect("non-empty");
            first.iter().copied().filter(|r| rest.iter().all(|l| l.binary_search(r).is_ok())).collect()
        };
        ranks.into_iter().map(|r| ix.by_rank[r as usize] as usize).collect()
    }
}

fn build_facets(directory: &Directory, keywords: &KeywordIndex) -> FacetIndex {
    let businesses = directory.businesses();
    let mut order: Vec<u32> = (0..businesses.len() as u32).collect();
    order.sort_by(|&a, &b| businesses[a as usize].listing_cmp(&businesses[b as usize]));
    let mut rank_of = vec![0u32; businesses.len()];
    for (rank, &pos) in order.iter().enumerate() {
        rank_of[pos as usize] = rank as u32;
    }

    let mut ix = FacetIndex { by_rank: order.clone(), ..FacetIndex::default() };
    for (rank, &pos) in order.iter().enumerate() {
        let rank = rank as u32;
        let b = &businesses[pos as usize];
        let slot = b.sector.code() as usize - 1;
        ix.sectors[slot].push(rank);
        ix.subsectors[slot].entry(b.subsector.clone()).or_default().push(rank);
        let district = ix.districts.entry(b.district.clone()).or_default();
        district.ranks.push(rank);
        let village = district.villages.entry(b.village.clone()).or_default();
        village.ranks.push(rank);
        village.subvillages.entry(b.subvillage.clone()).or_default().push(rank);
    }

    ix.keyword_ranks = keywords
        .iter()
        .map(|(_, kw)| {
            let mut ranks: Vec<u32> = kw
                .referents
                .iter()
                .map(|id| rank_of[directory.position(*id).expect("referent in directory")])
                .collect();
            ranks.sort_unstable();
            ranks
        })
        .collect();
    ix
}

#[cfg(test)]
mod tests;
