//! The business directory: records, taxonomy, geography and codecs.

mod csv;
pub mod fixture;
mod snapshot;
mod synthetic;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::csv::{load_csv, parse_csv, write_csv, CsvError, CSV_HEADER};
pub use self::snapshot::{
    decode_snapshot, encode_snapshot, snapshot_version, SnapshotError, FORMAT_VERSION, MAGIC,
};
pub use self::synthetic::{generate_synthetic, generate_with, SyntheticConfig};

/// Upper bound on product terms per business.
pub const MAX_PRODUCTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Sector {
    WholesaleTraders = 1,
    Retailers = 2,
    Transporters = 3,
    AgriculturalProcessors = 4,
    SkilledTradespeople = 5,
    Services = 6,
}

impl Sector {
    pub const ALL: [Sector; 6] = [
        Sector::WholesaleTraders,
        Sector::Retailers,
        Sector::Transporters,
        Sector::AgriculturalProcessors,
        Sector::SkilledTradespeople,
        Sector::Services,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(usize::from(code).checked_sub(1)?).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            Sector::WholesaleTraders => "wholesale traders",
            Sector::Retailers => "retailers",
            Sector::Transporters => "transporters",
            Sector::AgriculturalProcessors => "agricultural processors",
            Sector::SkilledTradespeople => "skilled tradespeople",
            Sector::Services => "services",
        }
    }

    /// Accepts a numeric code or a label, case-insensitively, with `_` or `-`
    /// standing in for spaces.
    pub fn parse(raw: &str) -> Option<Self> {
        let norm: String = raw
            .trim()
            .chars()
            .map(|c| if c == '_' || c == '-' { ' ' } else { c.to_ascii_lowercase() })
            .collect();
        if let Ok(code) = norm.parse::<u8>() {
            return Self::from_code(code);
        }
        Self::ALL.into_iter().find(|s| s.label() == norm)
    }

    fn index(self) -> usize {
        usize::from(self.code()) - 1
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Business {
    pub id: u32,
    pub name: String,
    pub owner_name: String,
    pub phone: String,
    pub sector: Sector,
    pub subsector: String,
    pub products: Vec<String>,
    pub district: String,
    pub village: String,
    pub subvillage: String,
}

impl Business {
    /// Canonical listing order: case-insensitive name, then id.
    pub fn listing_cmp(&self, other: &Business) -> Ordering {
        listing_key_cmp(&self.name, self.id, &other.name, other.id)
    }
}

pub(crate) fn listing_key_cmp(a_name: &str, a_id: u32, b_name: &str, b_id: u32) -> Ordering {
    let a = a_name.chars().flat_map(char::to_lowercase);
    let b = b_name.chars().flat_map(char::to_lowercase);
    a.cmp(b).then(a_id.cmp(&b_id))
}

/// Case-insensitive alphabetical order used for option labels.
pub fn label_cmp(a: &str, b: &str) -> Ordering {
    let la = a.chars().flat_map(char::to_lowercase);
    let lb = b.chars().flat_map(char::to_lowercase);
    la.cmp(lb).then_with(|| a.cmp(b))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DirectoryError {
    #[error("business id must be positive")]
    ZeroId,
    #[error("duplicate business id {0}")]
    DuplicateId(u32),
    #[error("business {id}: field `{field}` is empty")]
    EmptyField { id: u32, field: &'static str },
    #[error("business {id}: phone {phone:?} is not a digit string")]
    BadPhone { id: u32, phone: String },
    #[error("business {id}: {count} products exceeds the limit of {MAX_PRODUCTS}")]
    TooManyProducts { id: u32, count: usize },
    #[error("synthetic directory size must be at least 1")]
    EmptyRequest,
}

/// districts → villages → subvillages, as present in the records.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GeoTree {
    districts: BTreeMap<String, BTreeMap<String, BTreeSet<String>>>,
}

impl GeoTree {
    fn insert(&mut self, district: &str, village: &str, subvillage: &str) {
        self.districts
            .entry(district.to_string())
            .or_default()
            .entry(village.to_string())
            .or_default()
            .insert(subvillage.to_string());
    }

    pub fn districts(&self) -> impl Iterator<Item = &str> {
        self.districts.keys().map(String::as_str)
    }

    pub fn villages(&self, district: &str) -> impl Iterator<Item = &str> {
        self.districts
            .get(district)
            .into_iter()
            .flat_map(|v| v.keys().map(String::as_str))
    }

    pub fn subvillages(&self, district: &str, village: &str) -> impl Iterator<Item = &str> {
        self.districts
            .get(district)
            .and_then(|v| v.get(village))
            .into_iter()
            .flat_map(|s| s.iter().map(String::as_str))
    }

    pub fn has_district(&self, district: &str) -> bool {
        self.districts.contains_key(district)
    }

    pub fn has_village(&self, district: &str, village: &str) -> bool {
        self.districts.get(district).is_some_and(|v| v.contains_key(village))
    }

    pub fn has_subvillage(&self, district: &str, village: &str, subvillage: &str) -> bool {
        self.districts
            .get(district)
            .and_then(|v| v.get(village))
            .is_some_and(|s| s.contains(subvillage))
    }

    pub fn village_count(&self) -> usize {
        self.districts.values().map(BTreeMap::len).sum()
    }

    pub fn subvillage_count(&self) -> usize {
        self.districts.values().flat_map(BTreeMap::values).map(BTreeSet::len).sum()
    }
}

/// The six fixed sectors with the subsector labels in use under each.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SectorTaxonomy {
    subsectors: [BTreeSet<String>; 6],
}

impl SectorTaxonomy {
    pub fn subsectors(&self, sector: Sector) -> impl Iterator<Item = &str> {
        self.subsectors[sector.index()].iter().map(String::as_str)
    }

    pub fn contains(&self, sector: Sector, subsector: &str) -> bool {
        self.subsectors[sector.index()].contains(subsector)
    }
}

/// An immutable, validated set of businesses sorted by id.
#[derive(Debug, Clone)]
pub struct Directory {
    businesses: Vec<Business>,
    geo: GeoTree,
    taxonomy: SectorTaxonomy,
    version: OnceLock<String>,
}

impl PartialEq for Directory {
    fn eq(&self, other: &Self) -> bool {
        self.businesses == other.businesses
    }
}

impl Eq for Directory {}

impl Directory {
    pub fn new(mut businesses: Vec<Business>) -> Result<Self, DirectoryError> {
        businesses.sort_by_key(|b| b.id);
        let mut geo = GeoTree::default();
        let mut taxonomy = SectorTaxonomy::default();
        for (i, b) in businesses.iter().enumerate() {
            validate(b)?;
            if i > 0 && businesses[i - 1].id == b.id {
                return Err(DirectoryError::DuplicateId(b.id));
            }
            geo.insert(&b.district, &b.village, &b.subvillage);
            taxonomy.subsectors[b.sector.index()].insert(b.subsector.clone());
        }
        Ok(Self { businesses, geo, taxonomy, version: OnceLock::new() })
    }

    pub fn empty() -> Self {
        Self::new(Vec::new()).expect("empty directory is valid")
    }

    pub fn businesses(&self) -> &[Business] {
        &self.businesses
    }

    pub fn len(&self) -> usize {
        self.businesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.businesses.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<&Business> {
        self.position(id).map(|i| &self.businesses[i])
    }

    pub(crate) fn position(&self, id: u32) -> Option<usize> {
        self.businesses.binary_search_by_key(&id, |b| b.id).ok()
    }

    pub fn geo(&self) -> &GeoTree {
        &self.geo
    }

    pub fn taxonomy(&self) -> &SectorTaxonomy {
        &self.taxonomy
    }

    /// 16 lowercase hex characters identifying the directory content.
    pub fn version(&self) -> &str {
        self.version.get_or_init(|| snapshot::content_version(self))
    }

    pub fn into_businesses(self) -> Vec<Business> {
        self.businesses
    }
}

/// Free-function form of [`Directory::version`].
pub fn version_of(directory: &Directory) -> String {
    directory.version().to_string()
}

fn validate(b: &Business) -> Result<(), DirectoryError> {
    if b.id == 0 {
        return Err(DirectoryError::ZeroId);
    }
    let fields: [(&'static str, &str); 7] = [
        ("name", &b.name),
        ("owner_name", &b.owner_name),
        ("phone", &b.phone),
        ("subsector", &b.subsector),
        ("district", &b.district),
        ("village", &b.village),
        ("subvillage", &b.subvillage),
    ];
    for (field, value) in fields {
        if value.trim().is_empty() {
            return Err(DirectoryError::EmptyField { id: b.id, field });
        }
    }
    if !b.phone.bytes().all(|c| c.is_ascii_digit()) {
        return Err(DirectoryError::BadPhone { id: b.id, phone: b.phone.clone() });
    }
    if b.products.len() > MAX_PRODUCTS {
        return Err(DirectoryError::TooManyProducts { id: b.id, count: b.products.len() });
    }
    if b.products.iter().any(|p| p.trim().is_empty()) {
        return Err(DirectoryError::EmptyField { id: b.id, field: "products" });
    }
    Ok(())
}
