//! Binary usage-log batches uploaded by offline clients.
//!
//! ```text
//! "EKL1" | msisdn: 12 ASCII digits | base_ts: u32 BE | dir_version: 8 bytes
//!        | count: varint | record*
//! record = tag: u8 | dt: varint | payload
//!   tags 1-5: business id varint
//!   tag 6:    facet count u8, then (facet tag u8, value index varint)*
//!   tag 7:    byte length varint, UTF-8 query (at most 32 bytes)
//! ```
//!
//! `dt` is seconds since the previous record (since `base_ts` for the first).
//! Facet values are the sector code for sectors and otherwise the position
//! of the label in the sorted distinct labels of that facet ([`FacetLabels`]).

use std::fmt;
use std::io::{self, Read};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::directory::{label_cmp, Directory, Sector};
use crate::msisdn::Msisdn;
use crate::search::Dimension;
use crate::varint;

pub const MAGIC: &[u8; 4] = b"EKL1";
pub const MAX_QUERY_BYTES: usize = 32;
pub const HEADER_LEN: usize = 4 + 12 + 4 + 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Favorite(u32),
    Unfavorite(u32),
    Call(u32),
    AddContact(u32),
    OpenDetail(u32),
    FilterSearch(Vec<(Dimension, u32)>),
    TextSearch(String),
}

pub const ACTION_NAMES: [&str; 7] =
    ["favorite", "unfavorite", "call", "add_contact", "open_detail", "filter_search", "text_search"];

impl Action {
    pub fn tag(&self) -> u8 {
        match self {
            Action::Favorite(_) => 1,
            Action::Unfavorite(_) => 2,
            Action::Call(_) => 3,
            Action::AddContact(_) => 4,
            Action::OpenDetail(_) => 5,
            Action::FilterSearch(_) => 6,
            Action::TextSearch(_) => 7,
        }
    }

    pub fn name(&self) -> &'static str {
        ACTION_NAMES[self.tag() as usize - 1]
    }

    pub fn business(&self) -> Option<u32> {
        match self {
            Action::Favorite(id)
            | Action::Unfavorite(id)
            | Action::Call(id)
            | Action::AddContact(id)
            | Action::OpenDetail(id) => Some(*id),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LogRecord {
    pub dt: u32,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LogBatch {
    pub msisdn: Msisdn,
    pub base_ts: u32,
    pub directory_version: [u8; 8],
    pub records: Vec<LogRecord>,
}

impl LogBatch {
    /// Absolute timestamp of each record.
    pub fn timestamps(&self) -> Vec<u64> {
        let mut ts = u64::from(self.base_ts);
        self.records
            .iter()
            .map(|r| {
                ts += u64::from(r.dt);
                ts
            })
            .collect()
    }
}

/// Parses a 16-hex-digit directory version into header bytes.
pub fn version_bytes(version: &str) -> Option<[u8; 8]> {
    if version.len() != 16 || !version.is_ascii() {
        return None;
    }
    let mut out = [0u8; 8];
    for (i, chunk) in version.as_bytes().chunks(2).enumerate() {
        out[i] = u8::from_str_radix(std::str::from_utf8(chunk).ok()?, 16).ok()?;
    }
    Some(out)
}

pub fn version_hex(bytes: &[u8; 8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogError {
    #[error("bad magic")]
    BadMagic,
    #[error("header truncated")]
    TruncatedHeader,
    #[error("header msisdn is not 12 canonical digits")]
    BadMsisdn,
    #[error("record count is malformed")]
    BadCount,
    #[error("record {record}: truncated")]
    Truncated { record: usize },
    #[error("record {record}: unknown action tag {tag}")]
    UnknownTag { record: usize, tag: u8 },
    #[error("record {record}: query of {len} bytes exceeds {MAX_QUERY_BYTES}")]
    OversizeQuery { record: usize, len: usize },
    #[error("record {record}: query is not UTF-8")]
    InvalidUtf8 { record: usize },
    #[error("record {record}: malformed filter facets")]
    BadFacets { record: usize },
    #[error("record {record}: value out of range")]
    Overflow { record: usize },
    #[error("{0} bytes after the last record")]
    TrailingBytes(usize),
    #[error("read failed: {0}")]
    Io(String),
}

impl LogError {
    /// 1-based index of the offending record, when the error concerns one.
    pub fn record(&self) -> Option<usize> {
        match self {
            LogError::Truncated { record }
            | LogError::UnknownTag { record, .. }
            | LogError::OversizeQuery { record, .. }
            | LogError::InvalidUtf8 { record }
            | LogError::BadFacets { record }
            | LogError::Overflow { record } => Some(*record),
            _ => None,
        }
    }
}

pub fn encode_record(out: &mut Vec<u8>, record: &LogRecord, index: usize) -> Result<(), LogError> {
    out.push(record.action.tag());
    varint::write_u64(out, u64::from(record.dt));
    match &record.action {
        Action::FilterSearch(facets) => {
            if facets.len() > Dimension::ALL.len() {
                return Err(LogError::BadFacets { record: index });
            }
            out.push(facets.len() as u8);
            for (dim, value) in facets {
                out.push(dim.tag());
                varint::write_u64(out, u64::from(*value));
            }
        }
        Action::TextSearch(query) => {
            if query.len() > MAX_QUERY_BYTES {
                return Err(LogError::OversizeQuery { record: index, len: query.len() });
            }
            varint::write_u64(out, query.len() as u64);
            out.extend_from_slice(query.as_bytes());
        }
        other => varint::write_u64(out, u64::from(other.business().expect("id-carrying action"))),
    }
    Ok(())
}

pub fn encode_batch(batch: &LogBatch) -> Result<Vec<u8>, LogError> {
    let mut out = Vec::with_capacity(HEADER_LEN + 4 + batch.records.len() * 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(batch.msisdn.as_str().as_bytes());
    out.extend_from_slice(&batch.base_ts.to_be_bytes());
    out.extend_from_slice(&batch.directory_version);
    varint::write_u64(&mut out, batch.records.len() as u64);
    for (i, record) in batch.records.iter().enumerate() {
        encode_record(&mut out, record, i + 1)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchHeader {
    pub msisdn: Msisdn,
    pub base_ts: u32,
    pub directory_version: [u8; 8],
    pub count: u64,
}

/// Decodes a batch record by record from any reader.
pub struct BatchReader<R> {
    reader: R,
    header: BatchHeader,
    next: usize,
}

fn io_error(e: io::Error, record: usize) -> LogError {
    match e.kind() {
        io::ErrorKind::UnexpectedEof => LogError::Truncated { record },
        io::ErrorKind::InvalidData => LogError::Overflow { record },
        _ => LogError::Io(e.to_string()),
    }
}

impl<R: Read> BatchReader<R> {
    pub fn new(mut reader: R) -> Result<Self, LogError> {
        let mut head = [0u8; HEADER_LEN];
        reader.read_exact(&mut head).map_err(|e| match e.kind() {
            io::ErrorKind::UnexpectedEof => LogError::TruncatedHeader,
            _ => LogError::Io(e.to_string()),
        })?;
        if &head[..4] != MAGIC {
            return Err(LogError::BadMagic);
        }
        let digits = std::str::from_utf8(&head[4..16]).map_err(|_| LogError::BadMsisdn)?;
        if !Msisdn::is_canonical(digits) {
            return Err(LogError::BadMsisdn);
        }
        let msisdn: Msisdn = digits.parse().map_err(|_| LogError::BadMsisdn)?;
        let base_ts = u32::from_be_bytes(head[16..20].try_into().expect("4 bytes"));
        let directory_version: [u8; 8] = head[20..28].try_into().expect("8 bytes");
        let count = varint::read_u64_from(&mut reader)
            .map_err(|e| match e.kind() {
                io::ErrorKind::UnexpectedEof => LogError::TruncatedHeader,
                io::ErrorKind::InvalidData => LogError::BadCount,
                _ => LogError::Io(e.to_string()),
            })?
            .ok_or(LogError::TruncatedHeader)?;
        Ok(Self { reader, header: BatchHeader { msisdn, base_ts, directory_version, count }, next: 0 })
    }

    pub fn header(&self) -> &BatchHeader {
        &self.header
    }

    fn varint(&mut self, record: usize) -> Result<u64, LogError> {
        varint::read_u64_from(&mut self.reader)
            .map_err(|e| io_error(e, record))?
            .ok_or(LogError::Truncated { record })
    }

    fn byte(&mut self, record: usize) -> Result<u8, LogError> {
        let mut b = [0u8; 1];
        self.reader.read_exact(&mut b).map_err(|e| io_error(e, record))?;
        Ok(b[0])
    }

    fn u32(&mut self, record: usize) -> Result<u32, LogError> {
        u32::try_from(self.varint(record)?).map_err(|_| LogError::Overflow { record })
    }

    /// Next record, or `None` once `count` records have been read.
    pub fn next_record(&mut self) -> Result<Option<LogRecord>, LogError> {
        if self.next as u64 >= self.header.count {
            return Ok(None);
        }
        self.next += 1;
        let record = self.next;
        let tag = self.byte(record)?;
        let dt = self.u32(record)?;
        let action = match tag {
            1..=5 => {
                let id = self.u32(record)?;
                match tag {
                    1 => Action::Favorite(id),
                    2 => Action::Unfavorite(id),
                    3 => Action::Call(id),
                    4 => Action::AddContact(id),
                    _ => Action::OpenDetail(id),
                }
            }
            6 => {
                let n = self.byte(record)? as usize;
                if n > Dimension::ALL.len() {
                    return Err(LogError::BadFacets { record });
                }
                let mut facets = Vec::with_capacity(n);
                for _ in 0..n {
                    let dim = Dimension::from_tag(self.byte(record)?).ok_or(LogError::BadFacets { record })?;
                    facets.push((dim, self.u32(record)?));
                }
                Action::FilterSearch(facets)
            }
            7 => {
                let len = self.varint(record)?;
                if len > MAX_QUERY_BYTES as u64 {
                    return Err(LogError::OversizeQuery { record, len: len as usize });
                }
                let mut buf = vec![0u8; len as usize];
                self.reader.read_exact(&mut buf).map_err(|e| io_error(e, record))?;
                Action::TextSearch(String::from_utf8(buf).map_err(|_| LogError::InvalidUtf8 { record })?)
            }
            tag => return Err(LogError::UnknownTag { record, tag }),
        };
        Ok(Some(LogRecord { dt, action }))
    }

    pub fn into_inner(self) -> R {
        self.reader
    }
}

impl<R: Read> Iterator for BatchReader<R> {
    type Item = Result<LogRecord, LogError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_record().transpose()
    }
}

pub fn decode_batch(bytes: &[u8]) -> Result<LogBatch, LogError> {
    let mut reader = BatchReader::new(bytes)?;
    let mut records = Vec::new();
    while let Some(r) = reader.next_record()? {
        records.push(r);
    }
    let BatchHeader { msisdn, base_ts, directory_version, .. } = reader.header().clone();
    let rest = reader.into_inner();
    if !rest.is_empty() {
        return Err(LogError::TrailingBytes(rest.len()));
    }
    Ok(LogBatch { msisdn, base_ts, directory_version, records })
}

/// Sorted distinct labels of each facet, used for filter-search value
/// indices.
#[derive(Debug, Clone, Default)]
pub struct FacetLabels {
    labels: [Vec<String>; 5],
}

impl FacetLabels {
    pub fn new(directory: &Directory) -> Self {
        let mut labels: [Vec<String>; 5] = Default::default();
        for dim in [Dimension::Subsector, Dimension::District, Dimension::Village, Dimension::Subvillage] {
            let list = &mut labels[dim.tag() as usize - 1];
            list.extend(directory.businesses().iter().map(|b| dim.value_of(b).to_string()));
            list.sort_by(|a, b| label_cmp(a, b));
            list.dedup();
        }
        Self { labels }
    }

    pub fn index_of(&self, dim: Dimension, label: &str) -> Option<u32> {
        if dim == Dimension::Sector {
            return Sector::parse(label).map(|s| u32::from(s.code()));
        }
        let list = &self.labels[dim.tag() as usize - 1];
        list.binary_search_by(|l| label_cmp(l, label)).ok().map(|i| i as u32)
    }

    pub fn label(&self, dim: Dimension, index: u32) -> Option<&str> {
        if dim == Dimension::Sector {
            return u8::try_from(index).ok().and_then(Sector::from_code).map(Sector::label);
        }
        self.labels[dim.tag() as usize - 1].get(index as usize).map(String::as_str)
    }
}

/// Human-readable payload for the action store.
pub struct PayloadDisplay<'a> {
    pub action: &'a Action,
    /// Labels of the directory the batch was recorded against, if known.
    pub labels: Option<&'a FacetLabels>,
}

impl fmt::Display for PayloadDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.action {
            Action::FilterSearch(facets) => {
                for (i, (dim, value)) in facets.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    match self.labels.and_then(|l| l.label(*dim, *value)) {
                        Some(label) => write!(f, "{}={}", dim.name(), label)?,
                        None => write!(f, "{}=#{}", dim.name(), value)?,
                    }
                }
                Ok(())
            }
            Action::TextSearch(q) => write!(f, "query={q}"),
            other => write!(f, "business={}", other.business().expect("id-carrying action")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directory::generate_synthetic;
    use proptest::prelude::*;

    fn msisdn() -> Msisdn {
        "255712345678".parse().unwrap()
    }

    fn batch(records: Vec<LogRecord>) -> LogBatch {
        LogBatch { msisdn: msisdn(), base_ts: 1_700_000_000, directory_version: [0xab; 8], records }
    }

    #[test]
    fn shared_golden_vector() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../testdata/golden/logbatch-3.json");
        let golden: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        let records = golden["records"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| {
                let id = r["business"].as_u64().unwrap() as u32;
                let action = match r["tag"].as_u64().unwrap() {
                    1 => Action::Favorite(id),
                    2 => Action::Unfavorite(id),
                    3 => Action::Call(id),
                    t => panic!("golden uses tag {t}"),
                };
                assert_eq!(action.name(), r["action"].as_str().unwrap());
                LogRecord { dt: r["dt"].as_u64().unwrap() as u32, action }
            })
            .collect();
        let b = LogBatch {
            msisdn: golden["msisdn"].as_str().unwrap().parse().unwrap(),
            base_ts: golden["base_ts"].as_u64().unwrap() as u32,
            directory_version: version_bytes(golden["directory_version"].as_str().unwrap()).unwrap(),
            records,
        };
        let hex: String = encode_batch(&b).unwrap().iter().map(|x| format!("{x:02x}")).collect();
        assert_eq!(hex, golden["hex"].as_str().unwrap());
    }

    #[test]
    fn open_detail_record_is_three_bytes() {
        let mut out = Vec::new();
        encode_record(&mut out, &LogRecord { dt: 3, action: Action::OpenDetail(42) }, 1).unwrap();
        assert_eq!(out, [0x05, 0x03, 0x2a]);
    }

    #[test]
    fn header_layout() {
        let bytes = encode_batch(&batch(vec![LogRecord { dt: 3, action: Action::OpenDetail(42) }])).unwrap();
        assert_eq!(&bytes[..4], b"EKL1");
        assert_eq!(&bytes[4..16], b"255712345678");
        assert_eq!(&bytes[16..20], &1_700_000_000u32.to_be_bytes());
        assert_eq!(&bytes[20..28], &[0xab; 8]);
        assert_eq!(&bytes[28..], &[0x01, 0x05, 0x03, 0x2a]);
    }

    #[test]
    fn distinct_decode_errors() {
        let good = encode_batch(&batch(vec![
            LogRecord { dt: 0, action: Action::Call(7) },
            LogRecord { dt: 1, action: Action::TextSearch("mbegu".into()) },
            LogRecord { dt: 1, action: Action::Favorite(7) },
        ]))
        .unwrap();
        assert_eq!(decode_batch(b"EKL2rest"), Err(LogError::TruncatedHeader));
        let mut bad = good.clone();
        bad[3] = b'9';
        assert_eq!(decode_batch(&bad), Err(LogError::BadMagic));
        let mut bad = good.clone();
        bad[5] = b'x';
        assert_eq!(decode_batch(&bad), Err(LogError::BadMsisdn));
        // cut inside record 2's query
        assert_eq!(decode_batch(&good[..good.len() - 5]), Err(LogError::Truncated { record: 2 }));
        let mut bad = good.clone();
        bad[29] = 0;
        assert_eq!(decode_batch(&bad), Err(LogError::UnknownTag { record: 1, tag: 0 }));
        bad[29] = 8;
        assert_eq!(decode_batch(&bad), Err(LogError::UnknownTag { record: 1, tag: 8 }));
        let mut bad = good.clone();
        bad[34] = 33;
        assert_eq!(decode_batch(&bad), Err(LogError::OversizeQuery { record: 2, len: 33 }));
        let mut bad = good.clone();
        bad.push(0);
        assert_eq!(decode_batch(&bad), Err(LogError::TrailingBytes(1)));
        let mut bad = good;
        bad[35] = 0xff;
        assert_eq!(decode_batch(&bad), Err(LogError::InvalidUtf8 { record: 2 }));
    }

    #[test]
    fn oversize_query_rejected_on_encode() {
        let b = batch(vec![LogRecord { dt: 0, action: Action::TextSearch("x".repeat(33)) }]);
        assert_eq!(encode_batch(&b), Err(LogError::OversizeQuery { record: 1, len: 33 }));
    }

    #[test]
    fn twenty_thousand_small_records_fit_budget() {
        let records = (0..20_000u32)
            .map(|i| LogRecord { dt: i % 128, action: Action::OpenDetail(i % 16_384) })
            .collect();
        let bytes = encode_batch(&batch(records)).unwrap();
        // 28 header + 3 count + 20,000 x (1 tag + 1 dt + at most 2 id)
        assert!(bytes.len() <= 28 + 3 + 20_000 * 4);
        assert!(bytes.len() <= 100_000);
    }

    #[test]
    fn facet_labels_index_and_render() {
        let d = generate_synthetic(1, 50).unwrap();
        let labels = FacetLabels::new(&d);
        let b = &d.businesses()[0];
        let v = labels.index_of(Dimension::Village, &b.village).unwrap();
        assert_eq!(labels.label(Dimension::Village, v), Some(b.village.as_str()));
        assert_eq!(labels.index_of(Dimension::Sector, "transporters"), Some(3));
        let action = Action::FilterSearch(vec![(Dimension::Sector, 3), (Dimension::Village, v)]);
        assert_eq!(
            PayloadDisplay { action: &action, labels: Some(&labels) }.to_string(),
            format!("sector=transporters;village={}", b.village)
        );
        assert_eq!(
            PayloadDisplay { action: &action, labels: None }.to_string(),
            format!("sector=#3;village=#{v}")
        );
    }

    #[test]
    fn version_hex_round_trip() {
        let v = "0123456789abcdef";
        assert_eq!(version_hex(&version_bytes(v).unwrap()), v);
        assert_eq!(version_bytes("xyz"), None);
    }

    pub(crate) fn arb_action() -> impl Strategy<Value = Action> {
        let id = 0u32..2_000_000;
        prop_oneof![
            id.clone().prop_map(Action::Favorite),
            id.clone().prop_map(Action::Unfavorite),
            id.clone().prop_map(Action::Call),
            id.clone().prop_map(Action::AddContact),
            id.prop_map(Action::OpenDetail),
            prop::collection::vec((0..5usize, 0u32..400), 0..=5)
                .prop_map(|f| Action::FilterSearch(f.into_iter().map(|(d, v)| (Dimension::ALL[d], v)).collect())),
            "\\PC{0,10}".prop_filter_map("fits", |q| (q.len() <= MAX_QUERY_BYTES).then_some(q)).prop_map(Action::TextSearch),
        ]
    }

    proptest! {
        #[test]
        fn round_trip(records in prop::collection::vec((any::<u32>(), arb_action()), 0..60), base in any::<u32>()) {
            let mut b = batch(records.into_iter().map(|(dt, action)| LogRecord { dt: dt >> 12, action }).collect());
            b.base_ts = base;
            let bytes = encode_batch(&b).unwrap();
            prop_assert_eq!(decode_batch(&bytes).unwrap(), b.clone());
            let streamed: Vec<LogRecord> = BatchReader::new(&bytes[..]).unwrap().collect::<Result<_, _>>().unwrap();
            prop_assert_eq!(streamed, b.records.clone());
            let ts = b.timestamps();
            prop_assert!(ts.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn id_records_average_at_most_sixteen_bytes(
            records in prop::collection::vec((0u32..16_384, 1u8..6, 0u32..2_097_152), 1..500)
        ) {
            let b = batch(records.into_iter().map(|(dt, tag, id)| {
                let action = match tag { 1 => Action::Favorite(id), 2 => Action::Unfavorite(id), 3 => Action::Call(id), 4 => Action::AddContact(id), _ => Action::OpenDetail(id) };
                LogRecord { dt, action }
            }).collect());
            let n = b.records.len();
            let bytes = encode_batch(&b).unwrap();
            let count_len = varint::encoded_len(n as u64);
            prop_assert!((bytes.len() - HEADER_LEN - count_len) as f64 / n as f64 <= 16.0);
        }

        #[test]
        fn truncation_names_a_record(records in prop::collection::vec(arb_action(), 1..20), cut in 1usize..200) {
            let b = batch(records.into_iter().map(|action| LogRecord { dt: 5, action }).collect());
            let bytes = encode_batch(&b).unwrap();
            let body_start = HEADER_LEN + varint::encoded_len(b.records.len() as u64);
            prop_assume!(bytes.len() > body_start);
            let keep = body_start + cut % (bytes.len() - body_start);
            match decode_batch(&bytes[..keep]) {
                Err(LogError::Truncated { record }) => prop_assert!(record >= 1 && record <= b.records.len()),
                other => prop_assert!(false, "unexpected {:?}", other),
            }
        }
    }
}
