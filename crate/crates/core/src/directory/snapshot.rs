//! Versioned binary snapshot of a directory.
//!
//! ```text
//! magic "EKD1" | format u8 | content version [8] | body
//! body = count varint
//!        pool_len varint, pool_len × (byte_len varint, utf-8 bytes)   strictly ascending
//!        count × record                                               ascending id
//! record = id_delta varint, name, owner, phone, sector u8, subsector,
//!          product_count varint, product_count × product, district, village, subvillage
//! ```
//! Every string field is a varint index into the pool. The content version is
//! the first 8 bytes of SHA-256 over the body, so two directories with equal
//! records always produce identical bytes and the same version.

use std::collections::{BTreeSet, HashMap};

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{Business, Directory, DirectoryError, Sector, MAX_PRODUCTS};
use crate::varint::{self, VarintError};

pub const MAGIC: &[u8; 4] = b"EKD1";
pub const FORMAT_VERSION: u8 = 1;
const HEADER_LEN: usize = MAGIC.len() + 1 + 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SnapshotError {
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported snapshot format {0}")]
    UnsupportedFormat(u8),
    #[error("snapshot truncated in {section}")]
    Truncated { section: &'static str },
    #[error("varint overflow in {section}")]
    Overflow { section: &'static str },
    #[error("pool string {index} is not valid utf-8")]
    InvalidUtf8 { index: usize },
    #[error("pool string {index} breaks ascending order")]
    PoolNotCanonical { index: usize },
    #[error("record {record} references pool index {index} beyond pool of {pool_len}")]
    DanglingPoolIndex { record: usize, index: u64, pool_len: usize },
    #[error("record {record}: {reason}")]
    InvalidRecord { record: usize, reason: String },
    #[error("{0} trailing bytes after last record")]
    TrailingBytes(usize),
    #[error("content hash mismatch: header says {expected}, body hashes to {computed}")]
    ContentHashMismatch { expected: String, computed: String },
    #[error("decoded records are invalid: {0}")]
    InvalidDirectory(DirectoryError),
}

pub fn encode_snapshot(directory: &Directory) -> Vec<u8> {
    let body = encode_body(directory);
    let digest = Sha256::digest(&body);
    let mut out = Vec::with_capacity(HEADER_LEN + body.len());
    out.extend_from_slice(MAGIC);
    out.push(FORMAT_VERSION);
    out.extend_from_slice(&digest[..8]);
    out.extend_from_slice(&body);
    out
}

pub(crate) fn content_version(directory: &Directory) -> String {
    hex(&Sha256::digest(encode_body(directory))[..8])
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn strings_of(b: &Business) -> impl Iterator<Item = &str> {
    [&b.name, &b.owner_name, &b.phone, &b.subsector, &b.district, &b.village, &b.subvillage]
        .into_iter()
        .chain(b.products.iter())
        .map(String::as_str)
}

fn encode_body(directory: &Directory) -> Vec<u8> {
    let pool: BTreeSet<&str> = directory.businesses().iter().flat_map(strings_of).collect();
    let index: HashMap<&str, u64> = pool.iter().enumerate().map(|(i, s)| (*s, i as u64)).collect();

    let mut out = Vec::new();
    varint::write_u64(&mut out, directory.len() as u64);
    varint::write_u64(&mut out, pool.len() as u64);
    for s in &pool {
        varint::write_u64(&mut out, s.len() as u64);
        out.extend_from_slice(s.as_bytes());
    }

    let mut prev_id = 0u32;
    for b in directory.businesses() {
        varint::write_u64(&mut out, u64::from(b.id - prev_id));
        prev_id = b.id;
        for s in [&b.name, &b.owner_name, &b.phone] {
            varint::write_u64(&mut out, index[s.as_str()]);
        }
        out.push(b.sector.code());
        varint::write_u64(&mut out, index[b.subsector.as_str()]);
        varint::write_u64(&mut out, b.products.len() as u64);
        for p in &b.products {
            varint::write_u64(&mut out, index[p.as_str()]);
        }
        for s in [&b.district, &b.village, &b.subvillage] {
            varint::write_u64(&mut out, index[s.as_str()]);
        }
    }
    out
}

struct Cursor<'a> {
    buf: &'a [u8],
}

impl<'a> Cursor<'a> {
    fn varint(&mut self, section: &'static str) -> Result<u64, SnapshotError> {
        varint::read_u64(&mut self.buf).map_err(|e| match e {
            VarintError::Truncated => SnapshotError::Truncated { section },
            VarintError::Overflow => SnapshotError::Overflow { section },
        })
    }

    fn byte(&mut self, section: &'static str) -> Result<u8, SnapshotError> {
        let (&b, rest) = self.buf.split_first().ok_or(SnapshotError::Truncated { section })?;
        self.buf = rest;
        Ok(b)
    }

    fn take(&mut self, n: u64, section: &'static str) -> Result<&'a [u8], SnapshotError> {
        let n = usize::try_from(n).map_err(|_| SnapshotError::Truncated { section })?;
        if n > self.buf.len() {
            return Err(SnapshotError::Truncated { section });
        }
        let (head, rest) = self.buf.split_at(n);
        self.buf = rest;
        Ok(head)
    }
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<Directory, SnapshotError> {
    if bytes.len() < MAGIC.len() {
        return Err(SnapshotError::Truncated { section: "header" });
    }
    if &bytes[..MAGIC.len()] != MAGIC {
        return Err(SnapshotError::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(SnapshotError::Truncated { section: "header" });
    }
    if bytes[4] != FORMAT_VERSION {
        return Err(SnapshotError::UnsupportedFormat(bytes[4]));
    }
    let stored_version = &bytes[5..HEADER_LEN];
    let body = &bytes[HEADER_LEN..];
    let mut cur = Cursor { buf: body };

    let count = cur.varint("count")?;
    let pool_len = cur.varint("pool")?;
    let mut pool: Vec<String> = Vec::with_capacity(pool_len.min(body.len() as u64) as usize);
    for index in 0..pool_len as usize {
        let len = cur.varint("pool")?;
        let raw = cur.take(len, "pool")?;
        let s = std::str::from_utf8(raw).map_err(|_| SnapshotError::InvalidUtf8 { index })?;
        if pool.last().is_some_and(|prev| prev.as_str() >= s) {
            return Err(SnapshotError::PoolNotCanonical { index });
        }
        pool.push(s.to_string());
    }

    let mut businesses = Vec::with_capacity(count.min(cur.buf.len() as u64) as usize);
    let mut prev_id = 0u64;
    for record in 0..count as usize {
        let string = |cur: &mut Cursor<'_>| -> Result<String, SnapshotError> {
            let index = cur.varint("records")?;
            pool.get(index as usize).cloned().ok_or(SnapshotError::DanglingPoolIndex {
                record,
                index,
                pool_len: pool.len(),
            })
        };
        let delta = cur.varint("records")?;
        if delta == 0 {
            return Err(SnapshotError::InvalidRecord { record, reason: "ids not strictly ascending".into() });
        }
        let id = prev_id + delta;
        let id32 = u32::try_from(id)
            .map_err(|_| SnapshotError::InvalidRecord { record, reason: format!("id {id} out of range") })?;
        prev_id = id;

        let name = string(&mut cur)?;
        let owner_name = string(&mut cur)?;
        let phone = string(&mut cur)?;
        let code = cur.byte("records")?;
        let sector = Sector::from_code(code)
            .ok_or_else(|| SnapshotError::InvalidRecord { record, reason: format!("sector code {code}") })?;
        let subsector = string(&mut cur)?;
        let product_count = cur.varint("records")?;
        if product_count > MAX_PRODUCTS as u64 {
            return Err(SnapshotError::InvalidRecord {
                record,
                reason: format!("{product_count} products"),
            });
        }
        let products = (0..product_count).map(|_| string(&mut cur)).collect::<Result<Vec<_>, _>>()?;
        let district = string(&mut cur)?;
        let village = string(&mut cur)?;
        let subvillage = string(&mut cur)?;
        businesses.push(Business {
            id: id32,
            name,
            owner_name,
            phone,
            sector,
            subsector,
            products,
            district,
            village,
            subvillage,
        });
    }
    if !cur.buf.is_empty() {
        return Err(SnapshotError::TrailingBytes(cur.buf.len()));
    }

    let computed = &Sha256::digest(body)[..8];
    if computed != stored_version {
        return Err(SnapshotError::ContentHashMismatch {
            expected: hex(stored_version),
            computed: hex(computed),
        });
    }
    Directory::new(businesses).map_err(SnapshotError::InvalidDirectory)
}

/// Reads the content version out of a snapshot header without decoding it.
pub fn snapshot_version(bytes: &[u8]) -> Option<String> {
    (bytes.len() >= HEADER_LEN && &bytes[..4] == MAGIC).then(|| hex(&bytes[5..HEADER_LEN]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directory::generate_synthetic;
    use crate::directory::testutil::business;
    use proptest::prelude::*;

    #[test]
    fn empty_directory_is_header_plus_two_zero_counts() {
        let bytes = encode_snapshot(&Directory::empty());
        assert_eq!(&bytes[..4], b"EKD1");
        assert_eq!(bytes[4], FORMAT_VERSION);
        assert_eq!(&bytes[HEADER_LEN..], &[0, 0]);
        assert_eq!(decode_snapshot(&bytes).unwrap(), Directory::empty());
    }

    #[test]
    fn two_record_layout_is_exact() {
        let mut a = business(1, "Duka", Sector::Retailers, ("D", "V", "S"));
        a.owner_name = "Asha".into();
        a.phone = "255712345678".into();
        a.subsector = "shops".into();
        a.products = vec!["mbegu".into()];
        let mut b = a.clone();
        b.id = 3;
        b.sector = Sector::Transporters;
        b.products.clear();
        let d = Directory::new(vec![a, b]).unwrap();
        let bytes = encode_snapshot(&d);
        let body = &bytes[HEADER_LEN..];
        // pool (byte order): "255712345678" "Asha" "D" "Duka" "S" "V" "mbegu" "shops"
        let mut expected = vec![2u8, 8];
        for s in ["255712345678", "Asha", "D", "Duka", "S", "V", "mbegu", "shops"] {
            expected.push(s.len() as u8);
            expected.extend_from_slice(s.as_bytes());
        }
        expected.extend_from_slice(&[1, 3, 1, 0, 2, 7, 1, 6, 2, 5, 4]);
        expected.extend_from_slice(&[2, 3, 1, 0, 3, 7, 0, 2, 5, 4]);
        assert_eq!(body, expected.as_slice());
        assert_eq!(snapshot_version(&bytes).unwrap(), d.version());
    }

    #[test]
    fn distinct_error_kinds() {
        let d = generate_synthetic(1, 10).unwrap();
        let good = encode_snapshot(&d);

        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        assert_eq!(decode_snapshot(&bad_magic), Err(SnapshotError::BadMagic));

        let mut bad_format = good.clone();
        bad_format[4] = 9;
        assert_eq!(decode_snapshot(&bad_format), Err(SnapshotError::UnsupportedFormat(9)));

        // cut inside the first pool string
        let truncated = &good[..HEADER_LEN + 4];
        assert_eq!(decode_snapshot(truncated), Err(SnapshotError::Truncated { section: "pool" }));

        // point the first record's name at a pool slot that does not exist
        let pool_end = pool_end_offset(&good);
        let mut dangling = good[..pool_end].to_vec();
        dangling.push(1); // id delta
        dangling.push(0x7f); // name index 127, pool is smaller
        let rest = &good[pool_end + 2..];
        dangling.extend_from_slice(rest);
        assert!(matches!(
            decode_snapshot(&dangling),
            Err(SnapshotError::DanglingPoolIndex { record: 0, index: 127, .. })
        ));

        let mut trailing = good.clone();
        trailing.push(0);
        assert_eq!(decode_snapshot(&trailing), Err(SnapshotError::TrailingBytes(1)));
    }

    fn pool_end_offset(bytes: &[u8]) -> usize {
        let mut buf = &bytes[HEADER_LEN..];
        let start = buf.len();
        varint::read_u64(&mut buf).unwrap();
        let n = varint::read_u64(&mut buf).unwrap();
        for _ in 0..n {
            let len = varint::read_u64(&mut buf).unwrap() as usize;
            buf = &buf[len..];
        }
        HEADER_LEN + start - buf.len()
    }

    #[test]
    fn every_single_byte_flip_in_the_pool_is_detected() {
        let d = generate_synthetic(1, 10).unwrap();
        let good = encode_snapshot(&d);
        for offset in HEADER_LEN..pool_end_offset(&good) {
            for mask in [0x01u8, 0x20, 0x80] {
                let mut bytes = good.clone();
                bytes[offset] ^= mask;
                assert!(decode_snapshot(&bytes).is_err(), "flip {mask:#x} at {offset} went unnoticed");
            }
        }
    }

    #[test]
    fn version_tracks_content() {
        let d = generate_synthetic(1, 10).unwrap();
        let decoded = decode_snapshot(&encode_snapshot(&d)).unwrap();
        assert_eq!(d.version(), decoded.version());
        assert_eq!(d.version().len(), 16);

        let mut businesses = d.businesses().to_vec();
        businesses[4].owner_name.push('x');
        let changed = Directory::new(businesses).unwrap();
        assert_ne!(changed.version(), d.version());
    }

    fn arb_business(id: u32) -> impl Strategy<Value = Business> {
        let label = "[A-Za-z][a-z ]{0,11}";
        (
            label,
            label,
            "2557[0-9]{8}",
            1u8..=6,
            prop::collection::vec("[a-z]{1,8}", 0..=MAX_PRODUCTS),
            prop::sample::select(vec!["Ngara", "Bukoba", "Kyerwa"]),
            prop::sample::select(vec!["Kanazi", "Rubale", "Kemondo"]),
            prop::sample::select(vec!["Sokoni", "Mtoni"]),
            prop::sample::select(vec!["shops", "boda boda", "tailors"]),
        )
            .prop_map(move |(name, owner, phone, sector, products, d, v, s, sub)| Business {
                id,
                name,
                owner_name: owner,
                phone,
                sector: Sector::from_code(sector).unwrap(),
                subsector: sub.to_string(),
                products,
                district: d.to_string(),
                village: v.to_string(),
                subvillage: s.to_string(),
            })
    }

    fn arb_directory() -> impl Strategy<Value = Directory> {
        prop::collection::btree_set(1u32..100_000, 0..500)
            .prop_flat_map(|ids| ids.into_iter().map(arb_business).collect::<Vec<_>>())
            .prop_map(|bs| Directory::new(bs).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn roundtrip_is_lossless(d in arb_directory()) {
            let bytes = encode_snapshot(&d);
            let back = decode_snapshot(&bytes).unwrap();
            prop_assert_eq!(&back, &d);
            prop_assert_eq!(encode_snapshot(&back), bytes);
        }

        #[test]
        fn input_order_does_not_matter(d in arb_directory(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut shuffled = d.businesses().to_vec();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let again = Directory::new(shuffled).unwrap();
            prop_assert_eq!(encode_snapshot(&again), encode_snapshot(&d));
        }
    }
}
