//! CSV ingestion with a fixed 10-column schema:
//!
//! `id,name,owner_name,phone,sector,subsector,products,district,village,subvillage`
//!
//! `products` is `;`-separated. `sector` is a code 1–6 or a sector label.
//! Row numbers in errors are file line numbers, so the first data row is 2.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use super::{Business, Directory, DirectoryError, Sector, MAX_PRODUCTS};
use crate::msisdn::normalize_msisdn;

pub const CSV_HEADER: [&str; 10] = [
    "id",
    "name",
    "owner_name",
    "phone",
    "sector",
    "subsector",
    "products",
    "district",
    "village",
    "subvillage",
];

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("header mismatch: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("row {row}, column \"{column}\": {reason}")]
    Field { row: u64, column: &'static str, reason: String },
    #[error("row {row}: duplicate id {id}")]
    DuplicateId { row: u64, id: u32 },
    #[error("row {row}: unknown sector {value:?}")]
    UnknownSector { row: u64, value: String },
    #[error("row {row}: {source}")]
    Malformed { row: u64, source: csv::Error },
    #[error(transparent)]
    Directory(#[from] DirectoryError),
    #[error("csv write failed: {0}")]
    Write(#[from] csv::Error),
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Directory, CsvError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|source| CsvError::Io { path: path.display().to_string(), source })?;
    parse_csv(file)
}

pub fn parse_csv<R: Read>(input: R) -> Result<Directory, CsvError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader
        .headers()
        .map_err(|source| CsvError::Malformed { row: 1, source })?
        .clone();
    let found: Vec<&str> = header.iter().map(str::trim).collect();
    if found != CSV_HEADER {
        return Err(CsvError::Header {
            expected: CSV_HEADER.join(","),
            found: found.join(","),
        });
    }

    let mut seen = HashSet::new();
    let mut businesses = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|source| {
            let row = source.position().map_or(0, |p| p.line());
            CsvError::Malformed { row, source }
        })?;
        let row = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("").trim();
        let required = |i: usize| -> Result<String, CsvError> {
            let v = field(i);
            if v.is_empty() {
                Err(CsvError::Field { row, column: CSV_HEADER[i], reason: "empty value".into() })
            } else {
                Ok(v.to_string())
            }
        };

        let id: u32 = required(0)?.parse().ok().filter(|&id| id > 0).ok_or_else(|| {
            CsvError::Field { row, column: "id", reason: format!("{:?} is not a positive integer", field(0)) }
        })?;
        if !seen.insert(id) {
            return Err(CsvError::DuplicateId { row, id });
        }
        let phone = normalize_msisdn(&required(3)?)
            .map_err(|e| CsvError::Field { row, column: "phone", reason: e.to_string() })?;
        let sector_raw = required(4)?;
        let sector = Sector::parse(&sector_raw)
            .ok_or_else(|| CsvError::UnknownSector { row, value: sector_raw.clone() })?;
        let products: Vec<String> = field(6)
            .split(';')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(str::to_string)
            .collect();
        if products.len() > MAX_PRODUCTS {
            return Err(CsvError::Field {
                row,
                column: "products",
                reason: format!("{} terms, at most {MAX_PRODUCTS} allowed", products.len()),
            });
        }

        businesses.push(Business {
            id,
            name: required(1)?,
            owner_name: required(2)?,
            phone: phone.to_string(),
            sector,
            subsector: required(5)?,
            products,
            district: required(7)?,
            village: required(8)?,
            subvillage: required(9)?,
        });
    }
    Ok(Directory::new(businesses)?)
}

pub fn write_csv<W: Write>(directory: &Directory, out: W) -> Result<(), CsvError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for b in directory.businesses() {
        let id = b.id.to_string();
        let products = b.products.join(";");
        writer.write_record([
            id.as_str(),
            &b.name,
            &b.owner_name,
            &b.phone,
            b.sector.label(),
            &b.subsector,
            &products,
            &b.district,
            &b.village,
            &b.subvillage,
        ])?;
    }
    writer.flush().map_err(|e| CsvError::Write(e.into()))?;
    Ok(())
}
