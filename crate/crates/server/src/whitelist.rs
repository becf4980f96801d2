//! Study whitelist: canonical msisdns loaded from a one-number-per-line file.

use std::collections::HashSet;

use kichabi_core::msisdn::{normalize_msisdn, MsisdnError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {source}")]
pub struct WhitelistError {
    pub line: usize,
    pub source: MsisdnError,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Whitelist {
    numbers: HashSet<String>,
}

impl Whitelist {
    /// Blank lines and lines starting with `#` are ignored; anything else
    /// must normalize.
    pub fn parse(text: &str) -> Result<Self, WhitelistError> {
        let mut numbers = HashSet::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let m = normalize_msisdn(line).map_err(|source| WhitelistError { line: i + 1, source })?;
            numbers.insert(m.to_string());
        }
        Ok(Self { numbers })
    }

    pub fn from_numbers<I, S>(numbers: I) -> Result<Self, MsisdnError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let numbers = numbers
            .into_iter()
            .map(|n| normalize_msisdn(n.as_ref()).map(|m| m.to_string()))
            .collect::<Result<_, _>>()?;
        Ok(Self { numbers })
    }

    /// Membership of an already canonical number.
    pub fn contains(&self, canonical: &str) -> bool {
        self.numbers.contains(canonical)
    }

    pub fn len(&self) -> usize {
        self.numbers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numbers.is_empty()
    }
}
