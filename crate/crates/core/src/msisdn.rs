//! Tanzanian subscriber number normalization.
//!
//! Canonical form is 12 ASCII digits starting with the country code `255`.
//! Accepted raw shapes, after every non-digit is stripped:
//! `255XXXXXXXXX`, `0XXXXXXXXX` and bare `XXXXXXXXX`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const COUNTRY_CODE: &str = "255";
pub const CANONICAL_LEN: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MsisdnError {
    #[error("phone number is empty")]
    Empty,
    #[error("invalid format: {0:?}")]
    InvalidFormat(String),
}

/// A canonical phone number.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Msisdn(String);

impl Msisdn {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True when `s` is already canonical.
    pub fn is_canonical(s: &str) -> bool {
        s.len() == CANONICAL_LEN
            && s.starts_with(COUNTRY_CODE)
            && s.bytes().all(|b| b.is_ascii_digit())
    }
}

impl fmt::Display for Msisdn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Msisdn {
    type Err = MsisdnError;

    fn from_str(raw: &str) -> Result<Self, Self::Err> {
        normalize_msisdn(raw)
    }
}

impl TryFrom<String> for Msisdn {
    type Error = MsisdnError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        normalize_msisdn(&value)
    }
}

impl From<Msisdn> for String {
    fn from(value: Msisdn) -> Self {
        value.0
    }
}

pub fn normalize_msisdn(raw: &str) -> Result<Msisdn, MsisdnError> {
    if raw.trim().is_empty() {
        return Err(MsisdnError::Empty);
    }
    let digits: String = raw.chars().filter(char::is_ascii_digit).collect();
    let canonical = if digits.starts_with(COUNTRY_CODE) && digits.len() == CANONICAL_LEN {
        digits
    } else if digits.starts_with('0') && digits.len() == CANONICAL_LEN - 2 {
        format!("{COUNTRY_CODE}{}", &digits[1..])
    } else if !digits.starts_with('0') && digits.len() == CANONICAL_LEN - 3 {
        format!("{COUNTRY_CODE}{digits}")
    } else {
        return Err(MsisdnError::InvalidFormat(raw.to_string()));
    };
    Ok(Msisdn(canonical))
}
