//! Line formats of the server hit log and the client action store.
//!
//! Both are UTF-8, one record per line, tab-separated:
//!
//! ```text
//! hit log:      unix_seconds \t session_id \t msisdn \t node \t input
//! action store: unix_seconds \t msisdn \t action \t payload
//! ```
//!
//! Free-text fields escape `\` as `\\`, tab as `\t` and newline as `\n`.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("expected {expected} tab-separated fields, found {found}")]
    FieldCount { expected: usize, found: usize },
    #[error("timestamp {0:?} is not a number")]
    Timestamp(String),
    #[error("bad escape sequence in {0:?}")]
    Escape(String),
    #[error("field `{0}` is empty")]
    Empty(&'static str),
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

pub fn unescape(s: &str) -> Result<String, RecordError> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            _ => return Err(RecordError::Escape(s.to_string())),
        }
    }
    Ok(out)
}

fn split(line: &str, expected: usize) -> Result<Vec<&str>, RecordError> {
    let fields: Vec<&str> = line.trim_end_matches(['\n', '\r']).split('\t').collect();
    if fields.len() != expected {
        return Err(RecordError::FieldCount { expected, found: fields.len() });
    }
    Ok(fields)
}

fn timestamp(raw: &str) -> Result<u64, RecordError> {
    raw.parse().map_err(|_| RecordError::Timestamp(raw.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HitRecord {
    pub ts: u64,
    pub session_id: String,
    pub msisdn: String,
    pub node: String,
    pub input: String,
}

/// Node tag logged for requests refused by the whitelist.
pub const REFUSED_NODE: &str = "Refused";

impl HitRecord {
    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.ts,
            escape(&self.session_id),
            self.msisdn,
            self.node,
            escape(&self.input)
        )
    }

    pub fn parse(line: &str) -> Result<Self, RecordError> {
        let f = split(line, 5)?;
        let session_id = unescape(f[1])?;
        if session_id.is_empty() {
            return Err(RecordError::Empty("session_id"));
        }
        if f[3].is_empty() {
            return Err(RecordError::Empty("node"));
        }
        Ok(Self {
            ts: timestamp(f[0])?,
            session_id,
            msisdn: f[2].to_string(),
            node: f[3].to_string(),
            input: unescape(f[4])?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionLine {
    pub ts: u64,
    pub msisdn: String,
    pub action: String,
    pub payload: String,
}

impl ActionLine {
    pub fn to_line(&self) -> String {
        format!("{}\t{}\t{}\t{}", self.ts, self.msisdn, self.action, escape(&self.payload))
    }

    pub fn parse(line: &str) -> Result<Self, RecordError> {
        let f = split(line, 4)?;
        if f[1].is_empty() {
            return Err(RecordError::Empty("msisdn"));
        }
        if f[2].is_empty() {
            return Err(RecordError::Empty("action"));
        }
        Ok(Self { ts: timestamp(f[0])?, msisdn: f[1].to_string(), action: f[2].to_string(), payload: unescape(f[3])? })
    }
}
