//! Compact session strings.
//!
//! `v1|msisdn|node|path|sector|subsector|district|village|subvillage|page|
//! stack|text_kind|query|keyword|candidates|selected|last_active`
//!
//! `-` marks an absent value. Labels are percent-encoded so they never
//! contain `|`, `,`, `:`, `.`, `-`, `%` or whitespace. The stack is a
//! `.`-joined list of node tag + page (`W0.S1`), the keyword is
//! `kind:text` and candidates are comma-separated keyword ids.

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, CONTROLS};
use thiserror::Error;

use super::{EntryPath, Frame, Node, SessionState, TextKind};
use crate::directory::Sector;
use crate::search::{FilterState, KeywordKind, KeywordRef};

pub const COMPACT_VERSION: &str = "v1";
const FIELDS: usize = 17;
const NONE: &str = "-";

const LABEL: &AsciiSet = &CONTROLS.add(b' ').add(b'|').add(b',').add(b':').add(b'.').add(b'-').add(b'%');

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompactError {
    #[error("unsupported session format {0:?}")]
    Version(String),
    #[error("expected {FIELDS} fields, found {0}")]
    FieldCount(usize),
    #[error("field {index} ({name}): {reason}")]
    Field { index: usize, name: &'static str, reason: String },
}

fn label(v: &str) -> String {
    utf8_percent_encode(v, LABEL).to_string()
}

fn opt_label(v: Option<&str>) -> String {
    v.map_or_else(|| NONE.to_string(), label)
}

pub fn serialize_session(s: &SessionState) -> String {
    let f = &s.filters;
    let stack = if s.stack.is_empty() {
        NONE.to_string()
    } else {
        s.stack.iter().map(|fr| format!("{}{}", fr.node.tag(), fr.page)).collect::<Vec<_>>().join(".")
    };
    let keyword = s.keyword.as_ref().map_or_else(|| NONE.to_string(), |k| format!("{}:{}", k.kind.name(), label(&k.text)));
    let candidates = s.candidates.as_ref().map_or_else(
        || NONE.to_string(),
        |c| c.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
    );
    let fields = [
        COMPACT_VERSION.to_string(),
        s.msisdn.clone(),
        s.node.tag().to_string(),
        s.entry_path.map_or_else(|| NONE.to_string(), |p| p.tag().to_string()),
        f.sector.map_or_else(|| NONE.to_string(), |x| x.code().to_string()),
        opt_label(f.subsector.as_deref()),
        opt_label(f.district.as_deref()),
        opt_label(f.village.as_deref()),
        opt_label(f.subvillage.as_deref()),
        s.page.to_string(),
        stack,
        s.text_kind.map_or_else(|| NONE.to_string(), |k| k.tag().to_string()),
        opt_label(s.query.as_deref()),
        keyword,
        candidates,
        s.selected_business.map_or_else(|| NONE.to_string(), |id| id.to_string()),
        s.last_active.to_string(),
    ];
    fields.join("|")
}

const NAMES: [&str; FIELDS] = [
    "version",
    "msisdn",
    "node",
    "path",
    "sector",
    "subsector",
    "district",
    "village",
    "subvillage",
    "page",
    "stack",
    "text_kind",
    "query",
    "keyword",
    "candidates",
    "selected",
    "last_active",
];

pub fn deserialize_session(raw: &str) -> Result<SessionState, CompactError> {
    let fields: Vec<&str> = raw.split('|').collect();
    if fields[0] != COMPACT_VERSION {
        return Err(CompactError::Version(fields[0].to_string()));
    }
    if fields.len() != FIELDS {
        return Err(CompactError::FieldCount(fields.len()));
    }
    let err = |index: usize, reason: &str| CompactError::Field { index, name: NAMES[index], reason: reason.to_string() };
    let opt = |index: usize| (fields[index] != NONE).then_some(fields[index]);
    let text = |index: usize| -> Result<Option<String>, CompactError> {
        opt(index)
            .map(|v| percent_decode_str(v).decode_utf8().map(|c| c.into_owned()).map_err(|_| err(index, "invalid UTF-8")))
            .transpose()
    };
    let single = |index: usize| -> Result<Option<char>, CompactError> {
        match opt(index) {
            None => Ok(None),
            Some(v) => {
                let mut chars = v.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Ok(Some(c)),
                    _ => Err(err(index, "expected one character")),
                }
            }
        }
    };
    let number = |index: usize| -> Result<Option<u64>, CompactError> {
        opt(index).map(|v| v.parse::<u64>().map_err(|_| err(index, "not a number"))).transpose()
    };

    let msisdn = fields[1];
    if msisdn.is_empty() || !msisdn.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err(1, "not a digit string"));
    }
    let node = single(2)?.and_then(Node::from_tag).ok_or_else(|| err(2, "unknown node"))?;
    let entry_path = single(3)?.map(|c| EntryPath::from_tag(c).ok_or_else(|| err(3, "unknown path"))).transpose()?;
    let sector = number(4)?
        .map(|c| u8::try_from(c).ok().and_then(Sector::from_code).ok_or_else(|| err(4, "unknown sector")))
        .transpose()?;
    let filters = FilterState { sector, subsector: text(5)?, district: text(6)?, village: text(7)?, subvillage: text(8)? };
    if filters.check().is_err() {
        return Err(err(5, "facet set without its parent"));
    }
    let page = number(9)?.ok_or_else(|| err(9, "missing"))?;
    let page = u32::try_from(page).map_err(|_| err(9, "out of range"))?;
    let stack = match opt(10) {
        None => Vec::new(),
        Some(v) => v
            .split('.')
            .map(|f| {
                let mut chars = f.chars();
                let node = chars.next().and_then(Node::from_tag).ok_or_else(|| err(10, "unknown node"))?;
                let page = chars.as_str().parse::<u32>().map_err(|_| err(10, "bad page"))?;
                Ok(Frame { node, page })
            })
            .collect::<Result<_, CompactError>>()?,
    };
    let text_kind = single(11)?.map(|c| TextKind::from_tag(c).ok_or_else(|| err(11, "unknown text kind"))).transpose()?;
    let query = text(12)?;
    let keyword = match opt(13) {
        None => None,
        Some(v) => {
            let (kind, t) = v.split_once(':').ok_or_else(|| err(13, "expected kind:text"))?;
            let kind = KeywordKind::from_name(kind).ok_or_else(|| err(13, "unknown keyword kind"))?;
            let t = percent_decode_str(t).decode_utf8().map_err(|_| err(13, "invalid UTF-8"))?;
            Some(KeywordRef::new(kind, t.into_owned()))
        }
    };
    let candidates = match opt(14) {
        None => None,
        Some("") => Some(Vec::new()),
        Some(v) => Some(
            v.split(',')
                .map(|id| id.parse::<u32>().map_err(|_| err(14, "bad keyword id")))
                .collect::<Result<_, _>>()?,
        ),
    };
    let selected_business = number(15)?
        .map(|id| u32::try_from(id).map_err(|_| err(15, "out of range")))
        .transpose()?;
    let last_active = number(16)?.ok_or_else(|| err(16, "missing"))?;

    Ok(SessionState {
        msisdn: msisdn.to_string(),
        node,
        entry_path,
        filters,
        page,
        stack,
        text_kind,
        query,
        keyword,
        candidates,
        selected_business,
        last_active,
    })
}
