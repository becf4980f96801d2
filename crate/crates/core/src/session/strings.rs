use std::collections::HashMap;

use thiserror::Error;

const BUILTIN: &str = include_str!("strings.txt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StringsError {
    #[error("line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: value for {key:?} is empty")]
    EmptyValue { line: usize, key: String },
}

/// Localized screen strings keyed by dotted names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strings {
    map: HashMap<String, String>,
}

impl Default for Strings {
    fn default() -> Self {
        let mut map = HashMap::new();
        parse_into(BUILTIN, &mut map, false).expect("builtin string table parses");
        Self { map }
    }
}

impl Strings {
    /// Built-in table overlaid with the entries of `table`. Keys that the
    /// built-in table does not define are rejected.
    pub fn with_overrides(table: &str) -> Result<Self, StringsError> {
        let mut strings = Self::default();
        parse_into(table, &mut strings.map, true)?;
        Ok(strings)
    }

    pub fn get(&self, key: &str) -> &str {
        self.map.get(key).map_or("", String::as_str)
    }

    /// `get(key)` with `{name}` placeholders replaced.
    pub fn fill(&self, key: &str, args: &[(&str, &str)]) -> String {
        let mut out = self.get(key).to_string();
        for (name, value) in args {
            out = out.replace(&format!("{{{name}}}"), value);
        }
        out
    }
}

fn parse_into(text: &str, map: &mut HashMap<String, String>, known_only: bool) -> Result<(), StringsError> {
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or(StringsError::Syntax { line })?;
        let key = key.trim();
        let value = value.trim().replace("\\n", "\n");
        if key.is_empty() {
            return Err(StringsError::Syntax { line });
        }
        if value.is_empty() {
            return Err(StringsError::EmptyValue { line, key: key.to_string() });
        }
        if known_only && !map.contains_key(key) {
            return Err(StringsError::UnknownKey { line, key: key.to_string() });
        }
        map.insert(key.to_string(), value);
    }
    Ok(())
}
