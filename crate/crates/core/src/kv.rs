//! `key=value` config files: one pair per line, `#` comments, blank lines ignored.

use std::collections::BTreeMap;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KvError {
    #[error("line {line}: expected key=value, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: duplicate key {key:?}")]
    Duplicate { line: usize, key: String },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("bad value {value:?} for {key}")]
    BadValue { key: String, value: String },
}

pub fn parse(text: &str) -> Result<BTreeMap<String, String>, KvError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| KvError::Malformed { line: i + 1, text: raw.to_string() })?;
        let key = k.trim().to_string();
        if key.is_empty() {
            return Err(KvError::Malformed { line: i + 1, text: raw.to_string() });
        }
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(KvError::Duplicate { line: i + 1, key });
        }
    }
    Ok(out)
}

pub fn value<T: FromStr>(key: &str, raw: &str) -> Result<T, KvError> {
    raw.parse()
        .map_err(|_| KvError::BadValue { key: key.to_string(), value: raw.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_skips_comments() {
        let m = parse("# c\nmode = SI\n\nseed=7\n").unwrap();
        assert_eq!(m["mode"], "SI");
        assert_eq!(m["seed"], "7");
    }

    #[test]
    fn reports_line_numbers() {
        assert_eq!(parse("a=1\nnope\n"), Err(KvError::Malformed { line: 2, text: "nope".into() }));
        assert!(matches!(parse("a=1\na=2"), Err(KvError::Duplicate { line: 2, .. })));
    }
}
