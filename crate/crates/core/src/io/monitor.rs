//! Delimited bus-monitor logs (one observed packet per line) folded into a
//! corpus: lines with equal timestamps become one step.

use super::{syntax, FormatError};
use crate::kv;
use crate::model::{Corpus, EventId, Message, Step, Trace, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    Char(char),
    Whitespace,
}

impl Delimiter {
    fn split<'a>(&self, line: &'a str) -> Vec<&'a str> {
        match self {
            Delimiter::Char(c) => line.split(*c).map(str::trim).collect(),
            Delimiter::Whitespace => line.split_whitespace().collect(),
        }
    }
}

/// Column positions (0-based) of the fields needed to build a message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMap {
    pub delimiter: Delimiter,
    pub timestamp: usize,
    pub source: usize,
    pub destination: usize,
    pub command: usize,
    /// Skip the first non-comment line.
    pub header: bool,
}

impl Default for FieldMap {
    fn default() -> Self {
        FieldMap { delimiter: Delimiter::Char(','), timestamp: 0, source: 1, destination: 2, command: 3, header: false }
    }
}

impl FieldMap {
    /// Reads `delimiter`, `header`, `timestamp`, `source`, `destination`,
    /// `command` keys. Column values are indices, or header names when
    /// `header_line` is given.
    pub fn from_kv_text(text: &str, header_line: Option<&str>) -> Result<Self, FormatError> {
        let pairs = kv::parse(text).map_err(|e| FormatError::Config(e.to_string()))?;
        let mut map = FieldMap::default();
        if let Some(d) = pairs.get("delimiter") {
            map.delimiter = match d.as_str() {
                "whitespace" | "space" => Delimiter::Whitespace,
                "tab" | "\\t" => Delimiter::Char('\t'),
                "comma" => Delimiter::Char(','),
                s if s.chars().count() == 1 => Delimiter::Char(s.chars().next().unwrap()),
                s => return Err(FormatError::Config(format!("bad delimiter {s:?}"))),
            };
        }
        if let Some(h) = pairs.get("header") {
            map.header = kv::value("header", h).map_err(|e| FormatError::Config(e.to_string()))?;
        }
        let names: Vec<&str> = header_line.map(|h| map.delimiter.split(h)).unwrap_or_default();
        let column = |key: &str, default: usize| -> Result<usize, FormatError> {
            let Some(v) = pairs.get(key) else { return Ok(default) };
            if let Ok(n) = v.parse() {
                return Ok(n);
            }
            names
                .iter()
                .position(|n| n == v)
                .ok_or_else(|| FormatError::Config(format!("column {v:?} for {key} not found in header")))
        };
        map.timestamp = column("timestamp", map.timestamp)?;
        map.source = column("source", map.source)?;
        map.destination = column("destination", map.destination)?;
        map.command = column("command", map.command)?;
        for k in pairs.keys() {
            if !matches!(k.as_str(), "delimiter" | "header" | "timestamp" | "source" | "destination" | "command") {
                return Err(FormatError::Config(format!("unknown field-map key {k:?}")));
            }
        }
        Ok(map)
    }

    fn width(&self) -> usize {
        1 + self.timestamp.max(self.source).max(self.destination).max(self.command)
    }
}

/// Builds a one-trace corpus from a monitor log. The vocabulary lists distinct
/// messages in order of first appearance. Timestamps are numeric and must not
/// decrease.
pub fn ingest_monitor_log(text: &str, map: &FieldMap) -> Result<Corpus, FormatError> {
    let mut vocabulary = Vocabulary::new();
    let mut steps: Vec<Step> = Vec::new();
    let mut current: Vec<EventId> = Vec::new();
    let mut last: Option<(f64, String)> = None;
    let mut header_pending = map.header;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if header_pending {
            header_pending = false;
            continue;
        }
        let fields = map.delimiter.split(line);
        if fields.len() < map.width() {
            return Err(syntax(lineno, format!("expected at least {} fields, found {}", map.width(), fields.len())));
        }
        let ts_text = fields[map.timestamp];
        let ts: f64 = ts_text
            .parse()
            .ok()
            .filter(|t: &f64| t.is_finite())
            .ok_or_else(|| syntax(lineno, format!("bad timestamp {ts_text:?}")))?;
        let message = Message::new(fields[map.source], fields[map.destination], fields[map.command])
            .map_err(|e| syntax(lineno, e.to_string()))?;
        let id = vocabulary.intern(message);

        match &last {
            Some((prev, _)) if ts == *prev => {}
            Some((prev, prev_text)) if ts < *prev => {
                return Err(FormatError::NonMonotonic {
                    line: lineno,
                    previous: prev_text.clone(),
                    current: ts_text.to_string(),
                });
            }
            _ => {
                if !current.is_empty() {
                    steps.push(Step::new(std::mem::take(&mut current)).expect("nonempty, deduplicated"));
                }
                last = Some((ts, ts_text.to_string()));
            }
        }
        if !current.contains(&id) {
            current.push(id);
        }
    }
    if !current.is_empty() {
        steps.push(Step::new(current).expect("nonempty, deduplicated"));
    }
    Ok(Corpus { vocabulary, traces: vec![Trace::new(steps)], provenance: "monitor-log".to_string() })
}
