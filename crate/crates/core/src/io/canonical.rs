//! Canonical corpus file.
//!
//! ```text
//! provenance fig1 example
//! event 0 cpu0:cache:wr_req
//! event 1 cpu0:cache:rd_req
//! trace
//! 1 3
//! 2
//! ```
//!
//! `event` headers come first and must cover ids `0..n` exactly. Each `trace`
//! line opens a new trace; every following line is one step. Step tokens are
//! numeric ids or rendered message names. Blank lines and `#` comments are
//! ignored. `provenance` is optional.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{syntax, FormatError};
use crate::model::{Corpus, EventId, Message, Step, Trace, Vocabulary};

pub fn parse_canonical(text: &str) -> Result<Corpus, FormatError> {
    let mut declared: BTreeMap<u32, (usize, Message)> = BTreeMap::new();
    let mut vocabulary: Option<Vocabulary> = None;
    let mut traces: Vec<Trace> = Vec::new();
    let mut provenance: Option<String> = None;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (keyword, rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (line, ""),
        };
        match keyword {
            "provenance" => {
                if provenance.replace(rest.to_string()).is_some() {
                    return Err(syntax(lineno, "duplicate provenance line"));
                }
            }
            "event" => {
                if vocabulary.is_some() {
                    return Err(syntax(lineno, "event declaration after the first trace"));
                }
                let (id, name) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| syntax(lineno, "expected `event <id> <src:dst:cmd>`"))?;
                let id: u32 = id.parse().map_err(|_| syntax(lineno, format!("bad event id {id:?}")))?;
                let msg = Message::parse(name.trim()).map_err(|e| syntax(lineno, e.to_string()))?;
                if declared.insert(id, (lineno, msg)).is_some() {
                    return Err(syntax(lineno, format!("event {id} declared twice")));
                }
            }
            "trace" => {
                if !rest.is_empty() {
                    return Err(syntax(lineno, "unexpected text after `trace`"));
                }
                if vocabulary.is_none() {
                    vocabulary = Some(build_vocabulary(std::mem::take(&mut declared))?);
                }
                traces.push(Trace::default());
            }
            _ => {
                let vocab = vocabulary
                    .as_ref()
                    .ok_or_else(|| syntax(lineno, format!("unexpected line {line:?} before the first `trace`")))?;
                let events = line
                    .split_whitespace()
                    .map(|tok| resolve(tok, vocab, lineno))
                    .collect::<Result<Vec<_>, _>>()?;
                let step = Step::new(events).map_err(|e| syntax(lineno, e.to_string()))?;
                traces.last_mut().expect("vocabulary is built on the first trace").steps.push(step);
            }
        }
    }

    let vocabulary = match vocabulary {
        Some(v) => v,
        None => build_vocabulary(declared)?,
    };
    Ok(Corpus { vocabulary, traces, provenance: provenance.unwrap_or_default() })
}

fn build_vocabulary(declared: BTreeMap<u32, (usize, Message)>) -> Result<Vocabulary, FormatError> {
    let mut vocab = Vocabulary::new();
    for (expected, (id, (lineno, msg))) in declared.into_iter().enumerate() {
        if id as usize != expected {
            return Err(syntax(lineno, format!("event ids must be dense; expected {expected}, found {id}")));
        }
        vocab.push(msg).map_err(|e| syntax(lineno, e.to_string()))?;
    }
    Ok(vocab)
}

fn resolve(tok: &str, vocab: &Vocabulary, lineno: usize) -> Result<EventId, FormatError> {
    let unknown = || FormatError::UnknownEvent { line: lineno, name: tok.to_string() };
    if let Ok(n) = tok.parse::<u32>() {
        let id = EventId(n);
        return if vocab.contains(id) { Ok(id) } else { Err(unknown()) };
    }
    vocab.lookup(tok).ok_or_else(unknown)
}

pub(super) fn emit_canonical(corpus: &Corpus) -> String {
    let mut out = String::new();
    if !corpus.provenance.is_empty() {
        let one_line = corpus.provenance.replace(['\n', '\r'], " ");
        writeln!(out, "provenance {}", one_line.trim()).unwrap();
    }
    for (i, m) in corpus.vocabulary.entries().iter().enumerate() {
        writeln!(out, "event {i} {m}").unwrap();
    }
    for trace in &corpus.traces {
        out.push_str("trace\n");
        for step in &trace.steps {
            out.push_str(&crate::model::join_ids(step.events()));
            out.push('\n');
        }
    }
    out
}
