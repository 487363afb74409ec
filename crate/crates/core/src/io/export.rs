use std::fmt;
use std::str::FromStr;

use super::canonical::emit_canonical;
use super::FormatError;
use crate::model::{join_ids, Corpus, EventId, Trace};

/// Output shapes accepted by the various mining tools.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExportFormat {
    Canonical,
    /// Items of a step separated by spaces, steps by ` -1 `, trace closed by
    /// ` -2`; one trace per line.
    ItemsetDash,
    /// One event per line; each trace is followed by `separator` on its own line.
    LinePerEvent { separator: String },
    /// One trace per line, events joined by single spaces.
    SpaceSeparated,
}

impl ExportFormat {
    pub fn line_per_event(separator: &str) -> Result<Self, FormatError> {
        if separator.trim().is_empty() || separator.contains('\n') {
            return Err(FormatError::Config("line_per_event separator must be a nonempty single line".into()));
        }
        Ok(ExportFormat::LinePerEvent { separator: separator.to_string() })
    }

    fn name(&self) -> &'static str {
        match self {
            ExportFormat::Canonical => "canonical",
            ExportFormat::ItemsetDash => "itemset_dash",
            ExportFormat::LinePerEvent { .. } => "line_per_event",
            ExportFormat::SpaceSeparated => "space_separated",
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Accepts the format names plus the per-tool aliases `perracotta`
/// (`- - - -`), `texada` (`. .`) and `trace2model` (`start`).
impl FromStr for ExportFormat {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "canonical" => Ok(ExportFormat::Canonical),
            "itemset_dash" | "spmf" | "flowminer" | "prefixspan" | "tlmine" => Ok(ExportFormat::ItemsetDash),
            "space_separated" | "lstm" => Ok(ExportFormat::SpaceSeparated),
            "perracotta" => ExportFormat::line_per_event("- - - -"),
            "texada" => ExportFormat::line_per_event(". ."),
            "trace2model" => ExportFormat::line_per_event("start"),
            _ => match s.split_once(':') {
                Some(("line_per_event" | "line-per-event", sep)) => ExportFormat::line_per_event(sep),
                _ => Err(FormatError::Config(format!("unknown export format {s:?}"))),
            },
        }
    }
}

fn require_flat(corpus: &Corpus, format: &ExportFormat) -> Result<(), FormatError> {
    for (ti, trace) in corpus.traces.iter().enumerate() {
        if let Some((si, step)) = trace.steps.iter().enumerate().find(|(_, s)| s.width() != 1) {
            return Err(FormatError::MultiEventStep { trace: ti, step: si, width: step.width(), format: format.name() });
        }
    }
    Ok(())
}

fn flat_ids(trace: &Trace) -> impl Iterator<Item = EventId> + '_ {
    trace.steps.iter().map(|s| s.events()[0])
}

pub fn emit(corpus: &Corpus, format: &ExportFormat) -> Result<String, FormatError> {
    match format {
        ExportFormat::Canonical => Ok(emit_canonical(corpus)),
        ExportFormat::ItemsetDash => Ok(corpus.traces.iter().map(itemset_dash_line).collect::<Vec<_>>().join("\n")),
        ExportFormat::LinePerEvent { separator } => {
            require_flat(corpus, format)?;
            let mut out = String::new();
            for trace in &corpus.traces {
                for e in flat_ids(trace) {
                    out.push_str(&e.to_string());
                    out.push('\n');
                }
                out.push_str(separator);
                out.push('\n');
            }
            Ok(out)
        }
        ExportFormat::SpaceSeparated => {
            require_flat(corpus, format)?;
            let mut out = String::new();
            for trace in &corpus.traces {
                out.push_str(&join_ids(&flat_ids(trace).collect::<Vec<_>>()));
                out.push('\n');
            }
            Ok(out)
        }
    }
}

fn itemset_dash_line(trace: &Trace) -> String {
    let mut line: String = trace
        .steps
        .iter()
        .map(|s| {
            let mut items = s.events().to_vec();
            items.sort_unstable();
            join_ids(&items)
        })
        .collect::<Vec<_>>()
        .join(" -1 ");
    if !line.is_empty() {
        line.push(' ');
    }
    line.push_str("-2");
    line
}
