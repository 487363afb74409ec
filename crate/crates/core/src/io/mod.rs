//! Text formats: the canonical corpus file, tool-specific exports, flattening
//! of concurrent steps, and ingestion of bus monitor logs.

mod canonical;
mod export;
mod flatten;
mod monitor;

pub use canonical::parse_canonical;
pub use export::{emit, ExportFormat};
pub use flatten::{flatten, flatten_corpus, FlattenPolicy};
pub use monitor::{ingest_monitor_log, Delimiter, FieldMap};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown event {name:?}")]
    UnknownEvent { line: usize, name: String },
    #[error("line {line}: timestamp goes backwards ({current} after {previous})")]
    NonMonotonic { line: usize, previous: String, current: String },
    #[error("trace {trace} step {step} has {width} events; flatten before exporting as {format}")]
    MultiEventStep { trace: usize, step: usize, width: usize, format: &'static str },
    #[error("{0}")]
    Config(String),
}

pub(crate) fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, message: message.into() }
}
