//! The five miners. All of them read single-event-per-step corpora; flatten
//! concurrent traces with [`crate::io::flatten_corpus`] first.

pub mod alternating;
pub mod episode;
pub mod flow;
pub mod ltl;
pub mod seqpat;

use thiserror::Error;

use crate::budget::Exhausted;
use crate::model::{Corpus, EventId, MinedPattern};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MineError {
    #[error("trace {trace} step {step} holds several events; flatten the corpus first")]
    NotFlat { trace: usize, step: usize },
    #[error("invalid miner config: {0}")]
    Config(String),
    #[error("mining stopped early ({reason}) after {} patterns", partial.len())]
    Interrupted { reason: Exhausted, partial: Vec<MinedPattern> },
}

pub(crate) fn flat_sequences(corpus: &Corpus) -> Result<Vec<Vec<EventId>>, MineError> {
    corpus
        .traces
        .iter()
        .enumerate()
        .map(|(ti, t)| {
            t.as_flat().ok_or_else(|| MineError::NotFlat {
                trace: ti,
                step: t.steps.iter().position(|s| s.width() != 1).unwrap_or(0),
            })
        })
        .collect()
}

/// Position lists per event for one trace, indexed by event id.
pub(crate) fn positions(seq: &[EventId], vocab_size: usize) -> Vec<Vec<usize>> {
    let mut pos = vec![Vec::new(); vocab_size];
    for (i, e) in seq.iter().enumerate() {
        pos[e.index()].push(i);
    }
    pos
}

/// Distinct events present anywhere in the corpus, ascending.
pub(crate) fn occurring_events(db: &[Vec<EventId>]) -> Vec<EventId> {
    let mut seen: Vec<EventId> = db.iter().flatten().copied().collect();
    seen.sort_unstable();
    seen.dedup();
    seen
}

pub(crate) fn vocab_bound(db: &[Vec<EventId>], corpus: &Corpus) -> usize {
    let max_seen = db.iter().flatten().map(|e| e.index() + 1).max().unwrap_or(0);
    max_seen.max(corpus.vocabulary.len())
}
