//! Synthetic SoC communication-trace benchmarks, five specification miners,
//! and a scorer that compares their output against known flow patterns.
//!
//! A typical pipeline generates (or ingests) a [`Corpus`], flattens concurrent
//! steps with [`io::flatten_corpus`], mines it, and scores the result with
//! [`eval::score`] or [`eval::run_benchmark`].

pub mod budget;
pub mod eval;
pub mod generator;
pub mod io;
pub mod kv;
pub mod mining;
pub mod model;
pub mod reference;

pub use budget::{Budget, Exhausted};
pub use model::{Corpus, EventId, GroundTruthPattern, Message, MinedPattern, PatternPool, Step, Trace, Vocabulary};
