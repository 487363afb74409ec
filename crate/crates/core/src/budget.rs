//! Cooperative run limits. Miners poll a [`Budget`] from their inner loops and
//! bail out with whatever they have found so far once it is exhausted.

use std::fmt;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exhausted {
    Timeout,
    /// The result-count guard standing in for a memory limit.
    Memory,
}

impl fmt::Display for Exhausted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exhausted::Timeout => f.write_str("timeout"),
            Exhausted::Memory => f.write_str("memory"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Budget {
    deadline: Option<Instant>,
    max_results: Option<usize>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn new(timeout: Option<Duration>, max_results: Option<usize>) -> Self {
        Budget { deadline: timeout.map(|t| Instant::now() + t), max_results }
    }

    pub fn with_deadline(mut self, deadline: Instant) -> Self {
        self.deadline = Some(deadline);
        self
    }

    pub fn check_time(&self) -> Result<(), Exhausted> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(Exhausted::Timeout),
            _ => Ok(()),
        }
    }

    /// Checks both the deadline and the result guard for `produced` results.
    pub fn check(&self, produced: usize) -> Result<(), Exhausted> {
        self.check_time()?;
        match self.max_results {
            Some(limit) if produced > limit => Err(Exhausted::Memory),
            _ => Ok(()),
        }
    }
}
