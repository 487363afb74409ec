//! Frequent sequential patterns by depth-first pattern growth over pseudo-projected
//! databases. A projection is a list of `(trace, offset)` pairs pointing into the
//! original sequences, so no suffix is ever copied.
//!
//! Support counts supporting traces, not occurrences.

use std::collections::HashMap;

use super::{flat_sequences, MineError};
use crate::budget::{Budget, Exhausted};
use crate::model::{Corpus, EventId, MinedPattern};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqpatConfig {
    pub min_support: usize,
    pub max_len: Option<usize>,
    /// Stops with a partial result once this many patterns have been found.
    pub max_patterns: Option<usize>,
}

impl Default for SeqpatConfig {
    fn default() -> Self {
        SeqpatConfig { min_support: 1, max_len: None, max_patterns: Some(1_000_000) }
    }
}

impl SeqpatConfig {
    pub fn validate(&self, n_traces: usize) -> Result<(), MineError> {
        if self.min_support == 0 {
            return Err(MineError::Config("min_support must be at least 1".into()));
        }
        if self.min_support > n_traces {
            return Err(MineError::Config(format!(
                "min_support {} exceeds the corpus trace count {n_traces}",
                self.min_support
            )));
        }
        if self.max_len == Some(0) || self.max_patterns == Some(0) {
            return Err(MineError::Config("max_len and max_patterns must be positive".into()));
        }
        Ok(())
    }
}

pub fn mine_frequent(corpus: &Corpus, cfg: &SeqpatConfig) -> Result<Vec<MinedPattern>, MineError> {
    mine_frequent_with(corpus, cfg, &Budget::unlimited())
}

pub fn mine_frequent_with(corpus: &Corpus, cfg: &SeqpatConfig, budget: &Budget) -> Result<Vec<MinedPattern>, MineError> {
    let db = flat_sequences(corpus)?;
    cfg.validate(db.len())?;
    let mut miner = Growth { db: &db, cfg, budget, prefix: Vec::new(), out: Vec::new() };
    let root: Vec<(usize, usize)> = (0..db.len()).map(|t| (t, 0)).collect();
    let status = miner.grow(&root);
    let mut out = miner.out;
    out.sort_by(|a, b| a.sequence.cmp(&b.sequence));
    match status {
        Ok(()) => Ok(out),
        Err(reason) => Err(MineError::Interrupted { reason, partial: out }),
    }
}

struct Growth<'a> {
    db: &'a [Vec<EventId>],
    cfg: &'a SeqpatConfig,
    budget: &'a Budget,
    prefix: Vec<EventId>,
    out: Vec<MinedPattern>,
}

impl Growth<'_> {
    fn grow(&mut self, projection: &[(usize, usize)]) -> Result<(), Exhausted> {
        self.budget.check(self.out.len())?;

        // Count each item once per projected trace.
        let mut counts: HashMap<EventId, (usize, usize)> = HashMap::new();
        for &(t, start) in projection {
            for &e in &self.db[t][start..] {
                let entry = counts.entry(e).or_insert((0, usize::MAX));
                if entry.1 != t {
                    *entry = (entry.0 + 1, t);
                }
            }
        }
        let mut frequent: Vec<(EventId, usize)> = counts
            .into_iter()
            .filter(|&(_, (n, _))| n >= self.cfg.min_support)
            .map(|(e, (n, _))| (e, n))
            .collect();
        frequent.sort_unstable();

        for (item, support) in frequent {
            self.prefix.push(item);
            self.out.push(MinedPattern::new(self.prefix.clone(), support as u64));
            if let Some(limit) = self.cfg.max_patterns {
                if self.out.len() > limit {
                    self.out.pop();
                    self.prefix.pop();
                    return Err(Exhausted::Memory);
                }
            }
            let deeper = self.cfg.max_len.is_none_or(|m| self.prefix.len() < m);
            if deeper {
                let next: Vec<(usize, usize)> = projection
                    .iter()
                    .filter_map(|&(t, start)| {
                        self.db[t][start..].iter().position(|&e| e == item).map(|p| (t, start + p + 1))
                    })
                    .collect();
                let r = self.grow(&next);
                if r.is_err() {
                    self.prefix.pop();
                    return r;
                }
            }
            self.prefix.pop();
        }
        Ok(())
    }
}

/// SPMF-style line: `1 -1 2 -1 #SUP: 3`.
pub fn render_pattern(p: &MinedPattern) -> String {
    let mut s = String::new();
    for e in &p.sequence {
        s.push_str(&format!("{e} -1 "));
    }
    s.push_str(&format!("#SUP: {}", p.support));
    s
}

pub fn render(patterns: &[MinedPattern]) -> String {
    patterns.iter().map(|p| render_pattern(p) + "\n").collect()
}

/// Reads lines produced by [`render`].
pub fn parse_line(line: &str) -> Option<MinedPattern> {
    let (items, sup) = line.split_once("#SUP:")?;
    let support = sup.trim().parse().ok()?;
    let sequence: Vec<EventId> = items
        .split_whitespace()
        .filter(|t| *t != "-1")
        .map(|t| t.parse().map(EventId))
        .collect::<Result<_, _>>()
        .ok()?;
    (!sequence.is_empty()).then(|| MinedPattern::new(sequence, support))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{flatten_corpus, FlattenPolicy};
    use crate::model::{ids, Trace, Vocabulary};
    use crate::reference;

    fn corpus(traces: &[&[u32]]) -> Corpus {
        let traces = traces.iter().map(|t| Trace::from_flat(&ids(t))).collect();
        Corpus::new(Vocabulary::placeholder(10), traces, "").unwrap()
    }

    #[test]
    fn only_shared_item_is_frequent() {
        let out = mine_frequent(&corpus(&[&[1, 2], &[1, 3]]), &SeqpatConfig { min_support: 2, ..Default::default() }).unwrap();
        assert_eq!(out, vec![MinedPattern::new(ids(&[1]), 2)]);
    }

    #[test]
    fn example_contains_ground_truth() {
        let c = flatten_corpus(&reference::example_corpus(), FlattenPolicy::AscendingId);
        let cfg = SeqpatConfig { min_support: 1, max_len: Some(4), max_patterns: None };
        let out = mine_frequent(&c, &cfg).unwrap();
        for gt in reference::GROUND_TRUTH {
            assert!(out.iter().any(|p| p.sequence == ids(gt)), "missing {gt:?}");
        }
        assert!(out.windows(2).all(|w| w[0].sequence < w[1].sequence));
    }

    #[test]
    fn rejects_bad_config_and_concurrent_steps() {
        let c = corpus(&[&[1]]);
        assert!(matches!(mine_frequent(&c, &SeqpatConfig { min_support: 0, ..Default::default() }), Err(MineError::Config(_))));
        assert!(matches!(mine_frequent(&c, &SeqpatConfig { min_support: 2, ..Default::default() }), Err(MineError::Config(_))));
        assert!(matches!(mine_frequent(&reference::example_corpus(), &SeqpatConfig::default()), Err(MineError::NotFlat { .. })));
    }

    #[test]
    fn pattern_limit_returns_partial() {
        let c = corpus(&[&[1, 2, 3, 4, 5, 6]]);
        let cfg = SeqpatConfig { min_support: 1, max_len: None, max_patterns: Some(10) };
        match mine_frequent(&c, &cfg) {
            Err(MineError::Interrupted { reason: Exhausted::Memory, partial }) => assert_eq!(partial.len(), 10),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn render_and_parse() {
        let p = MinedPattern::new(ids(&[3, 5]), 4);
        assert_eq!(render_pattern(&p), "3 -1 5 -1 #SUP: 4");
        assert_eq!(parse_line("3 -1 5 -1 #SUP: 4"), Some(p));
        assert_eq!(parse_line("garbage"), None);
    }
}
