//! Binary response rules under a support/confidence threshold, chained into
//! longer flow patterns. Every chain extension is re-checked against the corpus.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::{flat_sequences, occurring_events, positions, vocab_bound, MineError};
use crate::budget::{Budget, Exhausted};
use crate::model::{contains_subsequence, join_ids, Corpus, EventId, MinedPattern};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryRule {
    pub a: EventId,
    pub b: EventId,
    /// Occurrences of `a` with a later `b` in the same trace, over the corpus.
    pub support: u64,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub min_support: u64,
    pub min_confidence: f64,
    pub max_chain_len: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig { min_support: 1, min_confidence: 1.0, max_chain_len: 8 }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<(), MineError> {
        if self.min_support == 0 {
            return Err(MineError::Config("min_support must be at least 1".into()));
        }
        if !(self.min_confidence > 0.0 && self.min_confidence <= 1.0) {
            return Err(MineError::Config(format!("min_confidence {} is outside (0, 1]", self.min_confidence)));
        }
        if self.max_chain_len < 2 {
            return Err(MineError::Config("max_chain_len must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    /// Every rule that passed the thresholds, including absorbed ones.
    pub rules: Vec<BinaryRule>,
    /// Maximal chains and unabsorbed rules, lexicographic.
    pub patterns: Vec<MinedPattern>,
}

pub fn mine_binary_rules(corpus: &Corpus, cfg: &FlowConfig) -> Result<Vec<BinaryRule>, MineError> {
    cfg.validate()?;
    let db = flat_sequences(corpus)?;
    let size = vocab_bound(&db, corpus);
    let pos: Vec<Vec<Vec<usize>>> = db.iter().map(|s| positions(s, size)).collect();

    let rules: Vec<Vec<BinaryRule>> = occurring_events(&db)
        .par_iter()
        .map(|&a| {
            let total: usize = pos.iter().map(|p| p[a.index()].len()).sum();
            (0..size as u32)
                .map(EventId)
                .filter(|&b| b != a)
                .filter_map(|b| {
                    let matched: usize = pos
                        .iter()
                        .map(|p| match p[b.index()].last() {
                            Some(&lb) => p[a.index()].partition_point(|&i| i < lb),
                            None => 0,
                        })
                        .sum();
                    let confidence = matched as f64 / total as f64;
                    (matched as u64 >= cfg.min_support && confidence >= cfg.min_confidence)
                        .then_some(BinaryRule { a, b, support: matched as u64, confidence })
                })
                .collect()
        })
        .collect();
    Ok(rules.into_iter().flatten().collect())
}

fn subsequence_support(db: &[Vec<EventId>], pattern: &[EventId]) -> u64 {
    db.iter().filter(|s| contains_subsequence(s, pattern)).count() as u64
}

/// Verified extensions of one pattern, and its support when it is a maximal chain.
type Extension = (Vec<Vec<EventId>>, Option<u64>);

pub fn chain_rules(rules: &[BinaryRule], corpus: &Corpus, cfg: &FlowConfig) -> Result<Vec<MinedPattern>, MineError> {
    chain_rules_with(rules, corpus, cfg, &Budget::unlimited())
}

/// Grows patterns level by level from the rules. A chain is maximal when it
/// cannot be extended (or hits `max_chain_len`). Rules are reported only when
/// no maximal chain has them as an adjacent pair.
pub fn chain_rules_with(
    rules: &[BinaryRule],
    corpus: &Corpus,
    cfg: &FlowConfig,
    budget: &Budget,
) -> Result<Vec<MinedPattern>, MineError> {
    cfg.validate()?;
    let db = flat_sequences(corpus)?;
    let mut successors: BTreeMap<EventId, Vec<EventId>> = BTreeMap::new();
    let mut rule_stats: BTreeMap<(EventId, EventId), &BinaryRule> = BTreeMap::new();
    for r in rules {
        successors.entry(r.a).or_default().push(r.b);
        rule_stats.insert((r.a, r.b), r);
    }
    for s in successors.values_mut() {
        s.sort_unstable();
        s.dedup();
    }

    let mut level: Vec<Vec<EventId>> = rule_stats.keys().map(|&(a, b)| vec![a, b]).collect();
    let mut chains: Vec<(Vec<EventId>, u64)> = Vec::new();
    let mut stopped = None;

    while !level.is_empty() {
        let grown: Vec<Result<Extension, Exhausted>> = level
            .par_iter()
            .map(|p| {
                budget.check_time()?;
                let mut next = Vec::new();
                if p.len() < cfg.max_chain_len {
                    for &c in successors.get(p.last().unwrap()).into_iter().flatten() {
                        let mut q = p.clone();
                        q.push(c);
                        if subsequence_support(&db, &q) >= cfg.min_support {
                            next.push(q);
                        }
                    }
                }
                let maximal = (next.is_empty() && p.len() > 2).then(|| subsequence_support(&db, p));
                Ok((next, maximal))
            })
            .collect();

        let mut next_level = Vec::new();
        for (p, r) in level.iter().zip(grown) {
            match r {
                Ok((next, maximal)) => {
                    if let Some(s) = maximal {
                        chains.push((p.clone(), s));
                    }
                    next_level.extend(next);
                }
                Err(e) => stopped = Some(e),
            }
        }
        if stopped.is_none() {
            if let Err(e) = budget.check(chains.len() + next_level.len()) {
                stopped = Some(e);
            }
        }
        if stopped.is_some() {
            break;
        }
        level = next_level;
    }

    let absorbed: BTreeSet<(EventId, EventId)> =
        chains.iter().flat_map(|(p, _)| p.windows(2).map(|w| (w[0], w[1]))).collect();
    let mut out: Vec<MinedPattern> = chains.into_iter().map(|(p, s)| MinedPattern::new(p, s)).collect();
    for (&(a, b), r) in &rule_stats {
        if !absorbed.contains(&(a, b)) {
            out.push(
                MinedPattern::new(vec![a, b], subsequence_support(&db, &[a, b]))
                    .with_confidence(r.confidence)
                    .with_stat("matched", r.support as f64),
            );
        }
    }
    out.sort_by(|a, b| a.sequence.cmp(&b.sequence));
    match stopped {
        None => Ok(out),
        Some(reason) => Err(MineError::Interrupted { reason, partial: out }),
    }
}

pub fn mine_flow(corpus: &Corpus, cfg: &FlowConfig) -> Result<FlowResult, MineError> {
    mine_flow_with(corpus, cfg, &Budget::unlimited())
}

pub fn mine_flow_with(corpus: &Corpus, cfg: &FlowConfig, budget: &Budget) -> Result<FlowResult, MineError> {
    let rules = mine_binary_rules(corpus, cfg)?;
    budget.check_time().map_err(|reason| MineError::Interrupted { reason, partial: Vec::new() })?;
    let patterns = chain_rules_with(&rules, corpus, cfg, budget)?;
    Ok(FlowResult { rules, patterns })
}

pub fn render_rule(r: &BinaryRule) -> String {
    format!("{} -> {} [sup={} conf={:.4}]", r.a, r.b, r.support, r.confidence)
}

pub fn render_pattern(p: &MinedPattern) -> String {
    format!("{} [sup={}]", join_ids(&p.sequence), p.support)
}

pub fn render_rules(rules: &[BinaryRule]) -> String {
    rules.iter().map(|r| render_rule(r) + "\n").collect()
}

pub fn render(patterns: &[MinedPattern]) -> String {
    patterns.iter().map(|p| render_pattern(p) + "\n").collect()
}

/// Reads a pattern line written by [`render_pattern`].
pub fn parse_line(line: &str) -> Option<MinedPattern> {
    let (seq, rest) = line.split_once("[sup=")?;
    let support = rest.trim().strip_suffix(']')?.parse().ok()?;
    let sequence: Vec<EventId> = seq
        .split_whitespace()
        .map(|t| t.parse().map(EventId))
        .collect::<Result<_, _>>()
        .ok()?;
    (!sequence.is_empty()).then(|| MinedPattern::new(sequence, support))
}
