//! Serial episodes counted in fixed-width sliding windows, grown one trailing
//! event at a time and filtered by confidence against their prefix.

use rayon::prelude::*;

use super::{flat_sequences, occurring_events, positions, vocab_bound, MineError};
use crate::budget::{Budget, Exhausted};
use crate::model::{join_ids, Corpus, EventId, MinedPattern};

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeConfig {
    /// Window width in steps.
    pub window_w: usize,
    /// Minimum number of containing windows, summed over traces.
    pub min_support: u64,
    pub min_confidence: f64,
    pub max_len: usize,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        EpisodeConfig { window_w: 4, min_support: 1, min_confidence: 1.0, max_len: 4 }
    }
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<(), MineError> {
        if self.window_w == 0 || self.min_support == 0 || self.max_len == 0 {
            return Err(MineError::Config("window_w, min_support and max_len must be positive".into()));
        }
        if !(self.min_confidence > 0.0 && self.min_confidence <= 1.0) {
            return Err(MineError::Config(format!("min_confidence {} is outside (0, 1]", self.min_confidence)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    /// Reported episodes (length >= 2), lexicographic.
    pub patterns: Vec<MinedPattern>,
    /// Traces shorter than the window, each counted as a single window.
    pub whole_trace_windows: usize,
}

fn window_count(len: usize, w: usize) -> usize {
    if len < w {
        1
    } else {
        len - w + 1
    }
}

/// Windows of `trace_flat` (width `w`, stride 1) that contain `episode` as a
/// subsequence. A trace shorter than `w` is a single window.
pub fn episode_support(trace_flat: &[EventId], episode: &[EventId], w: usize) -> u64 {
    let size = trace_flat.iter().chain(episode).map(|e| e.index() + 1).max().unwrap_or(0);
    support_in(&positions(trace_flat, size), trace_flat.len(), episode, w)
}

fn support_in(pos: &[Vec<usize>], len: usize, episode: &[EventId], w: usize) -> u64 {
    if episode.is_empty() || w == 0 {
        return 0;
    }
    if episode.iter().any(|e| pos.get(e.index()).is_none_or(Vec::is_empty)) {
        return 0;
    }
    let mut count = 0;
    for start in 0..window_count(len, w) {
        let end = (start + w).min(len);
        if earliest_end(pos, episode, start).is_some_and(|last| last < end) {
            count += 1;
        }
    }
    count
}

/// Position of the final event of the earliest embedding starting at or after `from`.
fn earliest_end(pos: &[Vec<usize>], episode: &[EventId], from: usize) -> Option<usize> {
    let mut at = from;
    let mut last = None;
    for e in episode {
        let occ = &pos[e.index()];
        let i = occ.partition_point(|&p| p < at);
        let p = *occ.get(i)?;
        last = Some(p);
        at = p + 1;
    }
    last
}

/// Candidate episode, its support, and its prefix's support.
type Grown = (Vec<EventId>, u64, u64);

pub fn mine_episodes(corpus: &Corpus, cfg: &EpisodeConfig) -> Result<EpisodeResult, MineError> {
    mine_episodes_with(corpus, cfg, &Budget::unlimited())
}

pub fn mine_episodes_with(corpus: &Corpus, cfg: &EpisodeConfig, budget: &Budget) -> Result<EpisodeResult, MineError> {
    cfg.validate()?;
    let db = flat_sequences(corpus)?;
    let size = vocab_bound(&db, corpus);
    let pos: Vec<Vec<Vec<usize>>> = db.iter().map(|s| positions(s, size)).collect();
    let whole_trace_windows = db.iter().filter(|s| s.len() < cfg.window_w).count();
    let support = |episode: &[EventId]| -> u64 {
        db.iter().zip(&pos).map(|(s, p)| support_in(p, s.len(), episode, cfg.window_w)).sum()
    };

    let singles: Vec<(EventId, u64)> = occurring_events(&db)
        .into_iter()
        .map(|e| (e, support(&[e])))
        .filter(|&(_, s)| s >= cfg.min_support)
        .collect();
    let mut level: Vec<(Vec<EventId>, u64)> = singles.iter().map(|&(e, s)| (vec![e], s)).collect();
    let mut reported = Vec::new();
    let mut stopped = None;

    for _ in 2..=cfg.max_len {
        if level.is_empty() {
            break;
        }
        let grown: Vec<Result<Vec<Grown>, Exhausted>> = level
            .par_iter()
            .map(|(prefix, prefix_support)| {
                budget.check_time()?;
                let mut out = Vec::new();
                for &(a, _) in &singles {
                    let mut cand = prefix.clone();
                    cand.push(a);
                    let s = support(&cand);
                    if s >= cfg.min_support {
                        out.push((cand, s, *prefix_support));
                    }
                }
                Ok(out)
            })
            .collect();

        let mut next = Vec::new();
        for r in grown {
            match r {
                Ok(v) => next.extend(v),
                Err(e) => stopped = Some(e),
            }
        }
        for (episode, s, prefix_support) in &next {
            let confidence = *s as f64 / *prefix_support as f64;
            if confidence >= cfg.min_confidence {
                reported.push(
                    MinedPattern::new(episode.clone(), *s)
                        .with_confidence(confidence)
                        .with_stat("prefix_support", *prefix_support as f64),
                );
            }
        }
        if stopped.is_none() {
            if let Err(e) = budget.check(reported.len()) {
                stopped = Some(e);
            }
        }
        if stopped.is_some() {
            break;
        }
        level = next.into_iter().map(|(e, s, _)| (e, s)).collect();
    }

    reported.sort_by(|a, b| a.sequence.cmp(&b.sequence));
    match stopped {
        None => Ok(EpisodeResult { patterns: reported, whole_trace_windows }),
        Some(reason) => Err(MineError::Interrupted { reason, partial: reported }),
    }
}

pub fn render_pattern(p: &MinedPattern) -> String {
    format!("{} #SUP {} #CONF {:.4}", join_ids(&p.sequence), p.support, p.confidence.unwrap_or(0.0))
}

pub fn render(patterns: &[MinedPattern]) -> String {
    patterns.iter().map(|p| render_pattern(p) + "\n").collect()
}

pub fn parse_line(line: &str) -> Option<MinedPattern> {
    let (seq, rest) = line.split_once("#SUP")?;
    let (sup, conf) = rest.split_once("#CONF")?;
    let sequence: Vec<EventId> = seq
        .split_whitespace()
        .map(|t| t.parse().map(EventId))
        .collect::<Result<_, _>>()
        .ok()?;
    let conf: f64 = conf.trim().parse().ok()?;
    let support = sup.trim().parse().ok()?;
    (!sequence.is_empty()).then(|| MinedPattern::new(sequence, support).with_confidence(conf.clamp(0.0, 1.0)))
}
