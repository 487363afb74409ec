//! Instances of the response template `G(x -> X(F(y)))`: every `x` is followed,
//! strictly later in the same trace, by some `y`.

use rayon::prelude::*;

use super::{flat_sequences, occurring_events, vocab_bound, MineError};
use crate::budget::Budget;
use crate::model::{Corpus, EventId, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FollowsInstance {
    pub x: EventId,
    pub y: EventId,
    /// `x` never occurs; such instances hold trivially and are never mined.
    pub vacuous: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOutcome {
    pub holds: bool,
    /// First `(trace, position)` holding an `x` with no later `y`.
    pub counterexample: Option<(usize, usize)>,
}

/// Evaluates the template over each trace from the end backwards, carrying
/// `F y` from position `i + 1` to `i`.
pub fn check_instance(corpus: &Corpus, x: EventId, y: EventId) -> Result<CheckOutcome, MineError> {
    if x == y {
        return Err(MineError::Config(format!("antecedent and consequent are both {x}")));
    }
    let db = flat_sequences(corpus)?;
    for (ti, seq) in db.iter().enumerate() {
        let mut eventually_y = false;
        let mut first_bad = None;
        for (i, &e) in seq.iter().enumerate().rev() {
            // X(F y) at i is F y at i + 1.
            if e == x && !eventually_y {
                first_bad = Some(i);
            }
            eventually_y |= e == y;
        }
        if let Some(i) = first_bad {
            return Ok(CheckOutcome { holds: false, counterexample: Some((ti, i)) });
        }
    }
    Ok(CheckOutcome { holds: true, counterexample: None })
}

pub fn mine_follows(corpus: &Corpus) -> Result<Vec<FollowsInstance>, MineError> {
    mine_follows_with(corpus, &Budget::unlimited())
}

/// One pass per trace records the last position of every event; `(x, y)`
/// holds iff wherever `x` occurs, `y` occurs after the last `x`.
pub fn mine_follows_with(corpus: &Corpus, budget: &Budget) -> Result<Vec<FollowsInstance>, MineError> {
    let db = flat_sequences(corpus)?;
    let size = vocab_bound(&db, corpus);
    let last: Vec<Vec<Option<usize>>> = db
        .par_iter()
        .map(|seq| {
            let mut l = vec![None; size];
            for (i, e) in seq.iter().enumerate() {
                l[e.index()] = Some(i);
            }
            l
        })
        .collect();

    let mut out = Vec::new();
    for x in occurring_events(&db) {
        budget.check_time().map_err(|reason| MineError::Interrupted { reason, partial: Vec::new() })?;
        for y in (0..size as u32).map(EventId) {
            if y == x {
                continue;
            }
            let holds = last.iter().all(|l| match (l[x.index()], l[y.index()]) {
                (None, _) => true,
                (Some(lx), Some(ly)) => lx < ly,
                (Some(_), None) => false,
            });
            if holds {
                out.push(FollowsInstance { x, y, vacuous: false });
            }
        }
    }
    Ok(out)
}

pub fn render_instance(f: &FollowsInstance, vocab: &Vocabulary) -> String {
    format!("G(x -> XF y): x={} y={}", vocab.name(f.x), vocab.name(f.y))
}

pub fn render(instances: &[FollowsInstance], vocab: &Vocabulary) -> String {
    instances.iter().map(|f| render_instance(f, vocab) + "\n").collect()
}

/// Inverse of [`render_instance`]; names are resolved through `vocab`.
pub fn parse_line(line: &str, vocab: &Vocabulary) -> Option<FollowsInstance> {
    let rest = line.trim().strip_prefix("G(x -> XF y):")?;
    let mut x = None;
    let mut y = None;
    for tok in rest.split_whitespace() {
        match tok.split_once('=')? {
            ("x", n) => x = vocab.lookup(n),
            ("y", n) => y = vocab.lookup(n),
            _ => return None,
        }
    }
    Some(FollowsInstance { x: x?, y: y?, vacuous: false })
}
