//! Two-event alternating properties `(x y)*` scored by satisfaction rate, and
//! their composition into alternating chains.
//!
//! Each trace is cut into `k` contiguous sub-traces of near-equal length (the
//! first `len % k` get one extra step). A sub-trace conforms when its
//! projection onto `{x, y}` is accepted by the two-state machine below; an
//! empty projection conforms vacuously, and a pending `x` at the sub-trace
//! edge is a violation.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::{flat_sequences, occurring_events, positions, vocab_bound, MineError};
use crate::budget::{Budget, Exhausted};
use crate::model::{Corpus, EventId, MinedPattern};

#[derive(Debug, Clone, PartialEq)]
pub struct AlternatingProperty {
    pub x: EventId,
    pub y: EventId,
    pub satisfaction_rate: f64,
    /// Sub-traces whose projection was nonempty.
    pub observed: usize,
}

impl AlternatingProperty {
    pub fn to_pattern(&self) -> MinedPattern {
        MinedPattern::new(vec![self.x, self.y], self.observed as u64)
            .with_confidence(self.satisfaction_rate)
            .with_stat("satisfaction_rate", self.satisfaction_rate)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AlternatingChain {
    pub events: Vec<EventId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlternatingConfig {
    pub k_partitions: usize,
    pub min_rate: f64,
}

impl Default for AlternatingConfig {
    fn default() -> Self {
        AlternatingConfig { k_partitions: 10, min_rate: 1.0 }
    }
}

impl AlternatingConfig {
    pub fn validate(&self) -> Result<(), MineError> {
        if self.k_partitions == 0 {
            return Err(MineError::Config("k_partitions must be at least 1".into()));
        }
        if !(self.min_rate > 0.0 && self.min_rate <= 1.0) {
            return Err(MineError::Config(format!("min_rate {} is outside (0, 1]", self.min_rate)));
        }
        Ok(())
    }
}

/// Raw counts behind a satisfaction rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PairScan {
    pub satisfied: usize,
    pub sub_traces: usize,
    pub observed: usize,
}

impl PairScan {
    /// Conforming fraction; 1.0 for a corpus without sub-traces.
    pub fn rate(&self) -> f64 {
        if self.sub_traces == 0 {
            1.0
        } else {
            self.satisfied as f64 / self.sub_traces as f64
        }
    }
}

/// Index of the sub-trace holding position `p` when `n` steps are split into `k`.
pub fn partition_of(p: usize, n: usize, k: usize) -> usize {
    let base = n / k;
    let rem = n % k;
    let big = rem * (base + 1);
    if p < big {
        p / (base + 1)
    } else {
        rem + (p - big) / base
    }
}

/// Returns `(violating, observed)` sub-trace counts for one trace, walking the
/// merged occurrence lists of `x` and `y`.
fn scan_positions(xs: &[usize], ys: &[usize], n: usize, k: usize) -> (usize, usize) {
    const EXPECT_X: u8 = 0;
    const EXPECT_Y: u8 = 1;
    let (mut i, mut j) = (0, 0);
    let mut part: Option<usize> = None;
    let mut state = EXPECT_X;
    let mut failed = false;
    let (mut violating, mut observed) = (0, 0);
    loop {
        let (pos, is_x) = match (xs.get(i), ys.get(j)) {
            (Some(&a), Some(&b)) if a < b => (a, true),
            (Some(&a), None) => (a, true),
            (_, Some(&b)) => (b, false),
            (None, None) => break,
        };
        if is_x {
            i += 1;
        } else {
            j += 1;
        }
        let p = partition_of(pos, n, k);
        if part != Some(p) {
            if part.is_some() {
                observed += 1;
                violating += usize::from(failed || state == EXPECT_Y);
            }
            part = Some(p);
            state = EXPECT_X;
            failed = false;
        }
        if failed {
            continue;
        }
        match (state, is_x) {
            (EXPECT_X, true) => state = EXPECT_Y,
            (EXPECT_Y, false) => state = EXPECT_X,
            _ => failed = true,
        }
    }
    if part.is_some() {
        observed += 1;
        violating += usize::from(failed || state == EXPECT_Y);
    }
    (violating, observed)
}

pub fn scan_pair_counts(corpus: &Corpus, x: EventId, y: EventId, k_partitions: usize) -> Result<PairScan, MineError> {
    if x == y {
        return Err(MineError::Config("alternating pair needs x != y".into()));
    }
    if k_partitions == 0 {
        return Err(MineError::Config("k_partitions must be at least 1".into()));
    }
    let db = flat_sequences(corpus)?;
    let mut scan = PairScan::default();
    for seq in &db {
        let xs: Vec<usize> = seq.iter().enumerate().filter(|(_, &e)| e == x).map(|(i, _)| i).collect();
        let ys: Vec<usize> = seq.iter().enumerate().filter(|(_, &e)| e == y).map(|(i, _)| i).collect();
        let (violating, observed) = scan_positions(&xs, &ys, seq.len(), k_partitions);
        scan.sub_traces += k_partitions;
        scan.satisfied += k_partitions - violating;
        scan.observed += observed;
    }
    Ok(scan)
}

pub fn scan_pair(corpus: &Corpus, x: EventId, y: EventId, k_partitions: usize) -> Result<f64, MineError> {
    scan_pair_counts(corpus, x, y, k_partitions).map(|s| s.rate())
}

pub fn mine_alternating(corpus: &Corpus, cfg: &AlternatingConfig) -> Result<Vec<AlternatingProperty>, MineError> {
    mine_alternating_with(corpus, cfg, &Budget::unlimited())
}

pub fn mine_alternating_with(
    corpus: &Corpus,
    cfg: &AlternatingConfig,
    budget: &Budget,
) -> Result<Vec<AlternatingProperty>, MineError> {
    cfg.validate()?;
    let db = flat_sequences(corpus)?;
    let size = vocab_bound(&db, corpus);
    let pos: Vec<Vec<Vec<usize>>> = db.iter().map(|s| positions(s, size)).collect();
    let events = occurring_events(&db);
    let k = cfg.k_partitions;

    let per_x: Vec<Result<Vec<AlternatingProperty>, Exhausted>> = events
        .par_iter()
        .map(|&x| {
            budget.check_time()?;
            let mut found = Vec::new();
            for &y in events.iter().filter(|&&y| y != x) {
                let mut scan = PairScan::default();
                for (seq, p) in db.iter().zip(&pos) {
                    let (violating, observed) = scan_positions(&p[x.index()], &p[y.index()], seq.len(), k);
                    scan.sub_traces += k;
                    scan.satisfied += k - violating;
                    scan.observed += observed;
                }
                let rate = scan.rate();
                if scan.observed > 0 && rate >= cfg.min_rate {
                    found.push(AlternatingProperty { x, y, satisfaction_rate: rate, observed: scan.observed });
                }
            }
            Ok(found)
        })
        .collect();

    let mut out = Vec::new();
    let mut stopped = None;
    for r in per_x {
        match r {
            Ok(v) => out.extend(v),
            Err(e) => stopped = Some(e),
        }
    }
    sort_properties(&mut out);
    match stopped {
        None => Ok(out),
        Some(reason) => Err(MineError::Interrupted { reason, partial: out.iter().map(|p| p.to_pattern()).collect() }),
    }
}

fn sort_properties(props: &mut [AlternatingProperty]) {
    props.sort_by(|a, b| {
        b.satisfaction_rate
            .total_cmp(&a.satisfaction_rate)
            .then_with(|| (a.x, a.y).cmp(&(b.x, b.y)))
    });
}

/// All maximal simple paths with at least three events in the graph whose
/// edges are the given properties. A path stops before revisiting an event.
pub fn chain(props: &[AlternatingProperty]) -> Vec<AlternatingChain> {
    let mut succ: BTreeMap<EventId, BTreeSet<EventId>> = BTreeMap::new();
    let mut pred: BTreeMap<EventId, BTreeSet<EventId>> = BTreeMap::new();
    for p in props {
        succ.entry(p.x).or_default().insert(p.y);
        pred.entry(p.y).or_default().insert(p.x);
    }

    let mut found: BTreeSet<Vec<EventId>> = BTreeSet::new();
    let mut path = Vec::new();
    for &start in succ.keys() {
        path.push(start);
        extend(&succ, &pred, &mut path, &mut found);
        path.pop();
    }
    found.into_iter().map(|events| AlternatingChain { events }).collect()
}

fn extend(
    succ: &BTreeMap<EventId, BTreeSet<EventId>>,
    pred: &BTreeMap<EventId, BTreeSet<EventId>>,
    path: &mut Vec<EventId>,
    found: &mut BTreeSet<Vec<EventId>>,
) {
    let last = *path.last().expect("path is nonempty");
    let mut extended = false;
    for &next in succ.get(&last).into_iter().flatten() {
        if path.contains(&next) {
            continue;
        }
        extended = true;
        path.push(next);
        extend(succ, pred, path, found);
        path.pop();
    }
    if extended || path.len() < 3 {
        return;
    }
    let open_backward = pred.get(&path[0]).into_iter().flatten().any(|p| !path.contains(p));
    if !open_backward {
        found.insert(path.clone());
    }
}

pub fn render_properties(props: &[AlternatingProperty]) -> String {
    props.iter().map(|p| format!("{} -> {} rate={:.4}\n", p.x, p.y, p.satisfaction_rate)).collect()
}

pub fn render_chains(chains: &[AlternatingChain]) -> String {
    chains
        .iter()
        .map(|c| c.events.iter().map(EventId::to_string).collect::<Vec<_>>().join(" -> ") + "\n")
        .collect()
}

/// Reads either a property line (`x -> y rate=r`) or a chain line (`a -> b -> c`).
pub fn parse_line(line: &str) -> Option<MinedPattern> {
    let (body, rate) = match line.split_once("rate=") {
        Some((b, r)) => (b, Some(r.trim().parse::<f64>().ok()?)),
        None => (line, None),
    };
    let events: Vec<EventId> = body
        .split("->")
        .map(|t| t.trim().parse().map(EventId))
        .collect::<Result<_, _>>()
        .ok()?;
    if events.len() < 2 {
        return None;
    }
    let p = MinedPattern::new(events, 0);
    Some(match rate {
        Some(r) => p.with_confidence(r.clamp(0.0, 1.0)).with_stat("satisfaction_rate", r),
        None => p,
    })
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

    fn example() -> Corpus {
        flatten_corpus(&reference::example_corpus(), FlattenPolicy::AscendingId)
    }

    fn prop(x: u32, y: u32) -> AlternatingProperty {
        AlternatingProperty { x: EventId(x), y: EventId(y), satisfaction_rate: 1.0, observed: 1 }
    }

    #[test]
    fn scan_pair_examples() {
        assert_eq!(scan_pair(&corpus(&[&[1, 2, 1, 2]]), EventId(1), EventId(2), 1).unwrap(), 1.0);
        assert_eq!(scan_pair(&example(), EventId(3), EventId(4), 1).unwrap(), 1.0);
        assert_eq!(scan_pair(&example(), EventId(1), EventId(2), 1).unwrap(), 0.0);
    }

    #[test]
    fn partitions_spread_remainder_first() {
        // 7 steps into 3 parts: sizes 3, 2, 2
        let parts: Vec<usize> = (0..7).map(|p| partition_of(p, 7, 3)).collect();
        assert_eq!(parts, vec![0, 0, 0, 1, 1, 2, 2]);
        // fewer steps than parts
        let parts: Vec<usize> = (0..2).map(|p| partition_of(p, 2, 5)).collect();
        assert_eq!(parts, vec![0, 1]);
    }

    #[test]
    fn pending_x_at_partition_edge_violates() {
        // [1,2 | 1,2] conforms in both halves; [1 | 2,1,2 ...] does not
        let c = corpus(&[&[1, 2, 1, 2]]);
        assert_eq!(scan_pair_counts(&c, EventId(1), EventId(2), 2).unwrap().satisfied, 2);
        let c = corpus(&[&[1, 9, 2, 9]]);
        let s = scan_pair_counts(&c, EventId(1), EventId(2), 2).unwrap();
        assert_eq!((s.satisfied, s.sub_traces, s.observed), (0, 2, 2));
        // third sub-trace has nothing to project and conforms vacuously
        let c = corpus(&[&[1, 2, 9]]);
        let s = scan_pair_counts(&c, EventId(1), EventId(2), 3).unwrap();
        assert_eq!((s.satisfied, s.observed), (1, 2));
    }

    #[test]
    fn mine_examples() {
        let out = mine_alternating(&corpus(&[&[1, 2, 1, 2]]), &AlternatingConfig { k_partitions: 1, min_rate: 1.0 }).unwrap();
        assert_eq!(out, vec![AlternatingProperty { x: EventId(1), y: EventId(2), satisfaction_rate: 1.0, observed: 1 }]);

        let out = mine_alternating(&example(), &AlternatingConfig { k_partitions: 1, min_rate: 1.0 }).unwrap();
        assert!(out.iter().any(|p| (p.x, p.y) == (EventId(3), EventId(4))));
        assert!(!out.iter().any(|p| (p.x, p.y) == (EventId(1), EventId(2))));

        let empty = Corpus::new(Vocabulary::placeholder(3), vec![], "").unwrap();
        assert!(mine_alternating(&empty, &AlternatingConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn output_sorted_by_rate_then_pair() {
        let c = corpus(&[&[1, 2, 3, 1, 2], &[1, 3, 2]]);
        let out = mine_alternating(&c, &AlternatingConfig { k_partitions: 1, min_rate: 0.1 }).unwrap();
        assert!(out.windows(2).all(|w| {
            w[0].satisfaction_rate > w[1].satisfaction_rate
                || (w[0].satisfaction_rate == w[1].satisfaction_rate && (w[0].x, w[0].y) < (w[1].x, w[1].y))
        }));
    }

    #[test]
    fn config_validation() {
        assert!(AlternatingConfig { k_partitions: 0, min_rate: 1.0 }.validate().is_err());
        assert!(AlternatingConfig { k_partitions: 1, min_rate: 0.0 }.validate().is_err());
        assert!(AlternatingConfig { k_partitions: 1, min_rate: 1.5 }.validate().is_err());
        assert!(scan_pair(&corpus(&[&[1]]), EventId(1), EventId(1), 1).is_err());
    }

    #[test]
    fn chain_examples() {
        let c = chain(&[prop(1, 2), prop(2, 3)]);
        assert_eq!(c, vec![AlternatingChain { events: ids(&[1, 2, 3]) }]);
        assert!(chain(&[prop(1, 2), prop(3, 4)]).is_empty());
        let c = chain(&[prop(1, 2), prop(2, 3), prop(3, 4)]);
        assert_eq!(c, vec![AlternatingChain { events: ids(&[1, 2, 3, 4]) }]);
    }

    #[test]
    fn chain_cycles_stop_at_repeat() {
        let c = chain(&[prop(1, 2), prop(2, 3), prop(3, 1)]);
        let got: Vec<Vec<EventId>> = c.into_iter().map(|c| c.events).collect();
        assert_eq!(got, vec![ids(&[1, 2, 3]), ids(&[2, 3, 1]), ids(&[3, 1, 2])]);
        assert!(chain(&[prop(1, 2), prop(2, 1)]).is_empty());
    }

    #[test]
    fn render_and_parse() {
        let text = render_properties(&[prop(3, 4)]);
        assert_eq!(text, "3 -> 4 rate=1.0000\n");
        let p = parse_line(text.trim()).unwrap();
        assert_eq!(p.sequence, ids(&[3, 4]));
        assert_eq!(render_chains(&[AlternatingChain { events: ids(&[1, 2, 3]) }]), "1 -> 2 -> 3\n");
        assert_eq!(parse_line("1 -> 2 -> 3").unwrap().sequence, ids(&[1, 2, 3]));
    }
}
