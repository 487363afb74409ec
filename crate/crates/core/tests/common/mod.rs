//! Brute-force reference implementations of the miners plus seeded corpus
//! builders. Nothing here calls into the miners under test.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;

use tracemine::model::{ids, Message, Step, Trace, Vocabulary};
use tracemine::Corpus;

pub type Seq = Vec<u32>;

fn is_subsequence(hay: &[u32], needle: &[u32]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|n| it.any(|h| h == n))
}

fn present(db: &[Seq]) -> Vec<u32> {
    db.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Corpus of flat traces over placeholder names.
pub fn flat_corpus(db: &[Seq], vocab: usize) -> Corpus {
    let traces = db.iter().map(|t| Trace::from_flat(&ids(t))).collect();
    Corpus::new(Vocabulary::placeholder(vocab), traces, "").unwrap()
}

/// Up to 3 traces of up to 12 events over at most 6 ids.
pub fn random_db(seed: u64) -> (Vec<Seq>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab = rng.gen_range(2..=6);
    let n = rng.gen_range(1..=3);
    let db = (0..n)
        .map(|_| {
            let len = rng.gen_range(0..=12);
            (0..len).map(|_| rng.gen_range(0..vocab as u32)).collect()
        })
        .collect();
    (db, vocab)
}

/// A random corpus with concurrent steps and random message names.
pub fn random_concurrent_corpus(seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = rng.gen_range(1..=8);
    let mut vocab = Vocabulary::new();
    while vocab.len() < size {
        let m = Message::new(
            &format!("n{}", rng.gen_range(0..6)),
            &format!("n{}", rng.gen_range(0..6)),
            ["rd_req", "rd_resp", "wr_req", "wr_resp", "inv", "ack"][rng.gen_range(0..6)],
        )
        .unwrap();
        vocab.intern(m);
    }
    let traces = (0..rng.gen_range(0..4))
        .map(|_| {
            let steps = (0..rng.gen_range(0..10))
                .map(|_| {
                    let width = rng.gen_range(1..=size.min(3));
                    let picked = rand::seq::index::sample(&mut rng, size, width);
                    Step::new(ids(&picked.iter().map(|i| i as u32).collect::<Vec<_>>())).unwrap()
                })
                .collect();
            Trace::new(steps)
        })
        .collect();
    let provenance = if rng.gen_bool(0.5) { format!("run {seed}") } else { String::new() };
    Corpus::new(vocab, traces, provenance).unwrap()
}

// ---- sequential patterns: enumerate every subsequence of every trace ----

pub fn seqpat(db: &[Seq], min_support: usize, max_len: Option<usize>) -> Vec<(Seq, u64)> {
    let mut counts: BTreeMap<Seq, u64> = BTreeMap::new();
    for t in db {
        let mut subs: BTreeSet<Seq> = BTreeSet::new();
        for mask in 1u32..(1 << t.len()) {
            let s: Seq = (0..t.len()).filter(|i| mask & (1 << i) != 0).map(|i| t[i]).collect();
            if max_len.is_none_or(|m| s.len() <= m) {
                subs.insert(s);
            }
        }
        for s in subs {
            *counts.entry(s).or_insert(0) += 1;
        }
    }
    counts.into_iter().filter(|&(_, c)| c >= min_support as u64).collect()
}

// ---- alternating: regex over each sub-trace projection ----

#[derive(Debug, Clone, PartialEq)]
pub struct AltRow {
    pub x: u32,
    pub y: u32,
    pub rate: f64,
    pub observed: usize,
}

pub fn alternating(db: &[Seq], k: usize, min_rate: f64) -> Vec<AltRow> {
    let re = Regex::new("^(xy)*$").unwrap();
    let events = present(db);
    let mut rows = Vec::new();
    for &x in &events {
        for &y in &events {
            if x == y {
                continue;
            }
            let (mut ok, mut total, mut observed) = (0usize, 0usize, 0usize);
            for t in db {
                let (base, extra) = (t.len() / k, t.len() % k);
                let mut start = 0;
                for part in 0..k {
                    let len = base + usize::from(part < extra);
                    let proj: String = t[start..start + len]
                        .iter()
                        .filter_map(|&e| (e == x).then_some('x').or((e == y).then_some('y')))
                        .collect();
                    start += len;
                    total += 1;
                    if !proj.is_empty() {
                        observed += 1;
                    }
                    if re.is_match(&proj) {
                        ok += 1;
                    }
                }
            }
            let rate = if total == 0 { 1.0 } else { ok as f64 / total as f64 };
            if observed > 0 && rate >= min_rate {
                rows.push(AltRow { x, y, rate, observed });
            }
        }
    }
    rows.sort_by(|a, b| b.rate.total_cmp(&a.rate).then((a.x, a.y).cmp(&(b.x, b.y))));
    rows
}

// ---- episodes: explicit window slices ----

pub fn windows(t: &[u32], w: usize) -> Vec<&[u32]> {
    if t.len() < w {
        vec![t]
    } else {
        t.windows(w).collect()
    }
}

pub fn episode_support(db: &[Seq], ep: &[u32], w: usize) -> u64 {
    db.iter()
        .map(|t| windows(t, w).into_iter().filter(|win| is_subsequence(win, ep)).count() as u64)
        .sum()
}

fn all_sequences(alphabet: &[u32], max_len: usize) -> Vec<Seq> {
    let mut out: Vec<Seq> = Vec::new();
    let mut frontier: Vec<Seq> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for p in &frontier {
            for &a in alphabet {
                let mut q = p.clone();
                q.push(a);
                next.push(q);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

pub fn episodes(db: &[Seq], w: usize, min_support: u64, min_conf: f64, max_len: usize) -> Vec<(Seq, u64, f64)> {
    let mut out = Vec::new();
    for ep in all_sequences(&present(db), max_len) {
        if ep.len() < 2 {
            continue;
        }
        let s = episode_support(db, &ep, w);
        let prefix = episode_support(db, &ep[..ep.len() - 1], w);
        if s >= min_support && prefix > 0 {
            let conf = s as f64 / prefix as f64;
            if conf >= min_conf {
                out.push((ep, s, conf));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

// ---- response template: check each pair occurrence by occurrence ----

pub fn follows_holds(db: &[Seq], x: u32, y: u32) -> bool {
    db.iter()
        .all(|t| t.iter().enumerate().all(|(i, &e)| e != x || t[i + 1..].contains(&y)))
}

pub fn ltl(db: &[Seq], vocab: usize) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for x in present(db) {
        for y in 0..vocab as u32 {
            if x != y && follows_holds(db, x, y) {
                out.push((x, y));
            }
        }
    }
    out
}

// ---- flow: scanned rules, chains enumerated then verified ----

#[derive(Debug, Clone, PartialEq)]
pub struct RuleRow {
    pub a: u32,
    pub b: u32,
    pub matched: u64,
    pub conf: f64,
}

pub fn flow_rules(db: &[Seq], vocab: usize, min_support: u64, min_conf: f64) -> Vec<RuleRow> {
    let mut out = Vec::new();
    for a in present(db) {
        for b in 0..vocab as u32 {
            if a == b {
                continue;
            }
            let (mut matched, mut total) = (0u64, 0u64);
            for t in db {
                for (i, &e) in t.iter().enumerate() {
                    if e == a {
                        total += 1;
                        if t[i + 1..].contains(&b) {
                            matched += 1;
                        }
                    }
                }
            }
            let conf = matched as f64 / total as f64;
            if matched >= min_support && conf >= min_conf {
                out.push(RuleRow { a, b, matched, conf });
            }
        }
    }
    out
}

fn subseq_support(db: &[Seq], p: &[u32]) -> u64 {
    db.iter().filter(|t| is_subsequence(t, p)).count() as u64
}

/// `(sequence, subsequence support, confidence for reported rules)`.
pub fn flow(db: &[Seq], vocab: usize, min_support: u64, min_conf: f64, max_chain_len: usize) -> Vec<(Seq, u64, Option<f64>)> {
    let rules = flow_rules(db, vocab, min_support, min_conf);
    let edge: BTreeSet<(u32, u32)> = rules.iter().map(|r| (r.a, r.b)).collect();
    let valid = |q: &[u32]| q.windows(2).all(|w| edge.contains(&(w[0], w[1]))) && subseq_support(db, q) >= min_support;

    let mut candidates: Vec<Seq> = Vec::new();
    let mut frontier: Vec<Seq> = edge.iter().map(|&(a, b)| vec![a, b]).collect();
    while let Some(len) = frontier.first().map(Vec::len) {
        if len >= max_chain_len {
            break;
        }
        let mut next = Vec::new();
        for p in &frontier {
            for &(a, b) in &edge {
                if a == *p.last().unwrap() {
                    let mut q = p.clone();
                    q.push(b);
                    next.push(q);
                }
            }
        }
        next.retain(|q| valid(q));
        candidates.extend(next.iter().cloned());
        frontier = next;
    }

    let extendable = |q: &Seq| {
        q.len() < max_chain_len
            && edge.iter().any(|&(a, b)| {
                a == *q.last().unwrap() && {
                    let mut r = q.clone();
                    r.push(b);
                    valid(&r)
                }
            })
    };
    let maximal: Vec<Seq> = candidates.iter().filter(|q| !extendable(q)).cloned().collect();
    let kept = maximal;
    let absorbed: BTreeSet<(u32, u32)> = kept.iter().flat_map(|p| p.windows(2).map(|w| (w[0], w[1]))).collect();

    let mut out: Vec<(Seq, u64, Option<f64>)> = kept.iter().map(|p| (p.clone(), subseq_support(db, p), None)).collect();
    for r in &rules {
        if !absorbed.contains(&(r.a, r.b)) {
            out.push((vec![r.a, r.b], subseq_support(db, &[r.a, r.b]), Some(r.conf)));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}
