use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{Corpus, Step, Trace};

/// Order given to the events of one concurrent step when it is spread over
/// consecutive single-event steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlattenPolicy {
    #[default]
    AscendingId,
    CaptureOrder,
    Random(u64),
}

impl fmt::Display for FlattenPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlattenPolicy::AscendingId => f.write_str("ascending"),
            FlattenPolicy::CaptureOrder => f.write_str("capture"),
            FlattenPolicy::Random(seed) => write!(f, "random:{seed}"),
        }
    }
}

impl FromStr for FlattenPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ascending" | "ascending_id" | "ascending-id" => Ok(FlattenPolicy::AscendingId),
            "capture" | "capture_order" | "capture-order" => Ok(FlattenPolicy::CaptureOrder),
            _ => match s.split_once(':') {
                Some(("random", seed)) => seed
                    .parse()
                    .map(FlattenPolicy::Random)
                    .map_err(|_| format!("bad random flatten seed {seed:?}")),
                _ => Err(format!("unknown flatten policy {s:?} (ascending, capture, random:<seed>)")),
            },
        }
    }
}

pub fn flatten(trace: &Trace, policy: FlattenPolicy) -> Trace {
    let mut rng = match policy {
        FlattenPolicy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut steps = Vec::with_capacity(trace.event_count());
    let mut buf = Vec::new();
    for step in &trace.steps {
        if step.width() == 1 {
            steps.push(step.clone());
            continue;
        }
        buf.clear();
        buf.extend_from_slice(step.events());
        match (policy, rng.as_mut()) {
            (FlattenPolicy::AscendingId, _) => buf.sort_unstable(),
            (FlattenPolicy::CaptureOrder, _) => {}
            (FlattenPolicy::Random(_), Some(rng)) => buf.shuffle(rng),
            (FlattenPolicy::Random(_), None) => unreachable!(),
        }
        steps.extend(buf.iter().copied().map(Step::single));
    }
    Trace::new(steps)
}

/// Flattens every trace. A random policy seeds trace `i` with `seed ^ i`.
pub fn flatten_corpus(corpus: &Corpus, policy: FlattenPolicy) -> Corpus {
    let traces = corpus
        .traces
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let p = match policy {
                FlattenPolicy::Random(seed) => FlattenPolicy::Random(seed ^ i as u64),
                other => other,
            };
            flatten(t, p)
        })
        .collect();
    Corpus { vocabulary: corpus.vocabulary.clone(), traces, provenance: corpus.provenance.clone() }
}
