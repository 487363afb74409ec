//! The CPU downstream write example: four flow instances over six messages and
//! one interleaved trace with a concurrent first step.

use crate::model::{Corpus, Message, PatternPool, Trace, Vocabulary};

/// `(source, destination, command)` for ids 0..=6. Id 0 is unused by the flows.
const MESSAGES: [(&str, &str, &str); 7] = [
    ("cpu0", "cache", "wr_req"),
    ("cpu0", "cache", "rd_req"),
    ("cache", "cpu0", "rd_resp"),
    ("cpu1", "cache", "rd_req"),
    ("cache", "cpu1", "rd_resp"),
    ("cache", "mem", "rd_req"),
    ("mem", "cache", "rd_resp"),
];

pub const GROUND_TRUTH: [&[u32]; 4] = [&[1, 2], &[1, 5, 6, 2], &[3, 4], &[3, 5, 6, 4]];

pub const EXAMPLE_STEPS: [&[u32]; 11] = [
    &[1, 3],
    &[1],
    &[2],
    &[5],
    &[1],
    &[5],
    &[6],
    &[2],
    &[4],
    &[6],
    &[2],
];

pub fn example_vocabulary() -> Vocabulary {
    let messages = MESSAGES
        .iter()
        .map(|(s, d, c)| Message::new(s, d, c).expect("static names are valid"))
        .collect();
    Vocabulary::from_messages(messages).expect("static names are unique")
}

pub fn ground_truth_pool() -> PatternPool {
    PatternPool::from_raw(&GROUND_TRUTH).expect("static pool is valid")
}

pub fn example_trace() -> Trace {
    Trace::from_steps(&EXAMPLE_STEPS).expect("static trace is valid")
}

pub fn example_corpus() -> Corpus {
    Corpus::new(example_vocabulary(), vec![example_trace()], "cpu-downstream-write example")
        .expect("static corpus is valid")
}
