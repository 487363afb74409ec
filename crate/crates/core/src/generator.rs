//! Seeded synthetic corpora built from a pool of ground-truth flow instances.
//!
//! Three regimes:
//! - `Sni`: one event per step, instances run start to end without interleaving.
//! - `Si`: one event per step, up to `max_active` instances in flight, each step
//!   advances one instance chosen uniformly.
//! - `Mi`: like `Si`, but a step advances between 1 and `max_step_width`
//!   distinct in-flight instances at once.
//!
//! Each trace draws from its own ChaCha stream seeded with `seed ^ trace_index`,
//! so any single trace can be regenerated without the others.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::kv::{self, KvError};
use crate::model::{Corpus, EventId, GroundTruthPattern, ModelError, PatternPool, Step, Trace, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid generator config: {0}")]
    Config(String),
    #[error("vocabulary has {size} entries but the pool uses event {max}")]
    Vocabulary { size: usize, max: EventId },
    #[error(transparent)]
    Kv(#[from] KvError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Sni,
    Si,
    Mi,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sni => "SNI",
            Mode::Si => "SI",
            Mode::Mi => "MI",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "SNI" => Ok(Mode::Sni),
            "SI" => Ok(Mode::Si),
            "MI" => Ok(Mode::Mi),
            other => Err(format!("unknown mode {other:?} (expected SNI, SI or MI)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub mode: Mode,
    pub n_traces: usize,
    pub reps_min: usize,
    pub reps_max: usize,
    /// Instances in flight at once (SI/MI).
    pub max_active: usize,
    /// Events per step (MI).
    pub max_step_width: usize,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            mode: Mode::Sni,
            n_traces: 100,
            reps_min: 1,
            reps_max: 5,
            max_active: 4,
            max_step_width: 3,
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::Config(m.to_string()));
        if self.n_traces == 0 {
            return bad("n_traces must be positive");
        }
        if self.reps_min == 0 || self.reps_min > self.reps_max {
            return bad("need 1 <= reps_min <= reps_max");
        }
        if self.max_active == 0 {
            return bad("max_active must be positive");
        }
        if self.max_step_width == 0 {
            return bad("max_step_width must be positive");
        }
        if self.mode == Mode::Mi && self.max_step_width < 2 {
            return bad("MI with max_step_width = 1 degenerates to SI");
        }
        Ok(())
    }

    /// Overrides fields from `key=value` pairs (`mode`, `traces`, `reps_min`,
    /// `reps_max`, `max_active`, `max_step_width`, `seed`).
    pub fn apply_kv(&mut self, pairs: &BTreeMap<String, String>) -> Result<(), GenError> {
        for (k, v) in pairs {
            match k.as_str() {
                "mode" => {
                    self.mode = v.parse().map_err(|_| KvError::BadValue { key: k.clone(), value: v.clone() })?
                }
                "traces" | "n_traces" => self.n_traces = kv::value(k, v)?,
                "reps_min" => self.reps_min = kv::value(k, v)?,
                "reps_max" => self.reps_max = kv::value(k, v)?,
                "max_active" => self.max_active = kv::value(k, v)?,
                "max_step_width" => self.max_step_width = kv::value(k, v)?,
                "seed" => self.seed = kv::value(k, v)?,
                _ => return Err(KvError::UnknownKey(k.clone()).into()),
            }
        }
        Ok(())
    }

    pub fn from_kv_text(text: &str) -> Result<Self, GenError> {
        let mut cfg = GenConfig::default();
        cfg.apply_kv(&kv::parse(text)?)?;
        Ok(cfg)
    }
}

/// A generated corpus together with what was scheduled into each trace.
#[derive(Debug, Clone)]
pub struct Generated {
    pub corpus: Corpus,
    /// Pool indices per trace, in the order instances were started.
    pub schedules: Vec<Vec<usize>>,
}

pub fn generate(pool: &PatternPool, cfg: &GenConfig) -> Result<Corpus, GenError> {
    generate_detailed(pool, cfg, None).map(|g| g.corpus)
}

/// Like [`generate`], with an explicit vocabulary (placeholder names otherwise)
/// and the per-trace schedules.
pub fn generate_detailed(
    pool: &PatternPool,
    cfg: &GenConfig,
    vocabulary: Option<Vocabulary>,
) -> Result<Generated, GenError> {
    cfg.validate()?;
    let max = pool.max_event();
    let vocabulary = vocabulary.unwrap_or_else(|| Vocabulary::placeholder(max.index() + 1));
    if vocabulary.len() <= max.index() {
        return Err(GenError::Vocabulary { size: vocabulary.len(), max });
    }

    let mut traces = Vec::with_capacity(cfg.n_traces);
    let mut schedules = Vec::with_capacity(cfg.n_traces);
    for i in 0..cfg.n_traces {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ i as u64);
        let schedule = draw_schedule(pool, cfg, &mut rng);
        let trace = match cfg.mode {
            Mode::Sni => emit_sequential(pool, &schedule),
            Mode::Si => emit_interleaved(pool, &schedule, cfg.max_active, 1, &mut rng),
            Mode::Mi => emit_interleaved(pool, &schedule, cfg.max_active, cfg.max_step_width, &mut rng),
        };
        traces.push(trace);
        schedules.push(schedule);
    }
    let provenance = format!(
        "synthetic mode={} traces={} reps={}..{} max_active={} max_step_width={} seed={}",
        cfg.mode, cfg.n_traces, cfg.reps_min, cfg.reps_max, cfg.max_active, cfg.max_step_width, cfg.seed
    );
    let corpus = Corpus::new(vocabulary, traces, provenance).map_err(|e: ModelError| GenError::Config(e.to_string()))?;
    Ok(Generated { corpus, schedules })
}

fn draw_schedule(pool: &PatternPool, cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut schedule = Vec::new();
    for idx in 0..pool.len() {
        let reps = rng.gen_range(cfg.reps_min..=cfg.reps_max);
        schedule.extend(std::iter::repeat_n(idx, reps));
    }
    schedule.shuffle(rng);
    schedule
}

fn emit_sequential(pool: &PatternPool, schedule: &[usize]) -> Trace {
    let steps = schedule
        .iter()
        .flat_map(|&p| pool.patterns()[p].events().iter().copied().map(Step::single))
        .collect();
    Trace::new(steps)
}

struct InFlight<'a> {
    events: &'a [EventId],
    pos: usize,
}

impl InFlight<'_> {
    fn next_event(&self) -> EventId {
        self.events[self.pos]
    }
}

fn emit_interleaved(
    pool: &PatternPool,
    schedule: &[usize],
    max_active: usize,
    max_width: usize,
    rng: &mut ChaCha8Rng,
) -> Trace {
    let mut pending: VecDeque<usize> = schedule.iter().copied().collect();
    let mut active: Vec<InFlight<'_>> = Vec::with_capacity(max_active);
    let mut steps = Vec::new();
    loop {
        while active.len() < max_active {
            match pending.pop_front() {
                Some(p) => active.push(InFlight { events: pool.patterns()[p].events(), pos: 0 }),
                None => break,
            }
        }
        if active.is_empty() {
            break;
        }
        let width = rng.gen_range(1..=max_width.min(active.len()));
        let mut slots = index::sample(rng, active.len(), width).into_vec();
        slots.sort_unstable();

        // A step is a set: when two slots offer the same id only the lowest advances.
        let mut events = Vec::with_capacity(width);
        let mut advanced = Vec::with_capacity(width);
        for slot in slots {
            let e = active[slot].next_event();
            if !events.contains(&e) {
                events.push(e);
                advanced.push(slot);
            }
        }
        steps.push(Step::new(events).expect("distinct and nonempty"));
        for &slot in &advanced {
            active[slot].pos += 1;
        }
        for &slot in advanced.iter().rev() {
            if active[slot].pos == active[slot].events.len() {
                active.remove(slot);
            }
        }
    }
    Trace::new(steps)
}

/// Segments a single-event trace into consecutive pool patterns. Prefers the
/// longest pattern at each position that still leaves a parsable remainder.
/// `None` when the trace is not such a concatenation (or not flat).
pub fn greedy_parse<'p>(trace: &Trace, pool: &'p PatternPool) -> Option<Vec<&'p GroundTruthPattern>> {
    let flat = trace.as_flat()?;
    let n = flat.len();
    let matches_at = |i: usize, p: &GroundTruthPattern| flat[i..].starts_with(p.events());

    let mut reachable = vec![false; n + 1];
    reachable[n] = true;
    for i in (0..n).rev() {
        reachable[i] = pool
            .patterns()
            .iter()
            .any(|p| matches_at(i, p) && reachable[i + p.len()]);
    }
    if !reachable[0] {
        return None;
    }

    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let p = pool
            .patterns()
            .iter()
            .filter(|p| matches_at(i, p) && reachable[i + p.len()])
            .max_by_key(|p| p.len())
            .expect("reachable position has a continuation");
        out.push(p);
        i += p.len();
    }
    Some(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PoolError {
    #[error("pool line {line}: {message}")]
    Line { line: usize, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Pool file: one pattern per line as space-separated ids, `#` lines ignored.
pub fn parse_pool(text: &str) -> Result<PatternPool, PoolError> {
    let mut patterns = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let seq = line
            .split_whitespace()
            .map(|tok| tok.parse::<u32>().map(EventId))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| PoolError::Line { line: i + 1, message: e.to_string() })?;
        let pattern =
            GroundTruthPattern::new(seq).map_err(|e| PoolError::Line { line: i + 1, message: e.to_string() })?;
        patterns.push(pattern);
    }
    Ok(PatternPool::new(patterns)?)
}

pub fn emit_pool(pool: &PatternPool) -> String {
    pool.patterns().iter().map(|p| format!("{p}\n")).collect()
}
