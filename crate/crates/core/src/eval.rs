//! Scoring mined patterns against a ground-truth pool, and timed benchmark runs
//! of several miners over one corpus.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::budget::{Budget, Exhausted};
use crate::io::{flatten_corpus, FlattenPolicy};
use crate::kv;
use crate::mining::alternating::{self, AlternatingConfig};
use crate::mining::episode::{self, EpisodeConfig};
use crate::mining::flow::{self, FlowConfig};
use crate::mining::seqpat::{self, SeqpatConfig};
use crate::mining::{ltl, MineError};
use crate::model::{Corpus, EventId, MinedPattern, PatternPool, Vocabulary};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(2 * 60 * 60);
pub const DEFAULT_MAX_RESULTS: usize = 5_000_000;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no miners selected")]
    NoMiners,
    #[error("ground-truth event {event} is outside the corpus vocabulary of {size} events")]
    VocabularyMismatch { event: EventId, size: usize },
    #[error("unknown miner {0:?}")]
    UnknownMiner(String),
    #[error("bad argument for {miner}: {message}")]
    MinerArg { miner: String, message: String },
    #[error("mined output line {line} is not readable: {text:?}")]
    MinedLine { line: usize, text: String },
    #[error("{miner}: {source}")]
    Miner { miner: String, source: MineError },
}

/// Exact-match precision and recall over distinct mined sequences.
pub fn score(mined: &[MinedPattern], gt: &PatternPool) -> (f64, f64) {
    let seqs: Vec<&[EventId]> = mined.iter().map(|p| p.sequence.as_slice()).collect();
    score_sequences(&seqs, gt)
}

pub fn score_sequences(mined: &[&[EventId]], gt: &PatternPool) -> (f64, f64) {
    let distinct: BTreeSet<&[EventId]> = mined.iter().copied().collect();
    if distinct.is_empty() {
        return (0.0, 0.0);
    }
    let truth: BTreeSet<&[EventId]> = gt.patterns().iter().map(|p| p.events()).collect();
    let hits = distinct.intersection(&truth).count();
    (hits as f64 / distinct.len() as f64, hits as f64 / truth.len() as f64)
}

pub fn length_histogram(patterns: &[MinedPattern]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for p in patterns {
        *h.entry(p.len()).or_insert(0) += 1;
    }
    h
}

#[derive(Debug, Clone, PartialEq)]
pub enum MinerSpec {
    Seqpat(SeqpatConfig),
    Alternating(AlternatingConfig),
    Episode(EpisodeConfig),
    Ltl,
    Flow(FlowConfig),
}

pub const MINER_NAMES: [&str; 5] = ["seqpat", "alternating", "episode", "ltl", "flow"];

impl MinerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            MinerSpec::Seqpat(_) => "seqpat",
            MinerSpec::Alternating(_) => "alternating",
            MinerSpec::Episode(_) => "episode",
            MinerSpec::Ltl => "ltl",
            MinerSpec::Flow(_) => "flow",
        }
    }

    /// Keys accepted by [`MinerSpec::with_args`] for `name`.
    pub fn parameter_names(name: &str) -> Option<&'static [&'static str]> {
        Some(match name {
            "seqpat" => &["min_support", "max_len", "max_patterns"],
            "alternating" => &["k_partitions", "min_rate"],
            "episode" => &["window_w", "min_support", "min_confidence", "max_len"],
            "ltl" => &[],
            "flow" => &["min_support", "min_confidence", "max_chain_len"],
            _ => return None,
        })
    }

    pub fn default_for(name: &str) -> Result<Self, EvalError> {
        Self::with_args(name, &BTreeMap::new())
    }

    /// Builds a miner from its name and `key=value` parameters; missing keys
    /// keep the miner's defaults.
    pub fn with_args(name: &str, args: &BTreeMap<String, String>) -> Result<Self, EvalError> {
        let bad = |message: String| EvalError::MinerArg { miner: name.to_string(), message };
        let get = |key: &str| args.get(key).map(String::as_str);
        let allowed = Self::parameter_names(name).ok_or_else(|| EvalError::UnknownMiner(name.to_string()))?;
        if let Some(k) = args.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(bad(format!("unknown parameter {k:?}")));
        }
        fn set<T: std::str::FromStr>(slot: &mut T, key: &str, raw: Option<&str>) -> Result<(), String> {
            if let Some(raw) = raw {
                *slot = kv::value(key, raw).map_err(|e| e.to_string())?;
            }
            Ok(())
        }
        fn set_opt<T: std::str::FromStr>(slot: &mut Option<T>, key: &str, raw: Option<&str>) -> Result<(), String> {
            match raw {
                Some("none") => *slot = None,
                Some(raw) => *slot = Some(kv::value(key, raw).map_err(|e| e.to_string())?),
                None => {}
            }
            Ok(())
        }
        let spec = match name {
            "seqpat" => {
                let mut c = SeqpatConfig::default();
                set(&mut c.min_support, "min_support", get("min_support")).map_err(bad)?;
                set_opt(&mut c.max_len, "max_len", get("max_len")).map_err(bad)?;
                set_opt(&mut c.max_patterns, "max_patterns", get("max_patterns")).map_err(bad)?;
                MinerSpec::Seqpat(c)
            }
            "alternating" => {
                let mut c = AlternatingConfig::default();
                set(&mut c.k_partitions, "k_partitions", get("k_partitions")).map_err(bad)?;
                set(&mut c.min_rate, "min_rate", get("min_rate")).map_err(bad)?;
                c.validate().map_err(|e| bad(e.to_string()))?;
                MinerSpec::Alternating(c)
            }
            "episode" => {
                let mut c = EpisodeConfig::default();
                set(&mut c.window_w, "window_w", get("window_w")).map_err(bad)?;
                set(&mut c.min_support, "min_support", get("min_support")).map_err(bad)?;
                set(&mut c.min_confidence, "min_confidence", get("min_confidence")).map_err(bad)?;
                set(&mut c.max_len, "max_len", get("max_len")).map_err(bad)?;
                c.validate().map_err(|e| bad(e.to_string()))?;
                MinerSpec::Episode(c)
            }
            "ltl" => MinerSpec::Ltl,
            _ => {
                let mut c = FlowConfig::default();
                set(&mut c.min_support, "min_support", get("min_support")).map_err(bad)?;
                set(&mut c.min_confidence, "min_confidence", get("min_confidence")).map_err(bad)?;
                set(&mut c.max_chain_len, "max_chain_len", get("max_chain_len")).map_err(bad)?;
                c.validate().map_err(|e| bad(e.to_string()))?;
                MinerSpec::Flow(c)
            }
        };
        Ok(spec)
    }
}

/// What one miner produced, in its own output format and as scoreable patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct MinerOutput {
    pub patterns: Vec<MinedPattern>,
    pub rendered: String,
    pub notes: Vec<String>,
}

/// Runs one miner on a flattened corpus.
pub fn run_miner(spec: &MinerSpec, corpus: &Corpus, budget: &Budget) -> Result<MinerOutput, MineError> {
    let mut notes = Vec::new();
    let (patterns, rendered) = match spec {
        MinerSpec::Seqpat(cfg) => {
            let p = seqpat::mine_frequent_with(corpus, cfg, budget)?;
            let r = seqpat::render(&p);
            (p, r)
        }
        MinerSpec::Alternating(cfg) => {
            let props = alternating::mine_alternating_with(corpus, cfg, budget)?;
            let chains = alternating::chain(&props);
            let mut p: Vec<MinedPattern> = props.iter().map(|p| p.to_pattern()).collect();
            p.extend(chains.iter().map(|c| MinedPattern::new(c.events.clone(), 0)));
            let r = alternating::render_properties(&props) + &alternating::render_chains(&chains);
            (p, r)
        }
        MinerSpec::Episode(cfg) => {
            let out = episode::mine_episodes_with(corpus, cfg, budget)?;
            if out.whole_trace_windows > 0 {
                notes.push(format!(
                    "{} of {} traces are shorter than window_w={} and count as one window",
                    out.whole_trace_windows,
                    corpus.traces.len(),
                    cfg.window_w
                ));
            }
            let r = episode::render(&out.patterns);
            (out.patterns, r)
        }
        MinerSpec::Ltl => {
            let found = ltl::mine_follows_with(corpus, budget)?;
            let r = ltl::render(&found, &corpus.vocabulary);
            let p = found.iter().map(|f| MinedPattern::new(vec![f.x, f.y], 0)).collect();
            (p, r)
        }
        MinerSpec::Flow(cfg) => {
            let out = flow::mine_flow_with(corpus, cfg, budget)?;
            let rules: String = out.rules.iter().map(|r| format!("# rule {}\n", flow::render_rule(r))).collect();
            let r = rules + &flow::render(&out.patterns);
            (out.patterns, r)
        }
    };
    Ok(MinerOutput { patterns, rendered, notes })
}

/// Writes patterns (typically a partial result) in the named miner's format.
pub fn render_patterns(miner: &str, patterns: &[MinedPattern], vocab: &Vocabulary) -> String {
    match miner {
        "seqpat" => seqpat::render(patterns),
        "episode" => episode::render(patterns),
        "flow" => flow::render(patterns),
        "ltl" => patterns
            .iter()
            .filter(|p| p.len() == 2)
            .map(|p| ltl::render_instance(&ltl::FollowsInstance { x: p.sequence[0], y: p.sequence[1], vacuous: false }, vocab) + "\n")
            .collect(),
        _ => patterns
            .iter()
            .map(|p| {
                let arrows = p.sequence.iter().map(EventId::to_string).collect::<Vec<_>>().join(" -> ");
                match p.confidence {
                    Some(rate) if p.len() == 2 => format!("{arrows} rate={rate:.4}\n"),
                    _ => arrows + "\n",
                }
            })
            .collect(),
    }
}

/// Reads a mined-output file written for `miner`. Blank and `#` lines are
/// skipped; any other unreadable line is an error carrying its line number.
pub fn parse_mined(miner: &str, text: &str, vocab: &Vocabulary) -> Result<Vec<MinedPattern>, EvalError> {
    if MinerSpec::parameter_names(miner).is_none() {
        return Err(EvalError::UnknownMiner(miner.to_string()));
    }
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed = match miner {
            "seqpat" => seqpat::parse_line(line),
            "alternating" => alternating::parse_line(line),
            "episode" => episode::parse_line(line),
            "ltl" => ltl::parse_line(line, vocab).map(|f| MinedPattern::new(vec![f.x, f.y], 0)),
            _ => flow::parse_line(line),
        };
        out.push(parsed.ok_or_else(|| EvalError::MinedLine { line: i + 1, text: line.to_string() })?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Complete,
    Incomplete(Exhausted),
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunStatus::Complete => f.write_str("complete"),
            RunStatus::Incomplete(why) => write!(f, "incomplete:{why}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub miner: String,
    pub corpus: String,
    pub n_patterns: usize,
    pub n_binary: usize,
    pub precision: f64,
    pub recall: f64,
    pub runtime_ms: u128,
    pub length_histogram: BTreeMap<usize, usize>,
    pub status: RunStatus,
    pub patterns: Vec<MinedPattern>,
    pub notes: Vec<String>,
}

impl EvalReport {
    pub fn from_patterns(miner: &str, corpus: &str, patterns: Vec<MinedPattern>, gt: &PatternPool) -> Self {
        let (precision, recall) = score(&patterns, gt);
        EvalReport {
            miner: miner.to_string(),
            corpus: corpus.to_string(),
            n_patterns: patterns.len(),
            n_binary: patterns.iter().filter(|p| p.len() == 2).count(),
            precision,
            recall,
            runtime_ms: 0,
            length_histogram: length_histogram(&patterns),
            status: RunStatus::Complete,
            patterns,
            notes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    /// Per-miner wall-clock limit.
    pub timeout: Duration,
    pub max_results: Option<usize>,
    pub flatten: FlattenPolicy,
    /// Label written to the report's corpus column.
    pub corpus_name: String,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            timeout: DEFAULT_TIMEOUT,
            max_results: Some(DEFAULT_MAX_RESULTS),
            flatten: FlattenPolicy::default(),
            corpus_name: "corpus".to_string(),
        }
    }
}

/// Runs the miners one after another, each timed alone under its own budget.
/// A miner that runs out of budget yields an incomplete report built from its
/// partial output.
pub fn run_benchmark(
    corpus: &Corpus,
    gt: &PatternPool,
    miners: &[MinerSpec],
    opts: &BenchOptions,
) -> Result<Vec<EvalReport>, EvalError> {
    if miners.is_empty() {
        return Err(EvalError::NoMiners);
    }
    check_vocabulary(corpus, gt)?;
    let flat = flatten_corpus(corpus, opts.flatten);

    let mut reports = Vec::with_capacity(miners.len());
    for spec in miners {
        let budget = Budget::new(Some(opts.timeout), opts.max_results);
        let started = Instant::now();
        let result = run_miner(spec, &flat, &budget);
        let runtime_ms = started.elapsed().as_millis();

        let (patterns, notes, status) = match result {
            Ok(out) => (out.patterns, out.notes, RunStatus::Complete),
            Err(MineError::Interrupted { reason, partial }) => (partial, Vec::new(), RunStatus::Incomplete(reason)),
            Err(source) => return Err(EvalError::Miner { miner: spec.name().to_string(), source }),
        };
        let mut report = EvalReport::from_patterns(spec.name(), &opts.corpus_name, patterns, gt);
        report.runtime_ms = runtime_ms;
        report.status = status;
        report.notes = notes;
        reports.push(report);
    }
    Ok(reports)
}

pub fn check_vocabulary(corpus: &Corpus, gt: &PatternPool) -> Result<(), EvalError> {
    let max = gt.max_event();
    if max.index() >= corpus.vocabulary.len() {
        return Err(EvalError::VocabularyMismatch { event: max, size: corpus.vocabulary.len() });
    }
    Ok(())
}

pub const CSV_HEADER: &str = "miner,corpus,n_patterns,n_binary,precision,recall,runtime_ms,status";

pub fn render_csv(reports: &[EvalReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{:.4},{:.4},{},{}\n",
            r.miner, r.corpus, r.n_patterns, r.n_binary, r.precision, r.recall, r.runtime_ms, r.status
        ));
    }
    out
}

pub fn render_table(reports: &[EvalReport]) -> String {
    let mut out = format!(
        "{:<12} {:>10} {:>8} {:>9} {:>7} {:>10}  {:<20} lengths\n",
        "miner", "#patterns", "#binary", "precision", "recall", "RT(ms)", "status"
    );
    for r in reports {
        let lengths: Vec<String> = r.length_histogram.iter().map(|(l, n)| format!("{l}:{n}")).collect();
        out.push_str(&format!(
            "{:<12} {:>10} {:>8} {:>9.4} {:>7.4} {:>10}  {:<20} {}\n",
            r.miner,
            r.n_patterns,
            r.n_binary,
            r.precision,
            r.recall,
            r.runtime_ms,
            r.status.to_string(),
            lengths.join(" ")
        ));
        for note in &r.notes {
            out.push_str(&format!("  note: {note}\n"));
        }
    }
    out
}
