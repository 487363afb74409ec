//! Core trace types shared by the generator, the converters, and every miner.
//!
//! Events are dense integer ids. Human-readable message names only live in the
//! [`Vocabulary`], which maps an id to a `source:destination:command` triple.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("message component {0:?} is empty or contains ':' or whitespace")]
    BadComponent(String),
    #[error("message {0:?} is not of the form source:destination:command")]
    BadMessage(String),
    #[error("duplicate vocabulary entry {0}")]
    DuplicateMessage(String),
    #[error("a step must contain at least one event")]
    EmptyStep,
    #[error("event {0} appears twice in one step")]
    DuplicateInStep(EventId),
    #[error("event {id} is outside the vocabulary (size {size})")]
    UnknownEvent { id: EventId, size: usize },
    #[error("ground-truth pattern needs at least two events, got {0}")]
    PatternTooShort(usize),
    #[error("pattern pool is empty")]
    EmptyPool,
    #[error("pattern {0} appears twice in the pool")]
    DuplicatePattern(String),
}

/// Index of a message in a corpus vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub u32);

impl EventId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for EventId {
    fn from(v: u32) -> Self {
        EventId(v)
    }
}

/// Convenience for literals in tests and reference data.
pub fn ids(raw: &[u32]) -> Vec<EventId> {
    raw.iter().copied().map(EventId).collect()
}

/// One IP-to-IP communication action, e.g. `cpu0:cache:rd_req`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Message {
    pub source: String,
    pub destination: String,
    pub command: String,
}

fn check_component(c: &str) -> Result<(), ModelError> {
    if c.is_empty() || c.contains(':') || c.chars().any(char::is_whitespace) {
        return Err(ModelError::BadComponent(c.to_string()));
    }
    Ok(())
}

impl Message {
    pub fn new(source: &str, destination: &str, command: &str) -> Result<Self, ModelError> {
        check_component(source)?;
        check_component(destination)?;
        check_component(command)?;
        Ok(Message {
            source: source.to_string(),
            destination: destination.to_string(),
            command: command.to_string(),
        })
    }

    pub fn parse(rendered: &str) -> Result<Self, ModelError> {
        let parts: Vec<&str> = rendered.split(':').collect();
        match parts.as_slice() {
            [s, d, c] => Message::new(s, d, c),
            _ => Err(ModelError::BadMessage(rendered.to_string())),
        }
    }

    pub fn render(&self) -> String {
        format!("{}:{}:{}", self.source, self.destination, self.command)
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.source, self.destination, self.command)
    }
}

/// Ordered, duplicate-free list of messages; position is the event id.
#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    entries: Vec<Message>,
    index: HashMap<String, EventId>,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Eq for Vocabulary {}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_messages(messages: Vec<Message>) -> Result<Self, ModelError> {
        let mut vocab = Vocabulary::new();
        for m in messages {
            vocab.push(m)?;
        }
        Ok(vocab)
    }

    /// Generated names `src<i>:dst<i>:cmd<i>` for corpora that carry no naming.
    pub fn placeholder(size: usize) -> Self {
        let messages = (0..size)
            .map(|i| Message {
                source: format!("src{i}"),
                destination: format!("dst{i}"),
                command: format!("cmd{i}"),
            })
            .collect();
        Vocabulary::from_messages(messages).expect("placeholder names are unique")
    }

    pub fn push(&mut self, message: Message) -> Result<EventId, ModelError> {
        let key = message.render();
        if self.index.contains_key(&key) {
            return Err(ModelError::DuplicateMessage(key));
        }
        let id = EventId(self.entries.len() as u32);
        self.index.insert(key, id);
        self.entries.push(message);
        Ok(id)
    }

    /// Returns the existing id for `message` or appends it.
    pub fn intern(&mut self, message: Message) -> EventId {
        match self.index.get(&message.render()) {
            Some(&id) => id,
            None => self.push(message).expect("checked absent"),
        }
    }

    pub fn lookup(&self, rendered: &str) -> Option<EventId> {
        self.index.get(rendered).copied()
    }

    pub fn get(&self, id: EventId) -> Option<&Message> {
        self.entries.get(id.index())
    }

    /// Rendered name, or the bare number when the id is out of range.
    pub fn name(&self, id: EventId) -> String {
        self.get(id).map(Message::render).unwrap_or_else(|| id.to_string())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Message] {
        &self.entries
    }

    pub fn contains(&self, id: EventId) -> bool {
        id.index() < self.entries.len()
    }
}

/// Events captured at one timestamp. Keeps capture order; never empty, never
/// holds the same event twice.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Step(Vec<EventId>);

impl Step {
    pub fn new(events: Vec<EventId>) -> Result<Self, ModelError> {
        if events.is_empty() {
            return Err(ModelError::EmptyStep);
        }
        let mut seen = HashSet::with_capacity(events.len());
        for &e in &events {
            if !seen.insert(e) {
                return Err(ModelError::DuplicateInStep(e));
            }
        }
        Ok(Step(events))
    }

    pub fn single(event: EventId) -> Self {
        Step(vec![event])
    }

    pub fn events(&self) -> &[EventId] {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, e: EventId) -> bool {
        self.0.contains(&e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trace {
    pub steps: Vec<Step>,
}

impl Trace {
    pub fn new(steps: Vec<Step>) -> Self {
        Trace { steps }
    }

    /// Builds a trace from raw step contents.
    pub fn from_steps(steps: &[&[u32]]) -> Result<Self, ModelError> {
        steps
            .iter()
            .map(|s| Step::new(ids(s)))
            .collect::<Result<Vec<_>, _>>()
            .map(Trace::new)
    }

    /// One event per step.
    pub fn from_flat(events: &[EventId]) -> Self {
        Trace::new(events.iter().copied().map(Step::single).collect())
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn event_count(&self) -> usize {
        self.steps.iter().map(Step::width).sum()
    }

    pub fn is_flat(&self) -> bool {
        self.steps.iter().all(|s| s.width() == 1)
    }

    /// The event sequence of a single-event-per-step trace.
    pub fn as_flat(&self) -> Option<Vec<EventId>> {
        if !self.is_flat() {
            return None;
        }
        Some(self.steps.iter().map(|s| s.0[0]).collect())
    }

    pub fn events(&self) -> impl Iterator<Item = EventId> + '_ {
        self.steps.iter().flat_map(|s| s.0.iter().copied())
    }

    /// Intersects each step with `keep`, dropping steps that become empty.
    pub fn project(&self, keep: &HashSet<EventId>) -> Trace {
        let steps = self
            .steps
            .iter()
            .filter_map(|s| {
                let kept: Vec<EventId> = s.0.iter().copied().filter(|e| keep.contains(e)).collect();
                (!kept.is_empty()).then_some(Step(kept))
            })
            .collect();
        Trace { steps }
    }

    /// Indices of the steps that contain `e`, strictly increasing.
    pub fn occurrences(&self, e: EventId) -> Vec<usize> {
        self.steps
            .iter()
            .enumerate()
            .filter(|(_, s)| s.contains(e))
            .map(|(i, _)| i)
            .collect()
    }
}

/// True iff `pattern` embeds order-preservingly in `trace_flat`.
pub fn contains_subsequence(trace_flat: &[EventId], pattern: &[EventId]) -> bool {
    let mut want = pattern.iter().peekable();
    for e in trace_flat {
        match want.peek() {
            None => return true,
            Some(&&p) if p == *e => {
                want.next();
            }
            Some(_) => {}
        }
    }
    want.peek().is_none()
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    pub vocabulary: Vocabulary,
    pub traces: Vec<Trace>,
    pub provenance: String,
}

impl Corpus {
    pub fn new(vocabulary: Vocabulary, traces: Vec<Trace>, provenance: impl Into<String>) -> Result<Self, ModelError> {
        let corpus = Corpus { vocabulary, traces, provenance: provenance.into() };
        corpus.validate()?;
        Ok(corpus)
    }

    /// Checks that every trace references only vocabulary ids.
    pub fn validate(&self) -> Result<(), ModelError> {
        let size = self.vocabulary.len();
        for e in self.traces.iter().flat_map(Trace::events) {
            if e.index() >= size {
                return Err(ModelError::UnknownEvent { id: e, size });
            }
        }
        Ok(())
    }

    pub fn is_flat(&self) -> bool {
        self.traces.iter().all(Trace::is_flat)
    }

    /// Event sequences of every trace, or `None` if any step has width > 1.
    pub fn flat_sequences(&self) -> Option<Vec<Vec<EventId>>> {
        self.traces.iter().map(Trace::as_flat).collect()
    }

    pub fn event_count(&self) -> usize {
        self.traces.iter().map(Trace::event_count).sum()
    }
}

/// One flow instance as an exact event order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundTruthPattern(Vec<EventId>);

impl GroundTruthPattern {
    pub fn new(sequence: Vec<EventId>) -> Result<Self, ModelError> {
        if sequence.len() < 2 {
            return Err(ModelError::PatternTooShort(sequence.len()));
        }
        Ok(GroundTruthPattern(sequence))
    }

    pub fn events(&self) -> &[EventId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for GroundTruthPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", join_ids(&self.0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternPool {
    patterns: Vec<GroundTruthPattern>,
}

impl PatternPool {
    pub fn new(patterns: Vec<GroundTruthPattern>) -> Result<Self, ModelError> {
        if patterns.is_empty() {
            return Err(ModelError::EmptyPool);
        }
        let mut seen = HashSet::new();
        for p in &patterns {
            if !seen.insert(p) {
                return Err(ModelError::DuplicatePattern(p.to_string()));
            }
        }
        Ok(PatternPool { patterns })
    }

    pub fn from_raw(raw: &[&[u32]]) -> Result<Self, ModelError> {
        let patterns = raw
            .iter()
            .map(|p| GroundTruthPattern::new(ids(p)))
            .collect::<Result<Vec<_>, _>>()?;
        PatternPool::new(patterns)
    }

    pub fn patterns(&self) -> &[GroundTruthPattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn max_event(&self) -> EventId {
        self.patterns
            .iter()
            .flat_map(|p| p.0.iter().copied())
            .max()
            .expect("pool and patterns are nonempty")
    }
}

/// A miner result: an ordered event sequence plus whatever statistics the
/// producing miner attaches.
#[derive(Debug, Clone, PartialEq)]
pub struct MinedPattern {
    pub sequence: Vec<EventId>,
    pub support: u64,
    pub confidence: Option<f64>,
    pub extra: BTreeMap<String, f64>,
}

impl MinedPattern {
    pub fn new(sequence: Vec<EventId>, support: u64) -> Self {
        debug_assert!(!sequence.is_empty());
        MinedPattern { sequence, support, confidence: None, extra: BTreeMap::new() }
    }

    pub fn with_confidence(mut self, confidence: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&confidence));
        self.confidence = Some(confidence);
        self
    }

    pub fn with_stat(mut self, key: &str, value: f64) -> Self {
        self.extra.insert(key.to_string(), value);
        self
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }
}

pub(crate) fn join_ids(seq: &[EventId]) -> String {
    seq.iter().map(EventId::to_string).collect::<Vec<_>>().join(" ")
}
