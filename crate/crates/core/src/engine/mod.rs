//! The windowed recognition engine.

mod compile;
mod eval;
mod intern;
mod store;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::interval::{End, Interval, IntervalError, IntervalList};
use crate::rules::{stratify, validate, DomainSpec, EventDescription, Grounding, ItemKind, RuleError};
use crate::stream::{Action, InputRecord, Payload};
use crate::{Span, Spans, Tick};

use compile::{compile, CItem, Compiled};
use eval::Ctx;
pub use intern::{Interner, Sym};
use store::{Args, FKey, SdeStore, StoredPayload};

/// Which intervals are reported at each query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Everything currently recognised.
    #[default]
    Asap,
    /// Intervals that have started by the next window start.
    PartialStable,
    /// Only intervals that can no longer change.
    Final,
}

impl FromStr for Mode {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "asap" => Ok(Mode::Asap),
            "partial" | "partial_stable" => Ok(Mode::PartialStable),
            "final" => Ok(Mode::Final),
            other => Err(EngineError::Config(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineConfig {
    /// Window length in ticks.
    pub wm: Tick,
    /// Distance between query times in ticks.
    pub step: Tick,
    pub mode: Mode,
    /// Wall milliseconds per tick.
    pub tick_ms: f64,
}

impl EngineConfig {
    pub fn new(wm: Tick, step: Tick, mode: Mode) -> Self {
        EngineConfig { wm, step, mode, tick_ms: 40.0 }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.wm <= 0 || self.step <= 0 {
            return Err(EngineError::Config(format!("wm ({}) and step ({}) must be positive", self.wm, self.step)));
        }
        if self.wm < self.step {
            return Err(EngineError::Config(format!("wm ({}) is shorter than step ({})", self.wm, self.step)));
        }
        if !(self.tick_ms.is_finite() && self.tick_ms > 0.0) {
            return Err(EngineError::Config(format!("tick duration must be positive, got {}", self.tick_ms)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    /// End not known yet.
    Open,
    /// May still change at the next query.
    Partial,
    /// Ends at or before the next window start.
    Final,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Entry {
    pub name: String,
    pub args: Vec<String>,
    pub value: String,
    pub interval: Span,
    pub stability: Stability,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RecognitionResult {
    pub q: Tick,
    pub entries: Vec<Entry>,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Rules(#[from] RuleError),
    #[error("query at {got} but the next scheduled query is {expected}")]
    Schedule { expected: Tick, got: Tick },
    #[error("invalid shard {index} of {count}")]
    Shard { index: usize, count: usize },
    #[error("evaluation failed: {0}")]
    Evaluation(String),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

/// Non-fatal condition met while applying records or evaluating rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub q: Tick,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={}: {}", self.q, self.message)
    }
}

/// Slice of the grounding space owned by one engine instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShardSpec {
    pub index: usize,
    pub count: usize,
}

impl ShardSpec {
    pub const WHOLE: ShardSpec = ShardSpec { index: 0, count: 1 };
}

/// State used by a query, for independent re-evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Snapshot {
    pub q: Tick,
    pub ws: Tick,
    /// Entities of input-derived domains, in grounding order.
    pub entities: Vec<String>,
    /// Resident input events `(name, args, t)`.
    pub events: Vec<(String, Vec<String>, Tick)>,
    /// Resident durative records per input fluent-value, with the flag
    /// telling whether it held at the window start.
    pub durative: Vec<SnapDurative>,
    /// Pre-window state of composite fluent-values.
    pub carried: Vec<SnapCarried>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapDurative {
    pub name: String,
    pub args: Vec<String>,
    pub value: String,
    pub intervals: Vec<Span>,
    pub held_at_boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapCarried {
    pub name: String,
    pub args: Vec<String>,
    pub value: String,
    /// For simple fluents the interval of the retained initiation, for
    /// statically determined ones the prefix ending at `ws+1`.
    pub interval: Span,
    /// Simple fluent whose initiation point `interval.start - 1` is kept.
    pub kept: bool,
}

#[derive(Debug, Clone)]
enum Carried {
    Kept(Tick),
    Prefix(Span),
}

pub struct Engine {
    cfg: EngineConfig,
    shard: ShardSpec,
    interner: Interner,
    compiled: Compiled,
    store: SdeStore,
    pending: Vec<InputRecord>,
    next_q: Tick,
    /// Composite lists from the previous query.
    prev: HashMap<FKey, Spans>,
    entity_index: HashMap<Sym, u32>,
    listed: HashMap<String, Vec<Sym>>,
    warnings: Vec<Warning>,
    snapshot: Snapshot,
}

impl fmt::Debug for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Engine")
            .field("cfg", &self.cfg)
            .field("shard", &self.shard)
            .field("next_q", &self.next_q)
            .finish()
    }
}

impl Engine {
    /// Validates and stratifies the description if needed.
    pub fn new(ed: &EventDescription, cfg: EngineConfig) -> Result<Self, EngineError> {
        cfg.validate()?;
        let diags = validate(ed);
        if !diags.is_empty() {
            return Err(RuleError::Invalid(diags).into());
        }
        let ed = if ed.evaluation_order.is_empty() && ed.declarations.iter().any(|d| !d.kind.is_input()) {
            stratify(ed.clone())?
        } else {
            ed.clone()
        };
        let mut interner = Interner::default();
        let compiled = compile(&ed, &mut interner);
        let mut engine = Engine {
            cfg,
            shard: ShardSpec::WHOLE,
            interner,
            compiled,
            store: SdeStore::default(),
            pending: Vec::new(),
            next_q: cfg.step,
            prev: HashMap::new(),
            entity_index: HashMap::new(),
            listed: HashMap::new(),
            warnings: Vec::new(),
            snapshot: Snapshot::default(),
        };
        let mut domains: Vec<(String, Vec<String>)> = engine
            .compiled
            .domains
            .iter()
            .filter_map(|(n, d)| match d {
                DomainSpec::Listed(m) => Some((n.clone(), m.clone())),
                DomainSpec::FromInput => None,
            })
            .collect();
        domains.sort();
        for (name, members) in domains {
            let syms: Vec<Sym> = members.iter().map(|m| engine.interner.intern(m)).collect();
            for &s in &syms {
                engine.note_entity(s);
            }
            engine.listed.insert(name, syms);
        }
        Ok(engine)
    }

    /// Restricts reporting, and evaluation where possible, to one shard.
    pub fn with_shard(mut self, shard: ShardSpec) -> Result<Self, EngineError> {
        if shard.count == 0 || shard.index >= shard.count {
            return Err(EngineError::Shard { index: shard.index, count: shard.count });
        }
        self.shard = shard;
        Ok(self)
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn next_query_time(&self) -> Tick {
        self.next_q
    }

    /// Buffers records; they take effect at the next query.
    pub fn ingest(&mut self, records: impl IntoIterator<Item = InputRecord>) {
        self.pending.extend(records);
    }

    pub fn take_warnings(&mut self) -> Vec<Warning> {
        std::mem::take(&mut self.warnings)
    }

    /// State used by the most recent query.
    pub fn snapshot(&self) -> &Snapshot {
        &self.snapshot
    }

    /// Number of resident input records.
    pub fn resident_records(&self) -> usize {
        self.store.len()
    }

    /// Earliest resident time point, boundary markers aside.
    pub fn earliest_resident(&self) -> Option<Tick> {
        self.store.earliest()
    }

    fn warn(&mut self, q: Tick, message: String) {
        log::warn!("q={q}: {message}");
        self.warnings.push(Warning { q, message });
    }

    fn note_entity(&mut self, s: Sym) {
        let n = self.entity_index.len() as u32;
        self.entity_index.entry(s).or_insert(n);
    }

    fn owns(&self, args: &[Sym]) -> bool {
        let k = self.shard.count as u64;
        if k == 1 {
            return true;
        }
        let idx = |s: &Sym| self.entity_index.get(s).copied().unwrap_or(0) as u64;
        let slot = match args {
            [] => 0,
            [a] => idx(a) % k,
            [a, b, ..] => {
                let (i, j) = (idx(a).min(idx(b)), idx(a).max(idx(b)));
                (j * j.saturating_sub(1) / 2 + i) % k
            }
        };
        slot == self.shard.index as u64
    }

    fn stored(&mut self, p: &Payload) -> Option<StoredPayload> {
        match p {
            Payload::Event { name, args, t } => {
                let args: Args = args.iter().map(|a| self.interner.intern(a)).collect();
                Some(StoredPayload::Event { name: self.interner.intern(name), args, t: *t })
            }
            Payload::Interval { name, args, value, from, to } => {
                let args: Args = args.iter().map(|a| self.interner.intern(a)).collect();
                let key = FKey { name: self.interner.intern(name), args, value: self.interner.intern(value) };
                let span = match to {
                    Some(e) => Interval::new(*from, *e).ok()?,
                    None => Interval::since(*from),
                };
                Some(StoredPayload::Interval { key, span })
            }
            Payload::Coord { .. } => None,
        }
    }

    fn assert_payload(&mut self, q: Tick, ws: Tick, id: &str, p: &Payload) {
        let stale = match p {
            Payload::Event { t, .. } => *t <= ws,
            Payload::Interval { to, .. } => to.is_some_and(|e| e <= ws + 1),
            Payload::Coord { .. } => {
                self.warn(q, format!("record `{id}`: coordinate samples must go through the closeness preprocessor"));
                return;
            }
        };
        if stale {
            self.warn(q, format!("record `{id}` took place at or before the window start {ws}; dropped"));
            return;
        }
        let Some(sp) = self.stored(p) else {
            self.warn(q, format!("record `{id}` has an empty interval; dropped"));
            return;
        };
        let args: Vec<Sym> = match &sp {
            StoredPayload::Event { args, .. } => args.to_vec(),
            StoredPayload::Interval { key, .. } => key.args.to_vec(),
        };
        for a in args {
            self.note_entity(a);
        }
        self.store.insert(id, sp);
    }

    fn apply_pending(&mut self, q: Tick, ws: Tick) {
        let pending = std::mem::take(&mut self.pending);
        for r in pending {
            match r.action {
                Action::Assert => {
                    if self.store.contains(&r.id) {
                        self.warn(q, format!("record `{}` is already live; duplicate assert ignored", r.id));
                    } else if let Some(p) = &r.payload {
                        self.assert_payload(q, ws, &r.id, p);
                    }
                }
                Action::Retract => {
                    if !self.store.remove(&r.id) {
                        self.warn(q, format!("retraction of unknown or evicted record `{}` ignored", r.id));
                    }
                }
                Action::Update => {
                    if !self.store.remove(&r.id) {
                        self.warn(q, format!("update of unknown or evicted record `{}` dropped", r.id));
                    } else if let Some(p) = &r.payload {
                        self.assert_payload(q, ws, &r.id, p);
                    }
                }
            }
        }
    }

    fn carried(&self, ws: Tick) -> HashMap<FKey, Carried> {
        let mut out = HashMap::new();
        for (key, list) in &self.prev {
            let simple = self.compiled.kinds.get(&key.name) == Some(&ItemKind::SimpleFluent);
            for iv in list {
                if iv.start > ws + 1 {
                    break;
                }
                let beyond = iv.end > End::At(ws + 1);
                if simple && beyond {
                    out.insert(key.clone(), Carried::Kept(iv.start - 1));
                } else if iv.contains(ws) {
                    out.insert(key.clone(), Carried::Prefix(Interval { start: iv.start, end: End::At(ws + 1) }));
                }
            }
        }
        out
    }

    fn domain(&self, name: &str, star: &[Sym]) -> Vec<Sym> {
        match self.listed.get(name) {
            Some(m) => m.clone(),
            None => star.to_vec(),
        }
    }

    fn groundings(&self, item: &CItem, star: &[Sym], carried_args: &[Args]) -> Vec<Args> {
        let mut out: Vec<Args> = match &item.grounding {
            None => vec![Args::new()],
            Some(Grounding::Domain(d)) => {
                self.domain(d, star).into_iter().map(|e| SmallVec::from_slice(&[e])).collect()
            }
            Some(Grounding::Pairs(d)) => {
                let dom = self.domain(d, star);
                let mut v = Vec::with_capacity(dom.len() * dom.len());
                for &a in &dom {
                    for &b in &dom {
                        if a != b {
                            v.push(SmallVec::from_slice(&[a, b]));
                        }
                    }
                }
                v
            }
            Some(Grounding::UnorderedPairs(d)) => {
                let dom = self.domain(d, star);
                let mut v = Vec::new();
                for (i, &a) in dom.iter().enumerate() {
                    for &b in &dom[i + 1..] {
                        let (a, b) = if self.interner.resolve(a) <= self.interner.resolve(b) { (a, b) } else { (b, a) };
                        v.push(SmallVec::from_slice(&[a, b]));
                    }
                }
                v
            }
        };
        if item.arity == 0 {
            out.truncate(1);
        }
        let mut seen: HashSet<Args> = out.iter().cloned().collect();
        for a in carried_args {
            if seen.insert(a.clone()) {
                out.push(a.clone());
            }
        }
        out
    }

    /// Runs the query scheduled at `qi`.
    pub fn query(&mut self, qi: Tick) -> Result<RecognitionResult, EngineError> {
        if qi != self.next_q {
            return Err(EngineError::Schedule { expected: self.next_q, got: qi });
        }
        let ws = qi - self.cfg.wm;
        self.apply_pending(qi, ws);
        self.store.forget(ws);

        let carried = self.carried(ws);
        let mut by_item: HashMap<Sym, Vec<Args>> = HashMap::new();
        for k in carried.keys() {
            by_item.entry(k.name).or_default().push(k.args.clone());
        }
        let mut star: Vec<Sym> =
            self.store.entities().chain(carried.keys().flat_map(|k| k.args.iter().copied())).collect();
        for s in star.clone() {
            self.note_entity(s);
        }
        star.sort_by_key(|s| self.entity_index[s]);
        star.dedup();

        let mut ctx = Ctx::new(ws, qi, &self.store, &self.compiled.kinds, &self.interner);
        let mut conflicts: Vec<(Tick, Sym, Sym, Sym, Args)> = Vec::new();
        let mut emitted_keys: Vec<FKey> = Vec::new();
        let no_args: Vec<Args> = Vec::new();
        for item in &self.compiled.items {
            let is_fluent = item.kind.is_fluent();
            if !is_fluent && !item.is_dependency {
                continue;
            }
            let carried_args = by_item.get(&item.name).unwrap_or(&no_args);
            for mut args in self.groundings(item, &star, carried_args) {
                let owned = self.owns(&args);
                if !owned && !item.is_dependency {
                    continue;
                }
                let key_of = |v: Sym, args: &Args| FKey { name: item.name, args: args.clone(), value: v };
                match item.kind {
                    ItemKind::SimpleFluent => {
                        let kept: Vec<Option<Tick>> = item
                            .values
                            .iter()
                            .map(|&v| match carried.get(&key_of(v, &args)) {
                                Some(Carried::Kept(t)) => Some(*t),
                                _ => None,
                            })
                            .collect();
                        let mut c = Vec::new();
                        let lists = ctx.simple_fluent(item, &args, &kept, &mut c)?;
                        conflicts.extend(c.into_iter().map(|(t, w, l)| (t, item.name, w, l, args.clone())));
                        for (&v, mut list) in item.values.iter().zip(lists) {
                            let key = key_of(v, &args);
                            if let Some(Carried::Prefix(p)) = carried.get(&key) {
                                list = crate::interval::union_all(&[IntervalList::normalize([*p])?, list]);
                            }
                            if !list.is_empty() {
                                if owned {
                                    emitted_keys.push(key.clone());
                                }
                                ctx.cur.lists.insert(key, Rc::new(list));
                            }
                        }
                    }
                    ItemKind::SdFluent => {
                        let prefix: Vec<Option<Spans>> = item
                            .values
                            .iter()
                            .map(|&v| match carried.get(&key_of(v, &args)) {
                                Some(Carried::Prefix(p)) => IntervalList::normalize([*p]).ok(),
                                _ => None,
                            })
                            .collect();
                        let lists = ctx.sd_fluent(item, &args, &prefix)?;
                        for (&v, list) in item.values.iter().zip(lists) {
                            if !list.is_empty() {
                                let key = key_of(v, &args);
                                if owned {
                                    emitted_keys.push(key.clone());
                                }
                                ctx.cur.lists.insert(key, Rc::new(list));
                            }
                        }
                    }
                    ItemKind::DerivedEvent => {
                        let times = ctx.derived_event(item, &args);
                        if !times.is_empty() {
                            ctx.cur.events.entry(item.name).or_default().push((std::mem::take(&mut args), times));
                        }
                    }
                    ItemKind::InputEvent | ItemKind::InputFluent => {}
                }
            }
        }
        let lists = std::mem::take(&mut ctx.cur.lists);
        drop(ctx);

        for (t, name, w, l, args) in conflicts {
            let a: Vec<&str> = args.iter().map(|s| self.interner.resolve(*s)).collect();
            let msg = format!(
                "{}({}) initiated as both {} and {} at {t}; keeping {}",
                self.interner.resolve(name),
                a.join(","),
                self.interner.resolve(w),
                self.interner.resolve(l),
                self.interner.resolve(w)
            );
            self.warn(qi, msg);
        }

        let nb = qi + self.cfg.step - self.cfg.wm;
        let mut entries = Vec::new();
        for key in &emitted_keys {
            for iv in lists[key].iter() {
                let stability = match iv.end {
                    End::Open => Stability::Open,
                    End::At(e) if e <= nb => Stability::Final,
                    End::At(_) => Stability::Partial,
                };
                let keep = match self.cfg.mode {
                    Mode::Asap => true,
                    Mode::PartialStable => iv.start <= nb,
                    Mode::Final => stability == Stability::Final,
                };
                if keep {
                    entries.push(Entry {
                        name: self.interner.resolve(key.name).to_string(),
                        args: self.strings(&key.args),
                        value: self.interner.resolve(key.value).to_string(),
                        interval: *iv,
                        stability,
                    });
                }
            }
        }
        entries.sort_by(|a, b| {
            (&a.name, &a.args, a.interval.start, &a.value).cmp(&(&b.name, &b.args, b.interval.start, &b.value))
        });

        self.snapshot = self.take_snapshot(qi, ws, &star, &carried);
        self.prev = lists.into_iter().map(|(k, v)| (k, Rc::try_unwrap(v).unwrap_or_else(|rc| (*rc).clone()))).collect();
        self.next_q += self.cfg.step;
        Ok(RecognitionResult { q: qi, entries })
    }

    fn strings(&self, args: &[Sym]) -> Vec<String> {
        args.iter().map(|s| self.interner.resolve(*s).to_string()).collect()
    }

    fn take_snapshot(&self, q: Tick, ws: Tick, star: &[Sym], carried: &HashMap<FKey, Carried>) -> Snapshot {
        let events = self
            .store
            .event_list()
            .into_iter()
            .map(|(n, a, t)| (self.interner.resolve(n).to_string(), self.strings(&a), t))
            .collect();
        let durative = self
            .store
            .durative_list()
            .into_iter()
            .map(|(k, (intervals, held_at_boundary))| SnapDurative {
                name: self.interner.resolve(k.name).to_string(),
                args: self.strings(&k.args),
                value: self.interner.resolve(k.value).to_string(),
                intervals,
                held_at_boundary,
            })
            .collect();
        let mut carried: Vec<SnapCarried> = carried
            .iter()
            .map(|(k, c)| {
                let (interval, kept) = match c {
                    Carried::Kept(t) => {
                        let end = self.prev[k].interval_at(t + 1).map_or(End::Open, |iv| iv.end);
                        (Interval { start: t + 1, end }, true)
                    }
                    Carried::Prefix(p) => (*p, false),
                };
                SnapCarried {
                    name: self.interner.resolve(k.name).to_string(),
                    args: self.strings(&k.args),
                    value: self.interner.resolve(k.value).to_string(),
                    interval,
                    kept,
                }
            })
            .collect();
        carried.sort_by(|a, b| (&a.name, &a.args, &a.value).cmp(&(&b.name, &b.args, &b.value)));
        let mut events: Vec<(String, Vec<String>, Tick)> = events;
        events.sort();
        Snapshot { q, ws, entities: self.strings(star), events, durative, carried }
    }
}

/// Query times from the first one up to `last`.
pub fn query_times(cfg: &EngineConfig, last: Tick) -> impl Iterator<Item = Tick> {
    let step = cfg.step;
    (1..).map(move |i| i * step).take_while(move |q| *q <= last)
}

/// Last query time needed for every record to have been seen and every
/// interval to have become final.
pub fn drain_horizon(cfg: &EngineConfig, records: &[InputRecord]) -> Tick {
    let horizon = records
        .iter()
        .map(|r| {
            let content = match &r.payload {
                Some(Payload::Interval { from, to, .. }) => to.unwrap_or(*from + 1),
                Some(p) => p.occurrence(),
                None => 0,
            };
            content.max(r.arrival.unwrap_or(0))
        })
        .max()
        .unwrap_or(0);
    let need = horizon + cfg.wm;
    ((need + cfg.step - 1) / cfg.step).max(1) * cfg.step
}

/// Feeds a stream to an engine query by query. Records become visible at
/// the first query at or after their arrival. `on_query` sees each result
/// with the wall time the query took.
pub fn run_stream_with(
    engine: &mut Engine,
    records: &[InputRecord],
    last_q: Tick,
    mut on_query: impl FnMut(&Engine, &RecognitionResult, std::time::Duration),
) -> Result<Vec<RecognitionResult>, EngineError> {
    let mut order: Vec<&InputRecord> = records.iter().collect();
    order.sort_by_key(|r| effective_arrival(r));
    let mut next = 0;
    let mut out = Vec::new();
    while engine.next_query_time() <= last_q {
        let q = engine.next_query_time();
        let upto = order[next..].partition_point(|r| effective_arrival(r) <= q) + next;
        engine.ingest(order[next..upto].iter().map(|r| (*r).clone()));
        next = upto;
        let started = std::time::Instant::now();
        let res = engine.query(q)?;
        on_query(engine, &res, started.elapsed());
        out.push(res);
    }
    Ok(out)
}

/// [`run_stream_with`] up to the drain horizon of the stream.
pub fn run_stream(engine: &mut Engine, records: &[InputRecord]) -> Result<Vec<RecognitionResult>, EngineError> {
    let last = drain_horizon(engine.config(), records);
    run_stream_with(engine, records, last, |_, _, _| {})
}

fn effective_arrival(r: &InputRecord) -> Tick {
    r.effective_arrival().unwrap_or(0)
}

/// Final intervals over a whole run, one per fluent-value and start.
pub fn final_intervals(results: &[RecognitionResult]) -> BTreeMap<(String, Vec<String>, String), Vec<Span>> {
    let mut out: BTreeMap<(String, Vec<String>, String), Vec<Span>> = BTreeMap::new();
    for r in results {
        for e in r.entries.iter().filter(|e| e.stability == Stability::Final) {
            out.entry((e.name.clone(), e.args.clone(), e.value.clone())).or_default().push(e.interval);
        }
    }
    for v in out.values_mut() {
        v.sort();
        v.dedup();
    }
    out
}
