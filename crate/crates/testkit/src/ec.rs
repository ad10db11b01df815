//! Brute-force Event Calculus over one window.
//!
//! Every composite fluent-value is evaluated at every time point of the
//! window by trying all substitutions, with inertia applied point by point.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use evcalc_core::engine::{RecognitionResult, SnapCarried, Snapshot};
use evcalc_core::rules::{
    Atom, CmpOp, DomainSpec, EventDescription, EventTerm, FluentTerm, Grounding, Head, ItemKind, Literal, Rule, Term,
};
use evcalc_core::stream::{Action, InputRecord, Payload};
use evcalc_core::{End, Interval, Span, Spans, Tick};

use crate::algebra::{self, Points};

pub type Key = (String, Vec<String>, String);

/// Input content of one window.
#[derive(Debug, Clone, Default)]
pub struct World {
    pub ws: Tick,
    pub qi: Tick,
    pub entities: Vec<String>,
    pub events: Vec<(String, Vec<String>, Tick)>,
    /// Intervals per input fluent-value and whether it held at `ws`.
    pub durative: BTreeMap<Key, (Vec<Span>, bool)>,
    pub carried: Vec<SnapCarried>,
}

impl World {
    pub fn from_snapshot(s: &Snapshot) -> World {
        World {
            ws: s.ws,
            qi: s.q,
            entities: s.entities.clone(),
            events: s.events.clone(),
            durative: s
                .durative
                .iter()
                .map(|d| ((d.name.clone(), d.args.clone(), d.value.clone()), (d.intervals.clone(), d.held_at_boundary)))
                .collect(),
            carried: s.carried.clone(),
        }
    }

    /// Net content of a record list applied in order, over `[0, qi]`.
    pub fn batch(records: &[InputRecord], qi: Tick) -> World {
        let mut live: Vec<(String, Payload)> = Vec::new();
        let mut entities: Vec<String> = Vec::new();
        for r in records {
            match r.action {
                Action::Assert => {
                    if !live.iter().any(|(id, _)| *id == r.id) {
                        if let Some(p) = &r.payload {
                            live.push((r.id.clone(), p.clone()));
                        }
                    }
                }
                Action::Retract => live.retain(|(id, _)| *id != r.id),
                Action::Update => {
                    if let Some(slot) = live.iter_mut().find(|(id, _)| *id == r.id) {
                        if let Some(p) = &r.payload {
                            slot.1 = p.clone();
                        }
                    }
                }
            }
            if let Some(p @ (Payload::Event { .. } | Payload::Interval { .. })) = &r.payload {
                for e in p.entities() {
                    if !entities.iter().any(|x| x == e) {
                        entities.push(e.to_string());
                    }
                }
            }
        }
        let mut w = World { ws: -1, qi, entities, ..World::default() };
        for (_, p) in live {
            match p {
                Payload::Event { name, args, t } => w.events.push((name, args, t)),
                Payload::Interval { name, args, value, from, to } => {
                    let iv = match to {
                        Some(e) => Interval { start: from, end: End::At(e) },
                        None => Interval::since(from),
                    };
                    w.durative.entry((name, args, value)).or_default().0.push(iv);
                }
                Payload::Coord { .. } => {}
            }
        }
        w
    }
}

/// Holding points of every composite fluent-value on `[ws, qi+1]` and the
/// occurrence times of derived events.
#[derive(Debug, Clone, Default)]
pub struct Recognition {
    pub ws: Tick,
    pub qi: Tick,
    pub fluents: BTreeMap<Key, Points>,
    pub kinds: BTreeMap<String, ItemKind>,
    pub events: BTreeMap<(String, Vec<String>), Points>,
}

impl Recognition {
    /// Last point compared for a fluent: simple fluents persist to `qi+1`
    /// by inertia, statically determined ones are known up to `qi`.
    pub fn horizon(&self, name: &str) -> Tick {
        match self.kinds.get(name) {
            Some(ItemKind::SimpleFluent) => self.qi + 1,
            _ => self.qi,
        }
    }

    /// Points of a fluent-value inside `[ws+1, horizon]`.
    pub fn window_points(&self, key: &Key) -> Points {
        let hi = self.horizon(&key.0);
        self.fluents.get(key).map(|p| p.range(self.ws + 1..=hi).copied().collect()).unwrap_or_default()
    }

    /// Maximal intervals inside the window; runs reaching the horizon are
    /// open.
    pub fn list(&self, key: &Key) -> Spans {
        algebra::to_list(&self.window_points(key), self.horizon(&key.0), true)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Val {
    S(String),
    I(i64),
}

type Subst = HashMap<String, Val>;

struct Eval<'a> {
    ed: &'a EventDescription,
    w: &'a World,
    lo: Tick,
    hi: Tick,
    kinds: HashMap<&'a str, ItemKind>,
    input: HashMap<Key, Vec<bool>>,
    events: HashMap<(String, Vec<String>), BTreeSet<Tick>>,
    fluents: HashMap<Key, Vec<bool>>,
    constants: Vec<String>,
}

impl<'a> Eval<'a> {
    fn idx(&self, t: Tick) -> Option<usize> {
        (t >= self.lo && t <= self.hi).then(|| (t - self.lo) as usize)
    }

    fn holds(&self, key: &Key, t: Tick) -> bool {
        let Some(i) = self.idx(t) else { return false };
        let map =
            if self.kinds.get(key.0.as_str()) == Some(&ItemKind::InputFluent) { &self.input } else { &self.fluents };
        map.get(key).is_some_and(|v| v[i])
    }

    fn occurs(&self, name: &str, args: &[String], t: Tick) -> bool {
        self.events.get(&(name.to_string(), args.to_vec())).is_some_and(|s| s.contains(&t))
    }

    fn ground(&self, t: &Term, s: &Subst) -> Option<Val> {
        match t {
            Term::Var(v) => s.get(v).cloned(),
            Term::Const(c) => Some(Val::S(c.clone())),
            Term::Int(i) => Some(Val::I(*i)),
        }
    }

    fn ground_args(&self, a: &Atom, s: &Subst) -> Option<Vec<String>> {
        a.args
            .iter()
            .map(|t| match self.ground(t, s)? {
                Val::S(x) => Some(x),
                Val::I(i) => Some(i.to_string()),
            })
            .collect()
    }

    fn fkey(&self, f: &FluentTerm, s: &Subst) -> Option<Key> {
        let value = f.value.constant()?;
        Some((f.fluent.name.clone(), self.ground_args(&f.fluent, s)?, value))
    }

    fn time(&self, t: &Term, s: &Subst) -> Option<Tick> {
        match self.ground(t, s)? {
            Val::I(i) => Some(i),
            Val::S(x) => x.parse().ok(),
        }
    }

    fn compare(l: &Val, op: CmpOp, r: &Val) -> bool {
        let num = |v: &Val| match v {
            Val::I(i) => Some(*i),
            Val::S(x) => x.parse::<i64>().ok(),
        };
        match (num(l), num(r), l, r) {
            (Some(a), Some(b), _, _) => op.eval(a, b),
            (_, _, Val::S(a), Val::S(b)) => op.eval(a, b),
            _ => op == CmpOp::Ne,
        }
    }

    fn literal(&self, lit: &Literal, s: &Subst) -> bool {
        match lit {
            Literal::HappensAt { event, time } => {
                let Some(t) = self.time(time, s) else { return false };
                match event {
                    EventTerm::Plain(a) => self.ground_args(a, s).is_some_and(|args| self.occurs(&a.name, &args, t)),
                    EventTerm::Start(f) => self.fkey(f, s).is_some_and(|k| self.holds(&k, t) && !self.holds(&k, t - 1)),
                    EventTerm::End(f) => self.fkey(f, s).is_some_and(|k| !self.holds(&k, t) && self.holds(&k, t - 1)),
                }
            }
            Literal::HoldsAt { fluent, time } => match (self.time(time, s), self.fkey(fluent, s)) {
                (Some(t), Some(k)) => self.holds(&k, t),
                _ => false,
            },
            Literal::Compare { lhs, op, rhs } => match (self.ground(lhs, s), self.ground(rhs, s)) {
                (Some(l), Some(r)) => Self::compare(&l, *op, &r),
                _ => false,
            },
            _ => false,
        }
    }

    /// Variables of a time-point rule, split into time and argument ones.
    fn rule_vars(rule: &Rule) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut times = BTreeSet::new();
        let mut args = BTreeSet::new();
        let atom = |a: &Atom, args: &mut BTreeSet<String>| {
            for v in a.vars() {
                args.insert(v.to_string());
            }
        };
        match &rule.head {
            Head::InitiatedAt { fluent, time } | Head::TerminatedAt { fluent, time } => {
                atom(&fluent.fluent, &mut args);
                times.insert(time.clone());
            }
            Head::HappensAt { event, time } => {
                atom(event, &mut args);
                times.insert(time.clone());
            }
            Head::HoldsFor { fluent, .. } => atom(&fluent.fluent, &mut args),
        }
        for lit in &rule.body {
            match lit {
                Literal::HappensAt { event, time } => {
                    match event {
                        EventTerm::Plain(a) => atom(a, &mut args),
                        EventTerm::Start(f) | EventTerm::End(f) => atom(&f.fluent, &mut args),
                    }
                    if let Some(v) = time.var() {
                        times.insert(v.to_string());
                    }
                }
                Literal::HoldsAt { fluent, time } => {
                    atom(&fluent.fluent, &mut args);
                    if let Some(v) = time.var() {
                        times.insert(v.to_string());
                    }
                }
                Literal::HoldsFor { fluent, .. } => atom(&fluent.fluent, &mut args),
                _ => {}
            }
        }
        let args = args.difference(&times).cloned().collect();
        (times, args)
    }

    /// Binds head arguments to a grounding.
    fn bind_head(a: &Atom, ground: &[String]) -> Option<Subst> {
        let mut s = Subst::new();
        for (t, g) in a.args.iter().zip(ground) {
            match t {
                Term::Var(v) => match s.get(v) {
                    Some(Val::S(x)) if x != g => return None,
                    _ => {
                        s.insert(v.clone(), Val::S(g.clone()));
                    }
                },
                t => {
                    if t.constant().as_deref() != Some(g.as_str()) {
                        return None;
                    }
                }
            }
        }
        Some(s)
    }

    /// Whether the body of a time-point rule holds at `t` for some
    /// substitution extending the head binding.
    fn body_holds_at(&self, rule: &Rule, ground: &[String], t: Tick) -> bool {
        let (head_time, head_atom) = match &rule.head {
            Head::InitiatedAt { fluent, time } | Head::TerminatedAt { fluent, time } => (time, &fluent.fluent),
            Head::HappensAt { event, time } => (time, event),
            Head::HoldsFor { .. } => return false,
        };
        let Some(mut s) = Self::bind_head(head_atom, ground) else { return false };
        s.insert(head_time.clone(), Val::I(t));
        let (times, args) = Self::rule_vars(rule);
        let free: Vec<(String, bool)> = times
            .into_iter()
            .filter(|v| !s.contains_key(v))
            .map(|v| (v, true))
            .chain(args.into_iter().filter(|v| !s.contains_key(v)).map(|v| (v, false)))
            .collect();
        self.search(rule, &free, &mut s)
    }

    fn search(&self, rule: &Rule, free: &[(String, bool)], s: &mut Subst) -> bool {
        let Some(((v, is_time), rest)) = free.split_first() else {
            return rule.body.iter().all(|l| self.literal(l, s));
        };
        let candidates: Vec<Val> = if *is_time {
            (self.w.ws + 1..=self.w.qi).map(Val::I).collect()
        } else {
            self.constants.iter().cloned().map(Val::S).collect()
        };
        for c in candidates {
            s.insert(v.clone(), c);
            if self.search(rule, rest, s) {
                s.remove(v);
                return true;
            }
        }
        s.remove(v);
        false
    }

    /// Point set of a `holdsFor` rule on `[ws+1, qi]`.
    fn body_points(&self, rule: &Rule, ground: &[String]) -> BTreeSet<Tick> {
        let Head::HoldsFor { fluent, intervals } = &rule.head else { return BTreeSet::new() };
        let Some(s) = Self::bind_head(&fluent.fluent, ground) else { return BTreeSet::new() };
        let window: Vec<Tick> = (self.w.ws + 1..=self.w.qi).collect();
        let mut env: HashMap<&str, BTreeSet<Tick>> = HashMap::new();
        for lit in &rule.body {
            match lit {
                Literal::HoldsFor { fluent, intervals } => {
                    let set = match self.fkey(fluent, &s) {
                        Some(k) => window.iter().copied().filter(|&t| self.holds(&k, t)).collect(),
                        None => BTreeSet::new(),
                    };
                    env.insert(intervals, set);
                }
                Literal::UnionAll { inputs, output } => {
                    let set =
                        window.iter().copied().filter(|t| inputs.iter().any(|i| env[i.as_str()].contains(t))).collect();
                    env.insert(output, set);
                }
                Literal::IntersectAll { inputs, output } => {
                    let set =
                        window.iter().copied().filter(|t| inputs.iter().all(|i| env[i.as_str()].contains(t))).collect();
                    env.insert(output, set);
                }
                Literal::RelativeComplementAll { base, subtract, output } => {
                    let set = window
                        .iter()
                        .copied()
                        .filter(|t| {
                            env[base.as_str()].contains(t) && !subtract.iter().any(|i| env[i.as_str()].contains(t))
                        })
                        .collect();
                    env.insert(output, set);
                }
                Literal::Compare { .. } if !self.literal(lit, &s) => {
                    return BTreeSet::new();
                }
                _ => {}
            }
        }
        env.remove(intervals.as_str()).unwrap_or_default()
    }

    fn domain(&self, name: &str) -> Vec<String> {
        match self.ed.domain(name) {
            Some(DomainSpec::Listed(m)) => m.clone(),
            _ => self.w.entities.clone(),
        }
    }

    fn groundings(&self, name: &str) -> Vec<Vec<String>> {
        let Some(d) = self.ed.declaration(name) else { return Vec::new() };
        let mut out: Vec<Vec<String>> = match &d.grounding {
            None => vec![Vec::new()],
            Some(Grounding::Domain(dom)) => self.domain(dom).into_iter().map(|e| vec![e]).collect(),
            Some(Grounding::Pairs(dom)) => {
                let m = self.domain(dom);
                m.iter()
                    .flat_map(|a| m.iter().filter(move |b| *b != a).map(move |b| vec![a.clone(), b.clone()]))
                    .collect()
            }
            Some(Grounding::UnorderedPairs(dom)) => {
                let m = self.domain(dom);
                let mut v = Vec::new();
                for i in 0..m.len() {
                    for j in i + 1..m.len() {
                        let mut pair = vec![m[i].clone(), m[j].clone()];
                        pair.sort();
                        v.push(pair);
                    }
                }
                v
            }
        };
        for c in self.w.carried.iter().filter(|c| c.name == name) {
            if !out.contains(&c.args) {
                out.push(c.args.clone());
            }
        }
        out
    }

    fn values(&self, name: &str) -> Vec<String> {
        let mut vals: Vec<String> = Vec::new();
        for r in self.ed.rules.iter().filter(|r| r.head.name() == name) {
            if let Some(v) = r.head.fluent().and_then(|f| f.value.constant()) {
                if !vals.contains(&v) {
                    vals.push(v);
                }
            }
        }
        vals
    }

    fn carried(&self, name: &str, args: &[String], value: &str) -> Option<&SnapCarried> {
        self.w.carried.iter().find(|c| c.name == name && c.args == args && c.value == value)
    }

    fn simple(&mut self, name: &str) {
        let values = self.values(name);
        let window: Vec<Tick> = (self.w.ws + 1..=self.w.qi).collect();
        for g in self.groundings(name) {
            let rules_of = |kind: fn(&Head) -> bool, v: &str| -> Vec<&Rule> {
                self.ed
                    .rules
                    .iter()
                    .filter(|r| r.head.name() == name && kind(&r.head))
                    .filter(|r| r.head.fluent().and_then(|f| f.value.constant()).as_deref() == Some(v))
                    .collect()
            };
            let mut inits: Vec<Vec<Tick>> = Vec::new();
            let mut terms: Vec<Vec<Tick>> = Vec::new();
            for v in &values {
                let ir = rules_of(|h| matches!(h, Head::InitiatedAt { .. }), v);
                let tr = rules_of(|h| matches!(h, Head::TerminatedAt { .. }), v);
                inits.push(
                    window.iter().copied().filter(|&t| ir.iter().any(|r| self.body_holds_at(r, &g, t))).collect(),
                );
                terms.push(
                    window.iter().copied().filter(|&t| tr.iter().any(|r| self.body_holds_at(r, &g, t))).collect(),
                );
            }
            // At most one value may be initiated at a time point.
            for t in &window {
                let mut first = true;
                for v in inits.iter_mut() {
                    if v.contains(t) {
                        if !first {
                            v.retain(|x| x != t);
                        }
                        first = false;
                    }
                }
            }
            for (i, v) in values.iter().enumerate() {
                let carried = self.carried(name, &g, v);
                let mut starts = inits[i].clone();
                if let Some(c) = carried.filter(|c| c.kept) {
                    starts.push(c.interval.start - 1);
                }
                let mut breaks = terms[i].clone();
                for (j, other) in inits.iter().enumerate() {
                    if j != i {
                        breaks.extend(other);
                    }
                }
                let mut bits = vec![false; (self.hi - self.lo + 1) as usize];
                bits[0] = carried.is_some_and(|c| c.interval.contains(self.w.ws));
                for t in self.w.ws + 1..=self.hi {
                    bits[(t - self.lo) as usize] = algebra::inertia(&starts, &breaks, t);
                }
                if bits.iter().any(|b| *b) {
                    self.fluents.insert((name.to_string(), g.clone(), v.clone()), bits);
                }
            }
        }
    }

    fn sd(&mut self, name: &str) {
        let values = self.values(name);
        for g in self.groundings(name) {
            for v in &values {
                let mut pts: BTreeSet<Tick> = BTreeSet::new();
                for r in self.ed.rules.iter().filter(|r| r.head.name() == name) {
                    if r.head.fluent().and_then(|f| f.value.constant()).as_deref() == Some(v.as_str()) {
                        pts.extend(self.body_points(r, &g));
                    }
                }
                let mut bits = vec![false; (self.hi - self.lo + 1) as usize];
                bits[0] = self.carried(name, &g, v).is_some_and(|c| c.interval.contains(self.w.ws));
                for t in pts {
                    bits[(t - self.lo) as usize] = true;
                }
                if bits.iter().any(|b| *b) {
                    self.fluents.insert((name.to_string(), g.clone(), v.clone()), bits);
                }
            }
        }
    }

    fn derived(&mut self, name: &str) {
        for g in self.groundings(name) {
            let times: BTreeSet<Tick> = (self.w.ws + 1..=self.w.qi)
                .filter(|&t| {
                    self.ed.rules.iter().filter(|r| r.head.name() == name).any(|r| self.body_holds_at(r, &g, t))
                })
                .collect();
            if !times.is_empty() {
                self.events.insert((name.to_string(), g), times);
            }
        }
    }
}

/// Evaluates every composite item of a stratified description.
pub fn recognise(ed: &EventDescription, w: &World) -> Recognition {
    let (lo, hi) = (w.ws, w.qi + 1);
    let mut ev = Eval {
        ed,
        w,
        lo,
        hi,
        kinds: ed.declarations.iter().map(|d| (d.name.as_str(), d.kind)).collect(),
        input: HashMap::new(),
        events: HashMap::new(),
        fluents: HashMap::new(),
        constants: Vec::new(),
    };
    let mut constants: BTreeSet<String> = w.entities.iter().cloned().collect();
    for (k, (ivs, held)) in &w.durative {
        constants.extend(k.1.iter().cloned());
        let mut bits = vec![false; (hi - lo + 1) as usize];
        for t in lo..=hi {
            bits[(t - lo) as usize] = ivs.iter().any(|iv| iv.contains(t)) || (*held && t == w.ws);
        }
        ev.input.insert(k.clone(), bits);
    }
    for (n, a, t) in &w.events {
        constants.extend(a.iter().cloned());
        if *t > w.ws && *t <= w.qi {
            ev.events.entry((n.clone(), a.clone())).or_default().insert(*t);
        }
    }
    ev.constants = constants.into_iter().collect();
    for name in &ed.evaluation_order {
        match ev.kinds.get(name.as_str()) {
            Some(ItemKind::SimpleFluent) => ev.simple(name),
            Some(ItemKind::SdFluent) => ev.sd(name),
            Some(ItemKind::DerivedEvent) => ev.derived(name),
            _ => {}
        }
    }
    let fluents = ev
        .fluents
        .iter()
        .map(|(k, bits)| {
            (k.clone(), bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| lo + i as Tick).collect())
        })
        .collect();
    let events = ev
        .events
        .iter()
        .filter(|((n, _), _)| ev.kinds.get(n.as_str()) == Some(&ItemKind::DerivedEvent))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    Recognition {
        ws: w.ws,
        qi: w.qi,
        fluents,
        kinds: ed.declarations.iter().map(|d| (d.name.clone(), d.kind)).collect(),
        events,
    }
}

/// Compares one query result, produced in `asap` mode, with the oracle
/// run on the snapshot of the same query.
pub fn check_query(ed: &EventDescription, snap: &Snapshot, res: &RecognitionResult) -> Result<(), String> {
    let rec = recognise(ed, &World::from_snapshot(snap));
    let mut engine: BTreeMap<Key, Vec<Span>> = BTreeMap::new();
    for e in &res.entries {
        engine.entry((e.name.clone(), e.args.clone(), e.value.clone())).or_default().push(e.interval);
    }
    let keys: BTreeSet<Key> = engine.keys().cloned().chain(rec.fluents.keys().cloned()).collect();
    for key in keys {
        let hi = rec.horizon(&key.0);
        let ivs = engine.get(&key).cloned().unwrap_or_default();
        let mut got = Points::new();
        for iv in &ivs {
            let end = match iv.end {
                End::At(e) => {
                    if e > hi {
                        return Err(format!("q={}: {key:?} finite interval {iv} ends past {hi}", res.q));
                    }
                    e
                }
                End::Open => hi + 1,
            };
            got.extend(iv.start.max(snap.ws + 1)..end);
            if iv.start <= snap.ws {
                let c = snap.carried.iter().find(|c| (&c.name, &c.args, &c.value) == (&key.0, &key.1, &key.2));
                match c {
                    Some(c) if c.interval.start == iv.start => {}
                    _ => {
                        return Err(format!(
                            "q={}: {key:?} interval {iv} starts before the window without carried state {c:?}",
                            res.q
                        ))
                    }
                }
            }
        }
        let want = rec.window_points(&key);
        if got != want {
            return Err(format!(
                "q={} ws={}: {key:?}\n engine {:?}\n oracle {:?}",
                res.q,
                snap.ws,
                algebra::runs(&got),
                algebra::runs(&want)
            ));
        }
    }
    Ok(())
}

/// Compares the input content resident at a query with the net content of
/// the records that have arrived by then, cut to the window.
pub fn check_content(records: &[InputRecord], snap: &Snapshot) -> Result<(), String> {
    let arrived: Vec<InputRecord> =
        records.iter().filter(|r| r.effective_arrival().is_some_and(|a| a <= snap.q)).cloned().collect();
    let net = World::batch(&arrived, snap.q);
    let ws = snap.ws;

    let mut want_events: Vec<_> = net.events.into_iter().filter(|e| e.2 > ws).collect();
    let mut got_events = snap.events.clone();
    want_events.sort();
    got_events.sort();
    if want_events != got_events {
        return Err(format!(
            "q={}: events
 store {got_events:?}
 net {want_events:?}",
            snap.q
        ));
    }

    type Content = BTreeMap<Key, (Spans, bool)>;
    let keep = |m: &mut Content| m.retain(|_, (l, held)| !l.is_empty() || *held);
    let mut want: Content = net
        .durative
        .into_iter()
        .map(|(k, (ivs, _))| {
            let held = ivs.iter().any(|iv| iv.contains(ws));
            let list = Spans::normalize(ivs).expect("net intervals are well formed").restrict(ws + 1, Tick::MAX);
            (k, (list, held))
        })
        .collect();
    let mut got: Content = snap
        .durative
        .iter()
        .map(|d| {
            let list = Spans::normalize(d.intervals.iter().copied()).expect("resident intervals are well formed");
            ((d.name.clone(), d.args.clone(), d.value.clone()), (list, d.held_at_boundary))
        })
        .collect();
    keep(&mut want);
    keep(&mut got);
    if want != got {
        return Err(format!(
            "q={}: durative content
 store {got:?}
 net {want:?}",
            snap.q
        ));
    }
    Ok(())
}

/// Finite maximal intervals of a batch evaluation, per fluent-value.
pub fn batch_finals(ed: &EventDescription, records: &[InputRecord], horizon: Tick) -> BTreeMap<Key, Vec<Span>> {
    let rec = recognise(ed, &World::batch(records, horizon));
    let mut out = BTreeMap::new();
    for key in rec.fluents.keys() {
        let finite: Vec<Span> = rec.list(key).iter().filter(|iv| !iv.end.is_open()).copied().collect();
        if !finite.is_empty() {
            out.insert(key.clone(), finite);
        }
    }
    out
}
