//! Rule-body evaluation within one window.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::rc::Rc;

use smallvec::SmallVec;

use super::compile::{CAtom, CEvent, CFluent, CItem, CLit, CRule, CTerm};
use super::intern::{Interner, Sym};
use super::store::{Args, FKey, SdeStore};
use super::EngineError;
use crate::interval::{amalgamate, intersect_all, make_intervals, relative_complement_all, union_all, IntervalList};
use crate::rules::{CmpOp, ItemKind, RuleKind};
use crate::{Spans, Tick};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Val {
    Sym(Sym),
    Int(i64),
}

type Bindings = SmallVec<[Option<Val>; 8]>;

/// Composite results computed so far in the current query.
#[derive(Debug, Default)]
pub(crate) struct Current {
    pub lists: HashMap<FKey, Rc<Spans>>,
    pub events: HashMap<Sym, Vec<(Args, Vec<Tick>)>>,
}

pub(crate) struct Ctx<'a> {
    pub ws: Tick,
    pub qi: Tick,
    pub store: &'a SdeStore,
    pub kinds: &'a HashMap<Sym, ItemKind>,
    pub interner: &'a Interner,
    pub cur: Current,
    views: RefCell<HashMap<FKey, Rc<Spans>>>,
    empty: Rc<Spans>,
}

impl<'a> Ctx<'a> {
    pub fn new(
        ws: Tick,
        qi: Tick,
        store: &'a SdeStore,
        kinds: &'a HashMap<Sym, ItemKind>,
        interner: &'a Interner,
    ) -> Self {
        Ctx { ws, qi, store, kinds, interner, cur: Current::default(), views: RefCell::default(), empty: Rc::default() }
    }

    /// Intervals of a grounded fluent-value. Input fluents carry the boundary
    /// marker; composite fluents include their pre-window part.
    pub fn list(&self, key: &FKey) -> Rc<Spans> {
        if self.kinds.get(&key.name) == Some(&ItemKind::InputFluent) {
            if let Some(v) = self.views.borrow().get(key) {
                return v.clone();
            }
            let Some(d) = self.store.durative.get(key) else {
                return self.empty.clone();
            };
            let v = Rc::new(self.store.view(d, self.ws, self.qi));
            self.views.borrow_mut().insert(key.clone(), v.clone());
            v
        } else {
            self.cur.lists.get(key).cloned().unwrap_or_else(|| self.empty.clone())
        }
    }

    fn resolve(&self, t: &CTerm, b: &Bindings) -> Option<Val> {
        match t {
            CTerm::Var(v) => b[*v as usize],
            CTerm::Sym(s) => Some(Val::Sym(*s)),
            CTerm::Int(i) => Some(Val::Int(*i)),
        }
    }

    fn resolve_sym(&self, t: &CTerm, b: &Bindings) -> Option<Sym> {
        match self.resolve(t, b)? {
            Val::Sym(s) => Some(s),
            Val::Int(_) => None,
        }
    }

    fn resolve_time(&self, t: &CTerm, b: &Bindings) -> Option<Tick> {
        match self.resolve(t, b)? {
            Val::Int(i) => Some(i),
            Val::Sym(s) => self.interner.resolve(s).parse().ok(),
        }
    }

    fn fluent_key(&self, f: &CFluent, b: &Bindings) -> Option<FKey> {
        let args = f.atom.args.iter().map(|t| self.resolve_sym(t, b)).collect::<Option<Args>>()?;
        Some(FKey { name: f.atom.name, args, value: f.value })
    }

    /// Binds atom arguments against ground ones; false on mismatch.
    fn unify(&self, atom: &CAtom, args: &[Sym], b: &mut Bindings) -> bool {
        if atom.args.len() != args.len() {
            return false;
        }
        for (t, &a) in atom.args.iter().zip(args) {
            match t {
                CTerm::Var(v) => match b[*v as usize] {
                    None => b[*v as usize] = Some(Val::Sym(a)),
                    Some(Val::Sym(s)) if s == a => {}
                    Some(_) => return false,
                },
                CTerm::Sym(s) if *s == a => {}
                _ => return false,
            }
        }
        true
    }

    fn compare(&self, l: Val, op: CmpOp, r: Val) -> bool {
        let num = |v: Val| match v {
            Val::Int(i) => Some(i),
            Val::Sym(s) => self.interner.resolve(s).parse::<i64>().ok(),
        };
        let ord: Option<Ordering> = match (l, r) {
            (Val::Sym(a), Val::Sym(b)) if a == b => Some(Ordering::Equal),
            _ => match (num(l), num(r)) {
                (Some(a), Some(b)) => Some(a.cmp(&b)),
                _ => match (l, r) {
                    (Val::Sym(a), Val::Sym(b)) => Some(self.interner.resolve(a).cmp(self.interner.resolve(b))),
                    _ => None,
                },
            },
        };
        match ord {
            Some(o) => op.eval(o, Ordering::Equal),
            None => op == CmpOp::Ne,
        }
    }

    fn bind_time(&self, time: &CTerm, t: Tick, b: &mut Bindings) -> bool {
        match time {
            CTerm::Var(v) => match b[*v as usize] {
                None => {
                    b[*v as usize] = Some(Val::Int(t));
                    true
                }
                Some(_) => self.resolve_time(time, b) == Some(t),
            },
            _ => self.resolve_time(time, b) == Some(t),
        }
    }

    /// Every time point in the window at which the body of a time-point rule
    /// holds with the given head arguments.
    pub fn rule_times(&self, rule: &CRule, head: &[Sym]) -> Vec<Tick> {
        let mut b: Bindings = SmallVec::from_elem(None, rule.n_vars);
        for (t, &a) in rule.head_args.iter().zip(head) {
            match t {
                CTerm::Var(v) => match b[*v as usize] {
                    None => b[*v as usize] = Some(Val::Sym(a)),
                    Some(Val::Sym(s)) if s == a => {}
                    Some(_) => return Vec::new(),
                },
                CTerm::Sym(s) if *s == a => {}
                _ => return Vec::new(),
            }
        }
        let mut out = Vec::new();
        self.solve(&rule.body, rule.head_var, &mut b, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn solve(&self, lits: &[CLit], head_var: u16, b: &mut Bindings, out: &mut Vec<Tick>) {
        let Some((lit, rest)) = lits.split_first() else {
            if let Some(Val::Int(t)) = b[head_var as usize] {
                if t > self.ws && t <= self.qi {
                    out.push(t);
                }
            }
            return;
        };
        match lit {
            CLit::HappensAt { event: CEvent::Plain(atom), time } => {
                let fixed = self.resolve_time(time, b);
                match self.kinds.get(&atom.name) {
                    Some(ItemKind::InputEvent) => {
                        let Some(by_first) = self.store.events.get(&atom.name) else { return };
                        let first = match atom.args.first() {
                            None => Some(None),
                            Some(t) => self.resolve_sym(t, b).map(Some),
                        };
                        let groups: Vec<&Vec<super::store::EventOcc>> = match first {
                            Some(k) => by_first.get(&k).into_iter().collect(),
                            None => by_first.values().collect(),
                        };
                        for occs in groups {
                            let (lo, hi) = match fixed {
                                Some(t) => (t - 1, t),
                                None => (self.ws, self.qi),
                            };
                            for occ in SdeStore::events_in(occs, lo.max(self.ws), hi.min(self.qi)) {
                                let saved = b.clone();
                                if self.unify(atom, &occ.args, b) && self.bind_time(time, occ.t, b) {
                                    self.solve(rest, head_var, b, out);
                                }
                                *b = saved;
                            }
                        }
                    }
                    Some(ItemKind::DerivedEvent) => {
                        let Some(groundings) = self.cur.events.get(&atom.name) else { return };
                        for (args, times) in groundings {
                            for &t in times {
                                if fixed.is_some_and(|f| f != t) {
                                    continue;
                                }
                                let saved = b.clone();
                                if self.unify(atom, args, b) && self.bind_time(time, t, b) {
                                    self.solve(rest, head_var, b, out);
                                }
                                *b = saved;
                            }
                        }
                    }
                    _ => {}
                }
            }
            CLit::HappensAt { event: CEvent::Start(f) | CEvent::End(f), time } => {
                let Some(key) = self.fluent_key(f, b) else { return };
                let list = self.list(&key);
                let is_start = matches!(lit, CLit::HappensAt { event: CEvent::Start(_), .. });
                let points: Vec<Tick> = if is_start {
                    list.starts_within(self.ws + 1, self.qi).collect()
                } else {
                    list.ends_within(self.ws + 1, self.qi).collect()
                };
                for t in points {
                    let saved = b.clone();
                    if self.bind_time(time, t, b) {
                        self.solve(rest, head_var, b, out);
                    }
                    *b = saved;
                }
            }
            CLit::HoldsAt { fluent, time } => {
                let (Some(t), Some(key)) = (self.resolve_time(time, b), self.fluent_key(fluent, b)) else { return };
                if self.list(&key).holds_at(t) {
                    self.solve(rest, head_var, b, out);
                }
            }
            CLit::Compare { lhs, op, rhs } => {
                let (Some(l), Some(r)) = (self.resolve(lhs, b), self.resolve(rhs, b)) else { return };
                if self.compare(l, *op, r) {
                    self.solve(rest, head_var, b, out);
                }
            }
            CLit::HoldsFor { .. } | CLit::Union { .. } | CLit::Intersect { .. } | CLit::Complement { .. } => {}
        }
    }

    /// Fresh intervals of a `holdsFor` rule inside `[ws+1, qi]`.
    pub fn rule_intervals(&self, rule: &CRule, head: &[Sym]) -> Result<Spans, EngineError> {
        let mut b: Bindings = SmallVec::from_elem(None, rule.n_vars);
        for (t, &a) in rule.head_args.iter().zip(head) {
            match t {
                CTerm::Var(v) => b[*v as usize] = Some(Val::Sym(a)),
                CTerm::Sym(s) if *s == a => {}
                _ => return Ok(IntervalList::new()),
            }
        }
        let unbound = || EngineError::Evaluation(format!("unbound interval variable in\n{}", rule.text));
        let mut env: Vec<Option<Spans>> = vec![None; rule.n_ivars];
        let get = |env: &Vec<Option<Spans>>, v: u16| env[v as usize].clone().ok_or_else(unbound);
        for lit in &rule.body {
            match lit {
                CLit::HoldsFor { fluent, out } => {
                    let key = self.fluent_key(fluent, &b).ok_or_else(unbound)?;
                    env[*out as usize] = Some(self.list(&key).restrict(self.ws + 1, self.qi));
                }
                CLit::Union { inputs, out } => {
                    let ls = inputs.iter().map(|v| get(&env, *v)).collect::<Result<Vec<_>, _>>()?;
                    env[*out as usize] = Some(union_all(&ls));
                }
                CLit::Intersect { inputs, out } => {
                    let ls = inputs.iter().map(|v| get(&env, *v)).collect::<Result<Vec<_>, _>>()?;
                    env[*out as usize] = Some(intersect_all(&ls)?);
                }
                CLit::Complement { base, subtract, out } => {
                    let base = get(&env, *base)?;
                    let ls = subtract.iter().map(|v| get(&env, *v)).collect::<Result<Vec<_>, _>>()?;
                    env[*out as usize] = Some(relative_complement_all(&base, &ls));
                }
                CLit::Compare { lhs, op, rhs } => {
                    let (Some(l), Some(r)) = (self.resolve(lhs, &b), self.resolve(rhs, &b)) else {
                        return Ok(IntervalList::new());
                    };
                    if !self.compare(l, *op, r) {
                        return Ok(IntervalList::new());
                    }
                }
                CLit::HappensAt { .. } | CLit::HoldsAt { .. } => {}
            }
        }
        get(&env, rule.head_var)
    }

    /// Lists of every value of a simple fluent grounding. `kept[v]` is the
    /// retained initiation point of value `v` from before the window.
    pub fn simple_fluent(
        &self,
        item: &CItem,
        head: &[Sym],
        kept: &[Option<Tick>],
        conflicts: &mut Vec<(Tick, Sym, Sym)>,
    ) -> Result<Vec<Spans>, EngineError> {
        let n = item.values.len();
        let mut inits: Vec<Vec<Tick>> = vec![Vec::new(); n];
        let mut terms: Vec<Vec<Tick>> = vec![Vec::new(); n];
        for r in &item.rules {
            let times = self.rule_times(r, head);
            match r.kind {
                RuleKind::InitiatedAt => inits[r.value].extend(times),
                RuleKind::TerminatedAt => terms[r.value].extend(times),
                _ => {}
            }
        }
        for v in inits.iter_mut().chain(terms.iter_mut()) {
            v.sort_unstable();
            v.dedup();
        }
        // Simultaneous initiations: the earliest-declared value wins.
        if n > 1 {
            for v in 0..n {
                for w in v + 1..n {
                    let clash: Vec<Tick> =
                        inits[w].iter().copied().filter(|t| inits[v].binary_search(t).is_ok()).collect();
                    if !clash.is_empty() {
                        for &t in &clash {
                            conflicts.push((t, item.values[v], item.values[w]));
                        }
                        inits[w].retain(|t| clash.binary_search(t).is_err());
                    }
                }
            }
        }
        let mut out = Vec::with_capacity(n);
        for v in 0..n {
            let mut starts: Vec<Tick> = kept[v].into_iter().chain(inits[v].iter().copied()).collect();
            starts.sort_unstable();
            starts.dedup();
            let mut breaks: Vec<Tick> = terms[v].clone();
            for (w, other) in inits.iter().enumerate() {
                if w != v {
                    breaks.extend(other);
                }
            }
            breaks.sort_unstable();
            breaks.dedup();
            out.push(make_intervals(&starts, &breaks, self.qi)?);
        }
        Ok(out)
    }

    /// Lists of every value of a statically determined fluent grounding,
    /// amalgamated with the retained prefix of each value.
    pub fn sd_fluent(&self, item: &CItem, head: &[Sym], prefix: &[Option<Spans>]) -> Result<Vec<Spans>, EngineError> {
        let mut fresh: Vec<Vec<Spans>> = vec![Vec::new(); item.values.len()];
        for r in &item.rules {
            if r.kind == RuleKind::HoldsFor {
                fresh[r.value].push(self.rule_intervals(r, head)?);
            }
        }
        fresh
            .into_iter()
            .enumerate()
            .map(|(v, lists)| {
                let fresh = union_all(&lists);
                match &prefix[v] {
                    Some(p) => Ok(amalgamate(p, &fresh)?),
                    None => Ok(fresh),
                }
            })
            .collect()
    }

    /// Occurrence times of a derived event grounding.
    pub fn derived_event(&self, item: &CItem, head: &[Sym]) -> Vec<Tick> {
        let mut times: Vec<Tick> = item.rules.iter().flat_map(|r| self.rule_times(r, head)).collect();
        times.sort_unstable();
        times.dedup();
        times
    }
}
