//! Rules lowered to interned, slot-indexed form.

use std::collections::HashMap;

use smallvec::SmallVec;

use super::intern::{Interner, Sym};
use crate::rules::{
    Atom, CmpOp, DomainSpec, EventDescription, EventTerm, FluentTerm, Grounding, Head, ItemKind, Literal, RuleKind,
    Term,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum CTerm {
    Var(u16),
    Sym(Sym),
    Int(i64),
}

#[derive(Debug, Clone)]
pub(crate) struct CAtom {
    pub name: Sym,
    pub args: SmallVec<[CTerm; 3]>,
}

#[derive(Debug, Clone)]
pub(crate) struct CFluent {
    pub atom: CAtom,
    pub value: Sym,
}

#[derive(Debug, Clone)]
pub(crate) enum CEvent {
    Plain(CAtom),
    Start(CFluent),
    End(CFluent),
}

#[derive(Debug, Clone)]
pub(crate) enum CLit {
    HappensAt { event: CEvent, time: CTerm },
    HoldsAt { fluent: CFluent, time: CTerm },
    HoldsFor { fluent: CFluent, out: u16 },
    Union { inputs: Vec<u16>, out: u16 },
    Intersect { inputs: Vec<u16>, out: u16 },
    Complement { base: u16, subtract: Vec<u16>, out: u16 },
    Compare { lhs: CTerm, op: CmpOp, rhs: CTerm },
}

#[derive(Debug, Clone)]
pub(crate) struct CRule {
    pub kind: RuleKind,
    pub head_args: SmallVec<[CTerm; 3]>,
    /// Value index for fluent heads.
    pub value: usize,
    /// Head time variable, or head interval variable for `holdsFor`.
    pub head_var: u16,
    pub body: Vec<CLit>,
    pub n_vars: usize,
    pub n_ivars: usize,
    pub text: String,
}

#[derive(Debug, Clone)]
pub(crate) struct CItem {
    pub name: Sym,
    pub kind: ItemKind,
    pub arity: usize,
    pub grounding: Option<Grounding>,
    /// Values in order of first appearance in rule heads.
    pub values: Vec<Sym>,
    pub rules: Vec<CRule>,
    /// Some other composite item reads this one.
    pub is_dependency: bool,
}

#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    /// Composite items in evaluation order.
    pub items: Vec<CItem>,
    pub kinds: HashMap<Sym, ItemKind>,
    pub domains: HashMap<String, DomainSpec>,
}

struct Scope {
    vars: HashMap<String, u16>,
    ivars: HashMap<String, u16>,
}

impl Scope {
    fn var(&mut self, v: &str) -> u16 {
        let n = self.vars.len() as u16;
        *self.vars.entry(v.to_string()).or_insert(n)
    }

    fn ivar(&mut self, v: &str) -> u16 {
        let n = self.ivars.len() as u16;
        *self.ivars.entry(v.to_string()).or_insert(n)
    }
}

fn term(t: &Term, scope: &mut Scope, int: &mut Interner, in_args: bool) -> CTerm {
    match t {
        Term::Var(v) => CTerm::Var(scope.var(v)),
        Term::Const(c) => CTerm::Sym(int.intern(c)),
        Term::Int(i) if in_args => CTerm::Sym(int.intern(&i.to_string())),
        Term::Int(i) => CTerm::Int(*i),
    }
}

fn atom(a: &Atom, scope: &mut Scope, int: &mut Interner) -> CAtom {
    CAtom { name: int.intern(&a.name), args: a.args.iter().map(|t| term(t, scope, int, true)).collect() }
}

fn fluent(f: &FluentTerm, scope: &mut Scope, int: &mut Interner) -> CFluent {
    let value = int.intern(&f.value.constant().unwrap_or_default());
    CFluent { atom: atom(&f.fluent, scope, int), value }
}

pub(crate) fn compile(ed: &EventDescription, int: &mut Interner) -> Compiled {
    let kinds: HashMap<Sym, ItemKind> = ed.declarations.iter().map(|d| (int.intern(&d.name), d.kind)).collect();
    let mut items: Vec<CItem> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for name in &ed.evaluation_order {
        let Some(d) = ed.declaration(name) else { continue };
        index.insert(name.clone(), items.len());
        items.push(CItem {
            name: int.intern(name),
            kind: d.kind,
            arity: d.arity,
            grounding: d.grounding.clone(),
            values: Vec::new(),
            rules: Vec::new(),
            is_dependency: false,
        });
    }

    for r in &ed.rules {
        let Some(&at) = index.get(r.head.name()) else { continue };
        let mut scope = Scope { vars: HashMap::new(), ivars: HashMap::new() };
        let head_args = r.head.atom().args.iter().map(|t| term(t, &mut scope, int, true)).collect();
        let (value, head_var) = match &r.head {
            Head::InitiatedAt { fluent, time } | Head::TerminatedAt { fluent, time } => {
                (Some(fluent.value.clone()), scope.var(time))
            }
            Head::HoldsFor { fluent, intervals } => (Some(fluent.value.clone()), scope.ivar(intervals)),
            Head::HappensAt { time, .. } => (None, scope.var(time)),
        };
        let value = match value.and_then(|v| v.constant()) {
            Some(v) => {
                let sym = int.intern(&v);
                let item = &mut items[at];
                match item.values.iter().position(|x| *x == sym) {
                    Some(p) => p,
                    None => {
                        item.values.push(sym);
                        item.values.len() - 1
                    }
                }
            }
            None => 0,
        };
        let body = r
            .body
            .iter()
            .map(|lit| match lit {
                Literal::HappensAt { event, time } => {
                    let event = match event {
                        EventTerm::Plain(a) => CEvent::Plain(atom(a, &mut scope, int)),
                        EventTerm::Start(f) => CEvent::Start(fluent(f, &mut scope, int)),
                        EventTerm::End(f) => CEvent::End(fluent(f, &mut scope, int)),
                    };
                    CLit::HappensAt { event, time: term(time, &mut scope, int, false) }
                }
                Literal::HoldsAt { fluent: f, time } => {
                    CLit::HoldsAt { fluent: fluent(f, &mut scope, int), time: term(time, &mut scope, int, false) }
                }
                Literal::HoldsFor { fluent: f, intervals } => {
                    CLit::HoldsFor { fluent: fluent(f, &mut scope, int), out: scope.ivar(intervals) }
                }
                Literal::UnionAll { inputs, output } => {
                    CLit::Union { inputs: inputs.iter().map(|v| scope.ivar(v)).collect(), out: scope.ivar(output) }
                }
                Literal::IntersectAll { inputs, output } => {
                    CLit::Intersect { inputs: inputs.iter().map(|v| scope.ivar(v)).collect(), out: scope.ivar(output) }
                }
                Literal::RelativeComplementAll { base, subtract, output } => CLit::Complement {
                    base: scope.ivar(base),
                    subtract: subtract.iter().map(|v| scope.ivar(v)).collect(),
                    out: scope.ivar(output),
                },
                Literal::Compare { lhs, op, rhs } => CLit::Compare {
                    lhs: term(lhs, &mut scope, int, false),
                    op: *op,
                    rhs: term(rhs, &mut scope, int, false),
                },
            })
            .collect();
        items[at].rules.push(CRule {
            kind: r.kind(),
            head_args,
            value,
            head_var,
            body,
            n_vars: scope.vars.len(),
            n_ivars: scope.ivars.len(),
            text: r.to_string(),
        });
    }

    // Items read by other composite items.
    let names: Vec<Sym> = items.iter().map(|i| i.name).collect();
    for i in 0..items.len() {
        let mut reads: Vec<Sym> = Vec::new();
        for r in &items[i].rules {
            for lit in &r.body {
                match lit {
                    CLit::HappensAt { event: CEvent::Plain(a), .. } => reads.push(a.name),
                    CLit::HappensAt { event: CEvent::Start(f) | CEvent::End(f), .. }
                    | CLit::HoldsAt { fluent: f, .. }
                    | CLit::HoldsFor { fluent: f, .. } => reads.push(f.atom.name),
                    _ => {}
                }
            }
        }
        for n in reads {
            if let Some(j) = names.iter().position(|x| *x == n) {
                items[j].is_dependency = true;
            }
        }
    }

    Compiled { items, kinds, domains: ed.domains.iter().cloned().collect() }
}
