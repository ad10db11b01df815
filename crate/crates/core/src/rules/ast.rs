//! Syntax tree of an event description.

use std::collections::BTreeMap;
use std::fmt;

/// Source position, 1-based.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
    Int(i64),
}

impl Term {
    pub fn var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    /// Ground text of a constant term.
    pub fn constant(&self) -> Option<String> {
        match self {
            Term::Var(_) => None,
            Term::Const(c) => Some(c.clone()),
            Term::Int(i) => Some(i.to_string()),
        }
    }
}

/// `name(arg, ...)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub name: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(Term::var)
    }
}

/// `F = V`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FluentTerm {
    pub fluent: Atom,
    pub value: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EventTerm {
    Plain(Atom),
    /// Built-in event at each starting point of `F = V`.
    Start(FluentTerm),
    /// Built-in event at each ending point of `F = V`.
    End(FluentTerm),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn eval<O: Ord>(self, a: O, b: O) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Literal {
    HappensAt { event: EventTerm, time: Term },
    HoldsAt { fluent: FluentTerm, time: Term },
    HoldsFor { fluent: FluentTerm, intervals: String },
    UnionAll { inputs: Vec<String>, output: String },
    IntersectAll { inputs: Vec<String>, output: String },
    RelativeComplementAll { base: String, subtract: Vec<String>, output: String },
    Compare { lhs: Term, op: CmpOp, rhs: Term },
}

impl Literal {
    pub fn is_interval_literal(&self) -> bool {
        matches!(
            self,
            Literal::HoldsFor { .. }
                | Literal::UnionAll { .. }
                | Literal::IntersectAll { .. }
                | Literal::RelativeComplementAll { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    InitiatedAt,
    TerminatedAt,
    HappensAt,
    HoldsFor,
}

impl RuleKind {
    pub fn keyword(self) -> &'static str {
        match self {
            RuleKind::InitiatedAt => "initiatedAt",
            RuleKind::TerminatedAt => "terminatedAt",
            RuleKind::HappensAt => "happensAt",
            RuleKind::HoldsFor => "holdsFor",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Head {
    InitiatedAt { fluent: FluentTerm, time: String },
    TerminatedAt { fluent: FluentTerm, time: String },
    HappensAt { event: Atom, time: String },
    HoldsFor { fluent: FluentTerm, intervals: String },
}

impl Head {
    pub fn kind(&self) -> RuleKind {
        match self {
            Head::InitiatedAt { .. } => RuleKind::InitiatedAt,
            Head::TerminatedAt { .. } => RuleKind::TerminatedAt,
            Head::HappensAt { .. } => RuleKind::HappensAt,
            Head::HoldsFor { .. } => RuleKind::HoldsFor,
        }
    }

    /// Name of the defined fluent or event.
    pub fn name(&self) -> &str {
        match self {
            Head::InitiatedAt { fluent, .. } | Head::TerminatedAt { fluent, .. } | Head::HoldsFor { fluent, .. } => {
                &fluent.fluent.name
            }
            Head::HappensAt { event, .. } => &event.name,
        }
    }

    pub fn atom(&self) -> &Atom {
        match self {
            Head::InitiatedAt { fluent, .. } | Head::TerminatedAt { fluent, .. } | Head::HoldsFor { fluent, .. } => {
                &fluent.fluent
            }
            Head::HappensAt { event, .. } => event,
        }
    }

    pub fn fluent(&self) -> Option<&FluentTerm> {
        match self {
            Head::InitiatedAt { fluent, .. } | Head::TerminatedAt { fluent, .. } | Head::HoldsFor { fluent, .. } => {
                Some(fluent)
            }
            Head::HappensAt { .. } => None,
        }
    }
}

/// One clause. Equality ignores the source position.
#[derive(Debug, Clone, Eq)]
pub struct Rule {
    pub head: Head,
    pub body: Vec<Literal>,
    pub pos: Pos,
}

impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.head == other.head && self.body == other.body
    }
}

impl Rule {
    pub fn kind(&self) -> RuleKind {
        self.head.kind()
    }
}

/// `G = V iff (A = V1 or B = V2), ..., not C = V3`, before expansion.
#[derive(Debug, Clone, Eq)]
pub struct IffDefinition {
    pub head: FluentTerm,
    /// Conjunction of disjunction groups; a plain conjunct is a group of one.
    pub groups: Vec<Vec<FluentTerm>>,
    pub negated: Vec<FluentTerm>,
    pub pos: Pos,
}

impl PartialEq for IffDefinition {
    fn eq(&self, other: &Self) -> bool {
        self.head == other.head && self.groups == other.groups && self.negated == other.negated
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ItemKind {
    InputEvent,
    InputFluent,
    SimpleFluent,
    SdFluent,
    /// Event defined by `happensAt` rules.
    DerivedEvent,
}

impl ItemKind {
    pub fn is_fluent(self) -> bool {
        matches!(self, ItemKind::InputFluent | ItemKind::SimpleFluent | ItemKind::SdFluent)
    }

    pub fn is_input(self) -> bool {
        matches!(self, ItemKind::InputEvent | ItemKind::InputFluent)
    }
}

/// How a composite item is grounded.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Grounding {
    /// One argument drawn from a domain.
    Domain(String),
    /// Ordered pairs of distinct domain members.
    Pairs(String),
    /// Unordered pairs of distinct members, each written with the
    /// lexicographically smaller name first.
    UnorderedPairs(String),
}

impl Grounding {
    pub fn domain(&self) -> &str {
        match self {
            Grounding::Domain(d) | Grounding::Pairs(d) | Grounding::UnorderedPairs(d) => d,
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Grounding::Domain(_) => 1,
            Grounding::Pairs(_) | Grounding::UnorderedPairs(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Eq)]
pub struct Declaration {
    pub kind: ItemKind,
    pub name: String,
    pub arity: usize,
    pub grounding: Option<Grounding>,
    pub pos: Pos,
}

impl PartialEq for Declaration {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.name == other.name
            && self.arity == other.arity
            && self.grounding == other.grounding
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainSpec {
    Listed(Vec<String>),
    /// Filled from the entity constants observed in the input stream.
    FromInput,
}

/// Key of the level function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LevelKey {
    Event(String),
    FluentValue(String, String),
}

impl fmt::Display for LevelKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelKey::Event(e) => f.write_str(e),
            LevelKey::FluentValue(n, v) => write!(f, "{n}={v}"),
        }
    }
}

/// A parsed rule set with its declarations. `levels` and
/// `evaluation_order` are empty until [`crate::rules::stratify`] runs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventDescription {
    pub declarations: Vec<Declaration>,
    pub domains: Vec<(String, DomainSpec)>,
    pub rules: Vec<Rule>,
    pub iff_definitions: Vec<IffDefinition>,
    pub levels: BTreeMap<LevelKey, u32>,
    /// Composite item names, dependencies first.
    pub evaluation_order: Vec<String>,
    pub warnings: Vec<String>,
}

impl EventDescription {
    pub fn declaration(&self, name: &str) -> Option<&Declaration> {
        self.declarations.iter().find(|d| d.name == name)
    }

    pub fn kind_of(&self, name: &str) -> Option<ItemKind> {
        self.declaration(name).map(|d| d.kind)
    }

    pub fn domain(&self, name: &str) -> Option<&DomainSpec> {
        self.domains.iter().find(|(n, _)| n == name).map(|(_, d)| d)
    }

    pub fn rules_for<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Rule> + 'a {
        self.rules.iter().filter(move |r| r.head.name() == name)
    }

    pub fn level(&self, key: &LevelKey) -> Option<u32> {
        self.levels.get(key).copied()
    }

    /// Replaces (or adds) a domain with explicit members.
    pub fn set_domain(&mut self, name: &str, members: Vec<String>) {
        match self.domains.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = DomainSpec::Listed(members),
            None => self.domains.push((name.to_string(), DomainSpec::Listed(members))),
        }
    }

    /// Domains that are filled from the input stream.
    pub fn input_domains(&self) -> Vec<String> {
        self.domains.iter().filter(|(_, d)| matches!(d, DomainSpec::FromInput)).map(|(n, _)| n.clone()).collect()
    }
}
