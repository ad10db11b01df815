//! The rule language: parsing, printing, shorthand expansion, validation
//! and stratification.

mod ast;
mod expand;
mod parse;
mod print;
mod stratify;
mod validate;

use std::fmt;

pub use ast::*;
pub use expand::{expand, expand_iff};
pub use parse::parse;
pub use stratify::stratify;
pub use validate::{validate, Diagnostic};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownPredicate(String),
    Undeclared(String),
    ArityMismatch { name: String, expected: usize, found: usize },
    KindMismatch { name: String, declared: &'static str, used: &'static str },
    UnsupportedShorthand(String),
    DuplicateDeclaration(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::UnknownPredicate(p) => write!(f, "unknown predicate `{p}`"),
            ParseErrorKind::Undeclared(n) => write!(f, "`{n}` is not declared"),
            ParseErrorKind::ArityMismatch { name, expected, found } => {
                write!(f, "`{name}` is declared with arity {expected} but used with {found} arguments")
            }
            ParseErrorKind::KindMismatch { name, declared, used } => {
                write!(f, "`{name}` is declared as {declared} but used as {used}")
            }
            ParseErrorKind::UnsupportedShorthand(m) => write!(f, "unsupported shorthand: {m}"),
            ParseErrorKind::DuplicateDeclaration(n) => write!(f, "`{n}` is declared twice"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(pos: Pos, kind: ParseErrorKind) -> Self {
        ParseError { pos, kind }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("event description is not hierarchical: {}", cycle.join(" -> "))]
    NonHierarchical { cycle: Vec<String> },
    #[error("unsupported shorthand: {0}")]
    UnsupportedShorthand(String),
    #[error("invalid event description:\n{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
}

/// Parses, expands shorthands, validates and stratifies.
pub fn load(text: &str) -> Result<EventDescription, RuleError> {
    let ed = expand(parse(text)?)?;
    let diags = validate(&ed);
    if !diags.is_empty() {
        return Err(RuleError::Invalid(diags));
    }
    stratify(ed)
}
