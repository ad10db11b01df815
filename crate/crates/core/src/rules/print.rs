//! Pretty printer. The output parses back to an equal description.

use std::fmt::{self, Display, Formatter};

use super::ast::*;

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Const(v) => f.write_str(v),
            Term::Int(i) => write!(f, "{i}"),
        }
    }
}

fn comma_sep<T: Display>(f: &mut Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{it}")?;
    }
    Ok(())
}

impl Display for Atom {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            comma_sep(f, &self.args)?;
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl Display for FluentTerm {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.fluent, self.value)
    }
}

impl Display for EventTerm {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            EventTerm::Plain(a) => write!(f, "{a}"),
            EventTerm::Start(ft) => write!(f, "start({ft})"),
            EventTerm::End(ft) => write!(f, "end({ft})"),
        }
    }
}

impl Display for Literal {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Literal::HappensAt { event, time } => write!(f, "happensAt({event}, {time})"),
            Literal::HoldsAt { fluent, time } => write!(f, "holdsAt({fluent}, {time})"),
            Literal::HoldsFor { fluent, intervals } => write!(f, "holdsFor({fluent}, {intervals})"),
            Literal::UnionAll { inputs, output } => {
                f.write_str("union_all([")?;
                comma_sep(f, inputs)?;
                write!(f, "], {output})")
            }
            Literal::IntersectAll { inputs, output } => {
                f.write_str("intersect_all([")?;
                comma_sep(f, inputs)?;
                write!(f, "], {output})")
            }
            Literal::RelativeComplementAll { base, subtract, output } => {
                write!(f, "relative_complement_all({base}, [")?;
                comma_sep(f, subtract)?;
                write!(f, "], {output})")
            }
            Literal::Compare { lhs, op, rhs } => write!(f, "{lhs} {} {rhs}", op.symbol()),
        }
    }
}

impl Display for Head {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Head::InitiatedAt { fluent, time } => write!(f, "initiatedAt({fluent}, {time})"),
            Head::TerminatedAt { fluent, time } => write!(f, "terminatedAt({fluent}, {time})"),
            Head::HappensAt { event, time } => write!(f, "happensAt({event}, {time})"),
            Head::HoldsFor { fluent, intervals } => write!(f, "holdsFor({fluent}, {intervals})"),
        }
    }
}

impl Display for Rule {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{} <-", self.head)?;
        for (i, lit) in self.body.iter().enumerate() {
            let sep = if i + 1 == self.body.len() { "." } else { "," };
            write!(f, "\n    {lit}{sep}")?;
        }
        Ok(())
    }
}

impl Display for IffDefinition {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{} iff", self.head)?;
        let mut items: Vec<String> = self
            .groups
            .iter()
            .map(|g| match g.as_slice() {
                [one] => one.to_string(),
                many => format!("({})", many.iter().map(ToString::to_string).collect::<Vec<_>>().join(" or ")),
            })
            .collect();
        items.extend(self.negated.iter().map(|n| format!("not {n}")));
        for (i, it) in items.iter().enumerate() {
            let sep = if i + 1 == items.len() { "." } else { "," };
            write!(f, "\n    {it}{sep}")?;
        }
        Ok(())
    }
}

impl Display for Grounding {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Grounding::Domain(d) => f.write_str(d),
            Grounding::Pairs(d) => write!(f, "pairs({d})"),
            Grounding::UnorderedPairs(d) => write!(f, "upairs({d})"),
        }
    }
}

impl Display for Declaration {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let kw = match self.kind {
            ItemKind::InputEvent => "input event",
            ItemKind::InputFluent => "input fluent",
            ItemKind::SimpleFluent => "simple fluent",
            ItemKind::SdFluent => "sd fluent",
            ItemKind::DerivedEvent => "event",
        };
        write!(f, "{kw} {}/{}", self.name, self.arity)?;
        if let Some(g) = &self.grounding {
            write!(f, " over {g}")?;
        }
        f.write_str(".")
    }
}

impl Display for EventDescription {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for (name, spec) in &self.domains {
            match spec {
                DomainSpec::FromInput => writeln!(f, "domain {name} = *.")?,
                DomainSpec::Listed(m) => writeln!(f, "domain {name} = {{{}}}.", m.join(", "))?,
            }
        }
        for d in &self.declarations {
            writeln!(f, "{d}")?;
        }
        for r in &self.rules {
            writeln!(f, "\n{r}")?;
        }
        for d in &self.iff_definitions {
            writeln!(f, "\n{d}")?;
        }
        Ok(())
    }
}
