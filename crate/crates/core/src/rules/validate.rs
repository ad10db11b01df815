//! Static checks on an expanded, stratified description.

use std::collections::HashSet;
use std::fmt;

use super::ast::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub pos: Option<Pos>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos {
            Some(p) => write!(f, "{p}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

struct Checker<'a> {
    ed: &'a EventDescription,
    out: Vec<Diagnostic>,
}

impl Checker<'_> {
    fn report(&mut self, pos: Option<Pos>, message: String) {
        self.out.push(Diagnostic { pos, message });
    }

    fn declarations(&mut self) {
        for d in &self.ed.declarations {
            if d.kind.is_input() {
                if d.grounding.is_some() {
                    self.report(Some(d.pos), format!("input item {} takes no grounding", d.name));
                }
                continue;
            }
            match &d.grounding {
                None if d.arity > 0 => {
                    self.report(Some(d.pos), format!("{}/{} has no grounding domain", d.name, d.arity));
                }
                None => {}
                Some(g) => {
                    if g.arity() != d.arity {
                        self.report(
                            Some(d.pos),
                            format!("{}/{} is grounded over {g}, which yields {}-tuples", d.name, d.arity, g.arity()),
                        );
                    }
                    if self.ed.domain(g.domain()).is_none() {
                        self.report(
                            Some(d.pos),
                            format!("{} is grounded over undeclared domain {}", d.name, g.domain()),
                        );
                    }
                }
            }
        }
    }

    fn rule_kind(&mut self, r: &Rule) {
        let name = r.head.name();
        let Some(kind) = self.ed.kind_of(name) else {
            self.report(Some(r.pos), format!("{name} is not declared"));
            return;
        };
        let expected = match r.kind() {
            RuleKind::InitiatedAt | RuleKind::TerminatedAt => ItemKind::SimpleFluent,
            RuleKind::HoldsFor => ItemKind::SdFluent,
            RuleKind::HappensAt => ItemKind::DerivedEvent,
        };
        if kind != expected {
            let what = match kind {
                ItemKind::InputEvent | ItemKind::InputFluent => "an input item".to_string(),
                ItemKind::SimpleFluent => "a simple fluent".to_string(),
                ItemKind::SdFluent => "a statically determined fluent".to_string(),
                ItemKind::DerivedEvent => "an event".to_string(),
            };
            self.report(Some(r.pos), format!("{name} is declared {what} but has a {} rule", r.kind().keyword()));
        }
    }

    fn values_are_constant(&mut self, r: &Rule) {
        let mut fluents: Vec<&FluentTerm> = r.head.fluent().into_iter().collect();
        for lit in &r.body {
            match lit {
                Literal::HoldsAt { fluent, .. } | Literal::HoldsFor { fluent, .. } => fluents.push(fluent),
                Literal::HappensAt { event: EventTerm::Start(ft) | EventTerm::End(ft), .. } => fluents.push(ft),
                _ => {}
            }
        }
        for ft in fluents {
            if let Term::Var(v) = &ft.value {
                self.report(
                    Some(r.pos),
                    format!("value of {} is the variable {v}; values must be constants", ft.fluent.name),
                );
            }
        }
    }

    fn time_rule(&mut self, r: &Rule, time_var: &str) {
        if r.body.iter().any(Literal::is_interval_literal) {
            self.report(
                Some(r.pos),
                format!("{} rule for {} uses an interval literal", r.kind().keyword(), r.head.name()),
            );
        }
        if !r.body.iter().any(|l| matches!(l, Literal::HappensAt { .. })) {
            self.report(
                Some(r.pos),
                format!("{} rule for {} has no happensAt condition", r.kind().keyword(), r.head.name()),
            );
        }
        let mut bound: HashSet<&str> = r.head.atom().vars().collect();
        let mut time_bound = false;
        for lit in &r.body {
            match lit {
                Literal::HappensAt { event, time } => {
                    match event {
                        EventTerm::Plain(a) => bound.extend(a.vars()),
                        EventTerm::Start(ft) | EventTerm::End(ft) => self.require(r, &bound, ft.fluent.vars()),
                    }
                    if let Term::Var(t) = time {
                        if t == time_var {
                            time_bound = true;
                        } else {
                            self.report(Some(r.pos), format!("time variable {t} differs from the head's {time_var}"));
                        }
                    }
                }
                Literal::HoldsAt { fluent, time } => {
                    self.require(r, &bound, fluent.fluent.vars());
                    if let Term::Var(t) = time {
                        if t != time_var || !time_bound {
                            self.report(Some(r.pos), format!("holdsAt time {t} is not bound by an earlier happensAt"));
                        }
                    }
                }
                Literal::Compare { lhs, rhs, .. } => {
                    for side in [lhs, rhs] {
                        if let Term::Var(v) = side {
                            let ok = if v == time_var { time_bound } else { bound.contains(v.as_str()) };
                            if !ok {
                                self.report(Some(r.pos), format!("variable {v} is compared before it is bound"));
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        if !time_bound {
            self.report(Some(r.pos), format!("head time {time_var} is never bound"));
        }
    }

    fn require<'v>(&mut self, r: &Rule, bound: &HashSet<&str>, vars: impl Iterator<Item = &'v str>) {
        for v in vars {
            if !bound.contains(v) {
                self.report(Some(r.pos), format!("variable {v} is used before it is bound"));
            }
        }
    }

    fn holds_for_rule(&mut self, r: &Rule, head_var: &str) {
        let head_vars: HashSet<&str> = r.head.atom().vars().collect();
        let mut intervals: HashSet<&str> = HashSet::new();
        let mut reported: HashSet<&str> = HashSet::new();
        for lit in &r.body {
            let need: Vec<&String> = match lit {
                Literal::HappensAt { .. } | Literal::HoldsAt { .. } => {
                    self.report(Some(r.pos), format!("holdsFor rule for {} uses a time-point literal", r.head.name()));
                    continue;
                }
                Literal::HoldsFor { fluent, intervals: out } => {
                    for v in fluent.fluent.vars() {
                        if !head_vars.contains(v) && reported.insert(v) {
                            self.report(
                                Some(r.pos),
                                format!("variable {v} in the body of {} is not bound by the head", r.head.name()),
                            );
                        }
                    }
                    intervals.insert(out);
                    continue;
                }
                Literal::UnionAll { inputs, .. } | Literal::IntersectAll { inputs, .. } => inputs.iter().collect(),
                Literal::RelativeComplementAll { base, subtract, .. } => {
                    std::iter::once(base).chain(subtract.iter()).collect()
                }
                Literal::Compare { lhs, rhs, .. } => {
                    for v in [lhs, rhs].into_iter().filter_map(Term::var) {
                        if !head_vars.contains(v) && reported.insert(v) {
                            self.report(Some(r.pos), format!("variable {v} is compared but never bound"));
                        }
                    }
                    continue;
                }
            };
            for v in need {
                if !intervals.contains(v.as_str()) {
                    self.report(Some(r.pos), format!("interval variable {v} is used before it is bound"));
                }
            }
            match lit {
                Literal::IntersectAll { inputs, .. } if inputs.is_empty() => {
                    self.report(Some(r.pos), "intersect_all over an empty list".to_string());
                }
                Literal::UnionAll { output, .. }
                | Literal::IntersectAll { output, .. }
                | Literal::RelativeComplementAll { output, .. } => {
                    intervals.insert(output);
                }
                _ => {}
            }
        }
        if !intervals.contains(head_var) {
            self.report(Some(r.pos), format!("head interval variable {head_var} is never bound"));
        }
    }
}

/// Returns every problem found; an empty list means the description is
/// ready for evaluation.
pub fn validate(ed: &EventDescription) -> Vec<Diagnostic> {
    let mut c = Checker { ed, out: Vec::new() };
    c.declarations();
    for r in &ed.rules {
        c.rule_kind(r);
        c.values_are_constant(r);
        match &r.head {
            Head::InitiatedAt { time, .. } | Head::TerminatedAt { time, .. } | Head::HappensAt { time, .. } => {
                c.time_rule(r, time)
            }
            Head::HoldsFor { intervals, .. } => c.holds_for_rule(r, intervals),
        }
    }
    if !ed.iff_definitions.is_empty() {
        c.report(None, "iff definitions must be expanded before validation".to_string());
    }
    c.out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packs::SURVEILLANCE;
    use crate::rules::{expand, parse};

    const HEADER: &str = "
        domain entity = *.
        input event appear/1.
        input fluent walking/1.
        input fluent close/2.
    ";

    fn diags(body: &str) -> Vec<Diagnostic> {
        let ed = expand(parse(&format!("{HEADER}{body}")).unwrap()).unwrap();
        validate(&ed)
    }

    #[test]
    fn surveillance_pack_is_clean() {
        let ed = expand(parse(SURVEILLANCE).unwrap()).unwrap();
        assert_eq!(validate(&ed), vec![]);
    }

    #[test]
    fn simple_fluent_with_holds_for_rule() {
        let d = diags(
            "simple fluent moving/2 over upairs(entity).
             holdsFor(moving(P1, P2) = true, I) <-
                holdsFor(walking(P1) = true, I1),
                holdsFor(walking(P2) = true, I2),
                holdsFor(close(P1, P2) = true, I3),
                intersect_all([I1, I2, I3], I).",
        );
        assert_eq!(d.len(), 1, "{d:?}");
        assert!(d[0].message.contains("simple fluent"));
    }

    #[test]
    fn variable_only_under_negation() {
        let d = diags(
            "sd fluent g/1 over entity.
             g(X) = true iff walking(X) = true, not close(X, Y) = true.",
        );
        assert_eq!(d.len(), 1, "{d:?}");
        assert!(d[0].message.contains("variable Y"));
    }

    #[test]
    fn interval_construct_in_initiation() {
        let d = diags(
            "simple fluent f/1 over entity.
             initiatedAt(f(X) = true, T) <-
                happensAt(appear(X), T),
                holdsFor(walking(X) = true, I1).",
        );
        assert_eq!(d.len(), 1, "{d:?}");
        assert!(d[0].message.contains("interval literal"));
    }

    #[test]
    fn missing_grounding() {
        let d = diags(
            "simple fluent f/1.
             initiatedAt(f(X) = true, T) <- happensAt(appear(X), T).",
        );
        assert_eq!(d.len(), 1, "{d:?}");
        assert!(d[0].message.contains("no grounding"));
        let d = diags(
            "simple fluent f/1 over people.
             initiatedAt(f(X) = true, T) <- happensAt(appear(X), T).",
        );
        assert_eq!(d.len(), 1, "{d:?}");
        assert!(d[0].message.contains("undeclared domain"));
    }

    #[test]
    fn unbound_variables() {
        let d = diags(
            "simple fluent f/1 over entity.
             initiatedAt(f(X) = true, T) <- holdsAt(close(X, Y) = true, T), happensAt(appear(X), T).",
        );
        assert!(d.iter().any(|x| x.message.contains("variable Y")), "{d:?}");
        assert!(d.iter().any(|x| x.message.contains("holdsAt time")), "{d:?}");

        // A body-only variable bound by an event is fine.
        let d = diags(
            "simple fluent f/1 over entity.
             initiatedAt(f(X) = true, T) <- happensAt(appear(Y), T), holdsAt(close(X, Y) = true, T).",
        );
        assert_eq!(d, vec![]);
    }

    #[test]
    fn initiation_needs_an_event() {
        let d = diags(
            "simple fluent f/1 over entity.
             initiatedAt(f(X) = true, T) <- holdsAt(walking(X) = true, T).",
        );
        assert!(d.iter().any(|x| x.message.contains("no happensAt")), "{d:?}");
    }

    #[test]
    fn comparisons_and_variable_values() {
        let d = diags(
            "simple fluent f/1 over entity.
             initiatedAt(f(X) = true, T) <- happensAt(appear(X), T), T > 100.",
        );
        assert_eq!(d, vec![]);
        let d = diags(
            "simple fluent f/1 over entity.
             initiatedAt(f(X) = V, T) <- happensAt(appear(X), T).",
        );
        assert_eq!(d.len(), 1, "{d:?}");
    }
}
