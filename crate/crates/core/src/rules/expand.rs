//! Expansion of `iff` shorthands into `holdsFor` rules.

use super::ast::*;
use super::RuleError;

/// Rewrites one `iff` definition as a `holdsFor` rule: each disjunction
/// group becomes a `union_all`, the groups are joined with `intersect_all`
/// and trailing negations are removed with `relative_complement_all`.
/// Singleton groups and single conjuncts skip the construct they would
/// otherwise need.
pub fn expand_iff(def: &IffDefinition) -> Result<Rule, RuleError> {
    if def.groups.is_empty() {
        return Err(RuleError::UnsupportedShorthand(format!("{}: needs at least one positive conjunct", def.head)));
    }
    if def.groups.iter().any(Vec::is_empty) {
        return Err(RuleError::UnsupportedShorthand(format!("{}: empty disjunction", def.head)));
    }

    let mut counter = 0usize;
    let mut fresh = || {
        counter += 1;
        format!("I{counter}")
    };
    let mut body = Vec::new();

    let single_positive = def.groups.len() == 1 && def.negated.is_empty();
    let mut group_results = Vec::with_capacity(def.groups.len());
    for group in &def.groups {
        let last_step = single_positive;
        let mut members = Vec::with_capacity(group.len());
        for ft in group {
            let var = if last_step && group.len() == 1 { "I".to_string() } else { fresh() };
            body.push(Literal::HoldsFor { fluent: ft.clone(), intervals: var.clone() });
            members.push(var);
        }
        if members.len() == 1 {
            group_results.push(members.pop().unwrap_or_default());
        } else {
            let output = if last_step { "I".to_string() } else { fresh() };
            body.push(Literal::UnionAll { inputs: members, output: output.clone() });
            group_results.push(output);
        }
    }

    let positive = if group_results.len() == 1 {
        group_results.pop().unwrap_or_default()
    } else {
        let output = if def.negated.is_empty() { "I".to_string() } else { fresh() };
        body.push(Literal::IntersectAll { inputs: group_results, output: output.clone() });
        output
    };

    if !def.negated.is_empty() {
        let mut subtract = Vec::with_capacity(def.negated.len());
        for ft in &def.negated {
            let var = fresh();
            body.push(Literal::HoldsFor { fluent: ft.clone(), intervals: var.clone() });
            subtract.push(var);
        }
        body.push(Literal::RelativeComplementAll { base: positive, subtract, output: "I".to_string() });
    }

    Ok(Rule { head: Head::HoldsFor { fluent: def.head.clone(), intervals: "I".to_string() }, body, pos: def.pos })
}

/// Replaces every shorthand definition with its expansion.
pub fn expand(mut ed: EventDescription) -> Result<EventDescription, RuleError> {
    let defs = std::mem::take(&mut ed.iff_definitions);
    for def in &defs {
        ed.rules.push(expand_iff(def)?);
    }
    Ok(ed)
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;
    use crate::interval::{intersect_all, relative_complement_all, union_all, IntervalList};
    use crate::rules::parse;
    use proptest::prelude::*;

    fn iff_of(src: &str) -> IffDefinition {
        let header = "sd fluent g/0. input fluent a/0. input fluent b/0. input fluent c/0. input fluent d/0.\n";
        parse(&format!("{header}{src}")).unwrap().iff_definitions.remove(0)
    }

    #[test]
    fn nine_literal_expansion() {
        let def = iff_of("g = v iff (a = v1 or b = v2), (a = w1 or b = w2), not c = v3.");
        let rule = expand_iff(&def).unwrap();
        let expected = "holdsFor(g = v, I) <-
    holdsFor(a = v1, I1),
    holdsFor(b = v2, I2),
    union_all([I1, I2], I3),
    holdsFor(a = w1, I4),
    holdsFor(b = w2, I5),
    union_all([I4, I5], I6),
    intersect_all([I3, I6], I7),
    holdsFor(c = v3, I8),
    relative_complement_all(I7, [I8], I).";
        assert_eq!(rule.body.len(), 9);
        assert_eq!(rule.to_string(), expected);
    }

    #[test]
    fn single_conjunct() {
        let rule = expand_iff(&iff_of("g = v iff a = v1.")).unwrap();
        assert_eq!(rule.to_string(), "holdsFor(g = v, I) <-\n    holdsFor(a = v1, I).");
    }

    #[test]
    fn conjunct_with_negation() {
        let rule = expand_iff(&iff_of("g = v iff a = v1, not b = v2.")).unwrap();
        assert_eq!(
            rule.to_string(),
            "holdsFor(g = v, I) <-\n    holdsFor(a = v1, I1),\n    holdsFor(b = v2, I2),\n    relative_complement_all(I1, [I2], I)."
        );
    }

    #[test]
    fn plain_conjunction_and_disjunction() {
        let rule = expand_iff(&iff_of("g = v iff a = true, b = true.")).unwrap();
        assert_eq!(rule.body.last().unwrap().to_string(), "intersect_all([I1, I2], I)");
        let rule = expand_iff(&iff_of("g = v iff (a = true or b = true).")).unwrap();
        assert_eq!(rule.body.last().unwrap().to_string(), "union_all([I1, I2], I)");
    }

    #[test]
    fn expand_moves_definitions_into_rules() {
        let header = "sd fluent g/0. input fluent a/0.\n";
        let ed = expand(parse(&format!("{header}g = true iff a = true.")).unwrap()).unwrap();
        assert!(ed.iff_definitions.is_empty());
        assert_eq!(ed.rules.len(), 1);
    }

    #[test]
    fn rejects_definitions_without_positive_part() {
        let def = IffDefinition { groups: vec![], ..iff_of("g = v iff a = v1.") };
        assert!(matches!(expand_iff(&def), Err(RuleError::UnsupportedShorthand(_))));
    }

    // Tiny interpreter for expanded bodies, independent of the engine.
    fn run(rule: &Rule, env: &HashMap<String, IntervalList<i64>>) -> IntervalList<i64> {
        let mut vars: HashMap<String, IntervalList<i64>> = HashMap::new();
        let get = |vars: &HashMap<String, IntervalList<i64>>, v: &String| vars[v].clone();
        for lit in &rule.body {
            match lit {
                Literal::HoldsFor { fluent, intervals } => {
                    vars.insert(intervals.clone(), env[&fluent.fluent.name].clone());
                }
                Literal::UnionAll { inputs, output } => {
                    let ls: Vec<_> = inputs.iter().map(|v| get(&vars, v)).collect();
                    vars.insert(output.clone(), union_all(&ls));
                }
                Literal::IntersectAll { inputs, output } => {
                    let ls: Vec<_> = inputs.iter().map(|v| get(&vars, v)).collect();
                    vars.insert(output.clone(), intersect_all(&ls).unwrap());
                }
                Literal::RelativeComplementAll { base, subtract, output } => {
                    let ls: Vec<_> = subtract.iter().map(|v| get(&vars, v)).collect();
                    vars.insert(output.clone(), relative_complement_all(&get(&vars, base), &ls));
                }
                other => panic!("unexpected literal {other}"),
            }
        }
        vars.remove("I").unwrap()
    }

    const ATOMS: &[&str] = &["a", "b", "c", "d"];

    fn ft(name: &str) -> FluentTerm {
        FluentTerm { fluent: Atom { name: name.into(), args: vec![] }, value: Term::Const("true".into()) }
    }

    fn list() -> impl Strategy<Value = IntervalList<i64>> {
        proptest::collection::vec((0i64..40, 1i64..8), 0..4)
            .prop_map(|v| IntervalList::from_pairs(&v.iter().map(|&(s, l)| (s, s + l)).collect::<Vec<_>>()).unwrap())
    }

    fn shape() -> impl Strategy<Value = (Vec<Vec<usize>>, Vec<usize>)> {
        (
            proptest::collection::vec(proptest::collection::vec(0usize..4, 1..3), 1..4),
            proptest::collection::vec(0usize..4, 0..3),
        )
    }

    proptest! {
        #[test]
        fn expansion_preserves_pointwise_meaning(
            (groups, negated) in shape(),
            lists in proptest::collection::vec(list(), 4),
        ) {
            let def = IffDefinition {
                head: ft("g"),
                groups: groups.iter().map(|g| g.iter().map(|&i| ft(ATOMS[i])).collect()).collect(),
                negated: negated.iter().map(|&i| ft(ATOMS[i])).collect(),
                pos: Pos::default(),
            };
            let env: HashMap<String, IntervalList<i64>> =
                ATOMS.iter().map(|a| a.to_string()).zip(lists.iter().cloned()).collect();
            let got = run(&expand_iff(&def).unwrap(), &env);
            for t in 0..60 {
                let holds = |i: usize| lists[i].holds_at(t);
                let want = groups.iter().all(|g| g.iter().any(|&i| holds(i)))
                    && negated.iter().all(|&i| !holds(i));
                prop_assert_eq!(got.holds_at(t), want, "t={}", t);
            }
        }
    }
}
