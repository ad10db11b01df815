//! Level assignment for hierarchical event descriptions.
//!
//! Input events and input fluent-values sit at level 0. A defined event or
//! fluent-value sits one level above the highest item its definition
//! depends on. For a simple fluent-value `F = V` that includes the
//! initiation conditions of every other value of `F`, since those break
//! `F = V`.

use std::collections::{BTreeMap, BTreeSet};

use super::ast::*;
use super::RuleError;

fn fluent_key(ft: &FluentTerm) -> LevelKey {
    let value = ft.value.constant().unwrap_or_else(|| "_".to_string());
    LevelKey::FluentValue(ft.fluent.name.clone(), value)
}

fn head_key(head: &Head) -> LevelKey {
    match head {
        Head::HappensAt { event, .. } => LevelKey::Event(event.name.clone()),
        Head::InitiatedAt { fluent, .. } | Head::TerminatedAt { fluent, .. } | Head::HoldsFor { fluent, .. } => {
            fluent_key(fluent)
        }
    }
}

/// Items a rule body refers to.
pub(crate) fn body_refs(body: &[Literal]) -> Vec<LevelKey> {
    let mut out = Vec::new();
    for lit in body {
        match lit {
            Literal::HappensAt { event, .. } => match event {
                EventTerm::Plain(a) => out.push(LevelKey::Event(a.name.clone())),
                EventTerm::Start(ft) | EventTerm::End(ft) => out.push(fluent_key(ft)),
            },
            Literal::HoldsAt { fluent, .. } | Literal::HoldsFor { fluent, .. } => out.push(fluent_key(fluent)),
            _ => {}
        }
    }
    out
}

fn key_name(k: &LevelKey) -> &str {
    match k {
        LevelKey::Event(n) | LevelKey::FluentValue(n, _) => n,
    }
}

struct Graph {
    deps: BTreeMap<LevelKey, BTreeSet<LevelKey>>,
}

impl Graph {
    fn build(ed: &EventDescription) -> (Graph, Vec<String>) {
        let mut deps: BTreeMap<LevelKey, BTreeSet<LevelKey>> = BTreeMap::new();
        let mut warnings = Vec::new();

        // Every referenced or defined item becomes a node.
        for r in &ed.rules {
            deps.entry(head_key(&r.head)).or_default();
            for k in body_refs(&r.body) {
                deps.entry(k).or_default();
            }
        }
        for d in &ed.declarations {
            if d.kind == ItemKind::InputEvent || d.kind == ItemKind::DerivedEvent {
                deps.entry(LevelKey::Event(d.name.clone())).or_default();
            }
        }

        for r in &ed.rules {
            let refs = body_refs(&r.body);
            deps.entry(head_key(&r.head)).or_default().extend(refs.iter().cloned());
            // Initiating one value breaks every other value of the fluent.
            if let Head::InitiatedAt { fluent, .. } = &r.head {
                let own = fluent_key(fluent);
                let siblings: Vec<LevelKey> = deps
                    .keys()
                    .filter(|k| matches!(k, LevelKey::FluentValue(n, _) if *n == fluent.fluent.name) && **k != own)
                    .cloned()
                    .collect();
                for s in siblings {
                    deps.entry(s).or_default().extend(refs.iter().cloned());
                }
            }
        }
        for key in deps.keys() {
            if let LevelKey::FluentValue(name, value) = key {
                if ed.kind_of(name) == Some(ItemKind::SimpleFluent) {
                    let initiated = ed.rules.iter().any(|r| {
                        matches!(&r.head, Head::InitiatedAt { fluent, .. }
                            if fluent.fluent.name == *name && fluent.value.constant().as_deref() == Some(value))
                    });
                    if !initiated {
                        warnings.push(format!("simple fluent value {name}={value} has no initiatedAt rule"));
                    }
                }
            }
        }
        (Graph { deps }, warnings)
    }

    fn is_input(ed: &EventDescription, key: &LevelKey) -> bool {
        ed.kind_of(key_name(key)).is_some_and(ItemKind::is_input)
    }
}

fn find_cycle<N: Ord + Clone>(nodes: &BTreeMap<N, BTreeSet<N>>) -> Option<Vec<N>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Fresh,
        Active,
        Done,
    }
    let mut marks: BTreeMap<&N, Mark> = nodes.keys().map(|k| (k, Mark::Fresh)).collect();
    for root in nodes.keys() {
        if marks[root] != Mark::Fresh {
            continue;
        }
        // Iterative DFS keeping the active path.
        let mut path: Vec<&N> = vec![root];
        let mut iters: Vec<std::collections::btree_set::Iter<'_, N>> = vec![nodes[root].iter()];
        marks.insert(root, Mark::Active);
        while let Some(it) = iters.last_mut() {
            match it.next() {
                Some(child) => match marks.get(child).copied().unwrap_or(Mark::Done) {
                    Mark::Active => {
                        let from = path.iter().position(|n| *n == child).unwrap_or(0);
                        let mut cycle: Vec<N> = path[from..].iter().map(|n| (*n).clone()).collect();
                        cycle.push(child.clone());
                        return Some(cycle);
                    }
                    Mark::Fresh => {
                        let (key, _) = nodes.get_key_value(child).expect("child is a node");
                        marks.insert(key, Mark::Active);
                        path.push(key);
                        iters.push(nodes[key].iter());
                    }
                    Mark::Done => {}
                },
                None => {
                    let done = path.pop().expect("path tracks iterators");
                    marks.insert(done, Mark::Done);
                    iters.pop();
                }
            }
        }
    }
    None
}

/// Assigns levels and an evaluation order, or reports the first cycle.
pub fn stratify(mut ed: EventDescription) -> Result<EventDescription, RuleError> {
    let (graph, warnings) = Graph::build(&ed);
    if let Some(cycle) = find_cycle(&graph.deps) {
        return Err(RuleError::NonHierarchical { cycle: cycle.iter().map(ToString::to_string).collect() });
    }

    let mut levels: BTreeMap<LevelKey, u32> = BTreeMap::new();
    fn level_of(key: &LevelKey, ed: &EventDescription, graph: &Graph, memo: &mut BTreeMap<LevelKey, u32>) -> u32 {
        if let Some(&l) = memo.get(key) {
            return l;
        }
        let l = if Graph::is_input(ed, key) {
            0
        } else {
            let deps = graph.deps.get(key).cloned().unwrap_or_default();
            1 + deps.iter().map(|d| level_of(d, ed, graph, memo)).max().unwrap_or(0)
        };
        memo.insert(key.clone(), l);
        l
    }
    for key in graph.deps.keys() {
        level_of(key, &ed, &graph, &mut levels);
    }

    // Evaluation works per name (all values of a simple fluent together),
    // so order names by their own dependency graph.
    let mut name_deps: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for d in &ed.declarations {
        if !d.kind.is_input() {
            name_deps.entry(d.name.clone()).or_default();
        }
    }
    for r in &ed.rules {
        let head = r.head.name().to_string();
        if ed.kind_of(&head).is_some_and(ItemKind::is_input) {
            continue;
        }
        let entry = name_deps.entry(head).or_default();
        for k in body_refs(&r.body) {
            let n = key_name(&k);
            if !ed.kind_of(n).is_some_and(ItemKind::is_input) {
                entry.insert(n.to_string());
            }
        }
    }
    if let Some(cycle) = find_cycle(&name_deps) {
        return Err(RuleError::NonHierarchical { cycle });
    }
    let mut order: Vec<String> = Vec::new();
    let mut placed: BTreeSet<String> = BTreeSet::new();
    fn place(
        n: &str,
        deps: &BTreeMap<String, BTreeSet<String>>,
        placed: &mut BTreeSet<String>,
        order: &mut Vec<String>,
    ) {
        if placed.contains(n) {
            return;
        }
        placed.insert(n.to_string());
        if let Some(ds) = deps.get(n) {
            for d in ds {
                place(d, deps, placed, order);
            }
        }
        order.push(n.to_string());
    }
    // Declaration order among independent items.
    for d in &ed.declarations {
        if name_deps.contains_key(&d.name) {
            place(&d.name, &name_deps, &mut placed, &mut order);
        }
    }
    for n in name_deps.keys() {
        place(n, &name_deps, &mut placed, &mut order);
    }

    ed.levels = levels;
    ed.evaluation_order = order;
    ed.warnings = warnings;
    Ok(ed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packs::SURVEILLANCE;
    use crate::rules::{expand, parse};

    fn load(src: &str) -> Result<EventDescription, RuleError> {
        stratify(expand(parse(src)?)?)
    }

    fn fv(n: &str, v: &str) -> LevelKey {
        LevelKey::FluentValue(n.into(), v.into())
    }

    #[test]
    fn surveillance_levels() {
        let ed = load(SURVEILLANCE).unwrap();
        assert_eq!(ed.level(&fv("walking", "true")), Some(0));
        assert_eq!(ed.level(&fv("close", "true")), Some(0));
        assert_eq!(ed.level(&LevelKey::Event("appear".into())), Some(0));
        assert_eq!(ed.level(&fv("moving", "true")), Some(1));
        assert_eq!(ed.level(&fv("moving_sd", "true")), Some(1));
        assert_eq!(ed.level(&fv("person", "true")), Some(1));
        assert_eq!(ed.level(&fv("leaving_object", "true")), Some(2));
        assert!(ed.warnings.is_empty(), "{:?}", ed.warnings);
        let pos = |n: &str| ed.evaluation_order.iter().position(|x| x == n).unwrap();
        assert!(pos("person") < pos("leaving_object"));
    }

    #[test]
    fn no_simple_fluent_value_at_level_zero() {
        let ed = load(SURVEILLANCE).unwrap();
        for (k, l) in &ed.levels {
            if let LevelKey::FluentValue(n, _) = k {
                if ed.kind_of(n) == Some(ItemKind::SimpleFluent) {
                    assert!(*l > 0, "{k}");
                }
            }
        }
    }

    #[test]
    fn deterministic_and_idempotent() {
        let once = load(SURVEILLANCE).unwrap();
        let again = load(SURVEILLANCE).unwrap();
        assert_eq!(once, again);
        let twice = stratify(once.clone()).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn self_reference_is_a_cycle() {
        let err = load(
            "input event e/0.
             simple fluent f/0.
             initiatedAt(f = true, T) <- happensAt(e, T), holdsAt(f = true, T).",
        )
        .unwrap_err();
        match err {
            RuleError::NonHierarchical { cycle } => assert!(cycle.contains(&"f=true".to_string()), "{cycle:?}"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn mutual_recursion_through_sd_fluents() {
        let err = load(
            "input fluent a/0.
             sd fluent f/0.
             sd fluent g/0.
             f = true iff a = true, g = true.
             g = true iff f = true.",
        )
        .unwrap_err();
        assert!(matches!(err, RuleError::NonHierarchical { .. }));
        assert!(err.to_string().contains("->"));
    }

    #[test]
    fn sibling_initiations_count_as_dependencies() {
        let ed = load(
            "input event e/0.
             input event x/0.
             simple fluent f/0.
             simple fluent h/0.
             initiatedAt(h = true, T) <- happensAt(x, T).
             initiatedAt(f = on, T) <- happensAt(e, T).
             initiatedAt(f = off, T) <- happensAt(x, T), holdsAt(h = true, T).",
        )
        .unwrap();
        // f=on is broken by f=off's initiation, which reads h.
        assert_eq!(ed.level(&fv("h", "true")), Some(1));
        assert_eq!(ed.level(&fv("f", "off")), Some(2));
        assert_eq!(ed.level(&fv("f", "on")), Some(2));
    }

    #[test]
    fn warns_on_uninitiated_value() {
        let ed = load(
            "input event e/0.
             simple fluent f/0.
             initiatedAt(f = true, T) <- happensAt(e, T).
             terminatedAt(f = false, T) <- happensAt(e, T).",
        )
        .unwrap();
        assert_eq!(ed.warnings, vec!["simple fluent value f=false has no initiatedAt rule".to_string()]);
    }
}
