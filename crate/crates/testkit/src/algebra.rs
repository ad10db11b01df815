//! Interval lists as plain point sets.

use std::collections::BTreeSet;

use evcalc_core::{End, Interval, IntervalList, Spans, Tick};
use rand::Rng;

pub type Points = BTreeSet<Tick>;

/// Points of a list up to `hi` inclusive; open tails run to `hi`.
pub fn points(list: &Spans, hi: Tick) -> Points {
    let mut out = Points::new();
    for iv in list {
        let end = match iv.end {
            End::At(e) => e.min(hi + 1),
            End::Open => hi + 1,
        };
        out.extend(iv.start..end);
    }
    out
}

/// Maximal runs `[a, b)` of a point set.
pub fn runs(pts: &Points) -> Vec<(Tick, Tick)> {
    let mut out: Vec<(Tick, Tick)> = Vec::new();
    for &t in pts {
        match out.last_mut() {
            Some((_, b)) if *b == t => *b = t + 1,
            _ => out.push((t, t + 1)),
        }
    }
    out
}

/// Runs as a list; a run reaching `hi` becomes open when `open_at_hi`.
pub fn to_list(pts: &Points, hi: Tick, open_at_hi: bool) -> Spans {
    let ivs = runs(pts).into_iter().map(|(a, b)| {
        if open_at_hi && b > hi {
            Interval::since(a)
        } else {
            Interval { start: a, end: End::At(b) }
        }
    });
    IntervalList::normalize(ivs).expect("runs are well formed")
}

pub fn union(lists: &[Spans], hi: Tick) -> Points {
    lists.iter().flat_map(|l| points(l, hi)).collect()
}

pub fn intersect(lists: &[Spans], hi: Tick) -> Points {
    (0..=hi).filter(|t| lists.iter().all(|l| points(l, hi).contains(t))).collect()
}

pub fn complement(base: &Spans, lists: &[Spans], hi: Tick) -> Points {
    let minus = union(lists, hi);
    points(base, hi).into_iter().filter(|t| !minus.contains(t)).collect()
}

/// Holds at `t` iff some start precedes `t` with no break in between,
/// a break at `t` itself included.
pub fn inertia(starts: &[Tick], breaks: &[Tick], t: Tick) -> bool {
    starts.iter().any(|&s| s < t && !breaks.iter().any(|&b| s < b && b <= t))
}

pub fn inertia_points(starts: &[Tick], breaks: &[Tick], hi: Tick) -> Points {
    (0..=hi).filter(|&t| inertia(starts, breaks, t)).collect()
}

/// Up to `max` random intervals with start in `[0, universe]`, possibly
/// overlapping before normalisation; the last may be open.
pub fn random_list(rng: &mut impl Rng, universe: Tick, max: usize, open: bool) -> Spans {
    let n = rng.gen_range(0..=max);
    let mut raw: Vec<Interval<Tick>> = (0..n)
        .map(|_| {
            let s = rng.gen_range(0..universe);
            let e = rng.gen_range(s + 1..=universe);
            Interval { start: s, end: End::At(e) }
        })
        .collect();
    if open && n > 0 && rng.gen_bool(0.2) {
        raw.push(Interval::since(rng.gen_range(0..universe)));
    }
    IntervalList::normalize(raw).expect("generated intervals are well formed")
}

/// Sorted, distinct random points in `[0, universe)`.
pub fn random_points(rng: &mut impl Rng, universe: Tick, max: usize) -> Vec<Tick> {
    let n = rng.gen_range(0..=max);
    let set: Points = (0..n).map(|_| rng.gen_range(0..universe)).collect();
    set.into_iter().collect()
}
