//! Maximal-interval lists over discrete time.
//!
//! An [`IntervalList`] is the canonical form of a set of time points: its
//! closed-open intervals are sorted, pairwise disjoint and never abut, so two
//! lists denote the same set exactly when they are equal. Only the final
//! interval may be open-ended ([`End::Open`]), meaning "holds since `start`"
//! with no known end.
//!
//! The three list constructs ([`union_all`], [`intersect_all`],
//! [`relative_complement_all`]) and the inertia builder [`make_intervals`]
//! are what rule evaluation is made of; [`IntervalList::clip_before`],
//! [`amalgamate`] and [`IntervalList::restrict`] serve the windowing runtime.

use std::cmp::{max, min};
use std::fmt;

use thiserror::Error;

use crate::time::TimePoint;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("malformed interval [{start}, {end}): start must be before end")]
    Malformed { start: i128, end: i128 },
    #[error("intersect_all needs at least one interval list")]
    EmptyIntersection,
    #[error("cannot amalgamate: prefix ends at {prefix_end} after fresh list starts at {fresh_start}")]
    Overlap { prefix_end: String, fresh_start: i128 },
    #[error("{what} must be strictly increasing")]
    Unsorted { what: &'static str },
    #[error("time point {t} lies after the evaluation horizon {now}")]
    BeyondHorizon { t: i128, now: i128 },
}

fn wide<T: TimePoint>(t: T) -> i128 {
    t.to_i128().unwrap_or(i128::MAX)
}

/// Upper bound of an interval. `At(e)` excludes `e` itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End<T> {
    At(T),
    Open,
}

impl<T: TimePoint> End<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            End::At(t) => Some(t),
            End::Open => None,
        }
    }

    pub fn is_open(self) -> bool {
        matches!(self, End::Open)
    }
}

impl<T: TimePoint> fmt::Display for End<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            End::At(t) => write!(f, "{t}"),
            End::Open => f.write_str("open"),
        }
    }
}

/// Closed-open interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval<T> {
    pub start: T,
    pub end: End<T>,
}

impl<T: TimePoint> Interval<T> {
    pub fn new(start: T, end: T) -> Result<Self, IntervalError> {
        if start < end {
            Ok(Interval { start, end: End::At(end) })
        } else {
            Err(IntervalError::Malformed { start: wide(start), end: wide(end) })
        }
    }

    /// Interval that holds from `start` onwards.
    pub fn since(start: T) -> Self {
        Interval { start, end: End::Open }
    }

    pub fn with_end(start: T, end: End<T>) -> Result<Self, IntervalError> {
        match end {
            End::At(e) => Self::new(start, e),
            End::Open => Ok(Self::since(start)),
        }
    }

    #[inline]
    pub fn contains(&self, t: T) -> bool {
        self.start <= t && End::At(t) < self.end
    }

    /// Number of points covered, `None` when open-ended.
    pub fn len(&self) -> Option<T> {
        self.end.finite().map(|e| e - self.start)
    }
}

impl<T: TimePoint> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.start, self.end)
    }
}

/// Canonical list of maximal intervals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntervalList<T> {
    items: Vec<Interval<T>>,
}

impl<T> Default for IntervalList<T> {
    fn default() -> Self {
        IntervalList { items: Vec::new() }
    }
}

impl<T: TimePoint> IntervalList<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Canonicalizes an arbitrary collection of well-formed intervals.
    pub fn normalize(raw: impl IntoIterator<Item = Interval<T>>) -> Result<Self, IntervalError> {
        let mut items: Vec<Interval<T>> = raw.into_iter().collect();
        for iv in &items {
            if let End::At(e) = iv.end {
                if iv.start >= e {
                    return Err(IntervalError::Malformed { start: wide(iv.start), end: wide(e) });
                }
            }
        }
        items.sort_unstable_by_key(|a| a.start);
        Ok(Self::merge_sorted(items))
    }

    /// Builds a list from `(start, end)` pairs, with `None` for an open end.
    pub fn from_bounds(pairs: &[(T, Option<T>)]) -> Result<Self, IntervalError> {
        let raw = pairs
            .iter()
            .map(|&(s, e)| Interval::with_end(s, e.map_or(End::Open, End::At)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::normalize(raw)
    }

    /// Builds a list from finite `(start, end)` pairs.
    pub fn from_pairs(pairs: &[(T, T)]) -> Result<Self, IntervalError> {
        let raw = pairs.iter().map(|&(s, e)| Interval::new(s, e)).collect::<Result<Vec<_>, _>>()?;
        Self::normalize(raw)
    }

    // Items must be sorted by start and individually well formed.
    fn merge_sorted(items: Vec<Interval<T>>) -> Self {
        let mut out: Vec<Interval<T>> = Vec::with_capacity(items.len());
        for iv in items {
            push_merge(&mut out, iv);
        }
        IntervalList { items: out }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval<T>> {
        self.items.iter()
    }

    pub fn as_slice(&self) -> &[Interval<T>] {
        &self.items
    }

    pub fn into_vec(self) -> Vec<Interval<T>> {
        self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn first(&self) -> Option<&Interval<T>> {
        self.items.first()
    }

    pub fn last(&self) -> Option<&Interval<T>> {
        self.items.last()
    }

    /// True iff `t` lies in one of the intervals.
    pub fn holds_at(&self, t: T) -> bool {
        let idx = self.items.partition_point(|iv| iv.start <= t);
        idx > 0 && self.items[idx - 1].contains(t)
    }

    /// Interval containing `t`, if any.
    pub fn interval_at(&self, t: T) -> Option<&Interval<T>> {
        let idx = self.items.partition_point(|iv| iv.start <= t);
        if idx > 0 && self.items[idx - 1].contains(t) {
            Some(&self.items[idx - 1])
        } else {
            None
        }
    }

    /// Splits the list at `t + 1`: the prefix holds every point `<= t`, the
    /// suffix every point `> t`.
    pub fn clip_before(&self, t: T) -> (Self, Self) {
        let cut = t.succ();
        let mut prefix = Vec::new();
        let mut suffix = Vec::new();
        for iv in &self.items {
            if iv.start >= cut {
                suffix.push(*iv);
            } else if iv.end <= End::At(cut) {
                prefix.push(*iv);
            } else {
                prefix.push(Interval { start: iv.start, end: End::At(cut) });
                suffix.push(Interval { start: cut, end: iv.end });
            }
        }
        (IntervalList { items: prefix }, IntervalList { items: suffix })
    }

    /// Points of the list inside `[lo, hi]`. An interval that still holds at
    /// `hi` is reported open-ended, since nothing is known past `hi`.
    pub fn restrict(&self, lo: T, hi: T) -> Self {
        let mut out = Vec::new();
        if lo > hi {
            return IntervalList { items: out };
        }
        let first = self.items.partition_point(|iv| iv.end <= End::At(lo));
        for iv in &self.items[first..] {
            if iv.start > hi {
                break;
            }
            let start = max(iv.start, lo);
            let end = if iv.end > End::At(hi) { End::Open } else { iv.end };
            out.push(Interval { start, end });
        }
        IntervalList { items: out }
    }

    pub fn start_points(&self) -> Vec<T> {
        self.items.iter().map(|iv| iv.start).collect()
    }

    /// Finite end bounds; an open tail contributes nothing.
    pub fn end_points(&self) -> Vec<T> {
        self.items.iter().filter_map(|iv| iv.end.finite()).collect()
    }

    /// Start points in `[lo, hi]`.
    pub fn starts_within(&self, lo: T, hi: T) -> impl Iterator<Item = T> + '_ {
        let first = self.items.partition_point(|iv| iv.start < lo);
        self.items[first..].iter().map(|iv| iv.start).take_while(move |&s| s <= hi)
    }

    /// Finite end points in `[lo, hi]`.
    pub fn ends_within(&self, lo: T, hi: T) -> impl Iterator<Item = T> + '_ {
        let first = self.items.partition_point(|iv| iv.end < End::At(lo));
        self.items[first..].iter().map_while(|iv| iv.end.finite()).take_while(move |&e| e <= hi)
    }
}

impl<T: TimePoint> fmt::Display for IntervalList<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, iv) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{iv}")?;
        }
        f.write_str("]")
    }
}

impl<'a, T> IntoIterator for &'a IntervalList<T> {
    type Item = &'a Interval<T>;
    type IntoIter = std::slice::Iter<'a, Interval<T>>;

    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

// Appends `iv` (whose start is >= every start already in `out`), merging
// with the tail when they overlap or abut.
fn push_merge<T: TimePoint>(out: &mut Vec<Interval<T>>, iv: Interval<T>) {
    if let Some(last) = out.last_mut() {
        if End::At(iv.start) <= last.end {
            if iv.end > last.end {
                last.end = iv.end;
            }
            return;
        }
    }
    out.push(iv);
}

/// Every point that belongs to at least one list.
pub fn union_all<T: TimePoint>(lists: &[IntervalList<T>]) -> IntervalList<T> {
    match lists {
        [] => IntervalList::new(),
        [only] => only.clone(),
        _ => {
            let mut items: Vec<Interval<T>> = lists.iter().flat_map(|l| l.items.iter().copied()).collect();
            items.sort_unstable_by_key(|a| a.start);
            IntervalList::merge_sorted(items)
        }
    }
}

fn intersect_pair<T: TimePoint>(a: &IntervalList<T>, b: &IntervalList<T>) -> IntervalList<T> {
    let (a, b) = (&a.items, &b.items);
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let start = max(a[i].start, b[j].start);
        let end = min(a[i].end, b[j].end);
        if End::At(start) < end {
            out.push(Interval { start, end });
        }
        match a[i].end.cmp(&b[j].end) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    IntervalList { items: out }
}

/// Every point that belongs to all lists. An empty `lists` is rejected:
/// "all time" has no finite representation.
pub fn intersect_all<T: TimePoint>(lists: &[IntervalList<T>]) -> Result<IntervalList<T>, IntervalError> {
    let (first, rest) = lists.split_first().ok_or(IntervalError::EmptyIntersection)?;
    let mut acc = first.clone();
    for l in rest {
        if acc.is_empty() {
            break;
        }
        acc = intersect_pair(&acc, l);
    }
    Ok(acc)
}

/// Every point of `base` that belongs to none of `lists`.
pub fn relative_complement_all<T: TimePoint>(base: &IntervalList<T>, lists: &[IntervalList<T>]) -> IntervalList<T> {
    let cover = union_all(lists);
    let cover = &cover.items;
    let mut out = Vec::new();
    let mut k = 0;
    for iv in &base.items {
        while k < cover.len() && cover[k].end <= End::At(iv.start) {
            k += 1;
        }
        let mut cursor = End::At(iv.start);
        let mut m = k;
        while m < cover.len() && End::At(cover[m].start) < iv.end {
            if let End::At(c) = cursor {
                if c < cover[m].start {
                    out.push(Interval { start: c, end: End::At(cover[m].start) });
                }
            }
            cursor = max(cursor, cover[m].end);
            if cursor >= iv.end {
                break;
            }
            m += 1;
        }
        if let End::At(c) = cursor {
            if End::At(c) < iv.end {
                out.push(Interval { start: c, end: iv.end });
            }
        }
    }
    IntervalList { items: out }
}

/// Joins a retained prefix (everything ending at or before the window
/// boundary) with freshly computed intervals; an abutting pair becomes one
/// maximal interval.
pub fn amalgamate<T: TimePoint>(
    prefix: &IntervalList<T>,
    fresh: &IntervalList<T>,
) -> Result<IntervalList<T>, IntervalError> {
    if let (Some(p), Some(f)) = (prefix.last(), fresh.first()) {
        if p.end > End::At(f.start) {
            return Err(IntervalError::Overlap { prefix_end: p.end.to_string(), fresh_start: wide(f.start) });
        }
    }
    let mut items = Vec::with_capacity(prefix.len() + fresh.len());
    items.extend_from_slice(&prefix.items);
    for iv in &fresh.items {
        push_merge(&mut items, *iv);
    }
    Ok(IntervalList { items })
}

fn check_increasing<T: TimePoint>(points: &[T], what: &'static str) -> Result<(), IntervalError> {
    if points.windows(2).all(|w| w[0] < w[1]) {
        Ok(())
    } else {
        Err(IntervalError::Unsorted { what })
    }
}

/// Inertia: builds the maximal intervals of a fluent-value from the points at
/// which it is initiated and broken.
///
/// A value initiated at `s` holds from `s + 1` until the first break `b > s`,
/// exclusive; with no such break it stays open. Re-initiation while the value
/// already holds does not split the interval.
pub fn make_intervals<T: TimePoint>(starts: &[T], breaks: &[T], now: T) -> Result<IntervalList<T>, IntervalError> {
    check_increasing(starts, "initiation points")?;
    check_increasing(breaks, "break points")?;
    for &t in starts.iter().chain(breaks) {
        if t > now {
            return Err(IntervalError::BeyondHorizon { t: wide(t), now: wide(now) });
        }
    }
    let mut out: Vec<Interval<T>> = Vec::new();
    // First break after the last start that produced an interval.
    let mut covered_until: Option<End<T>> = None;
    let mut bi = 0;
    for &s in starts {
        if let Some(limit) = covered_until {
            if End::At(s) < limit {
                continue;
            }
        }
        while bi < breaks.len() && breaks[bi] <= s {
            bi += 1;
        }
        let from = s.succ();
        match breaks.get(bi) {
            Some(&b) => {
                if from < b {
                    push_merge(&mut out, Interval { start: from, end: End::At(b) });
                }
                covered_until = Some(End::At(b));
            }
            None => {
                push_merge(&mut out, Interval::since(from));
                break;
            }
        }
    }
    Ok(IntervalList { items: out })
}
