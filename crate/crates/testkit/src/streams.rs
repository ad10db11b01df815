//! Random input streams.

use evcalc_core::stream::{InputRecord, Payload};
use evcalc_core::Tick;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{self, Points};

/// Shape of a random surveillance-style stream.
#[derive(Debug, Clone, Copy)]
pub struct StreamSpec {
    pub entities: usize,
    pub horizon: Tick,
    /// Most intervals per entity and fluent.
    pub per_fluent: usize,
    pub max_len: Tick,
    /// Probability that an interval record is left open.
    pub open: f64,
}

impl Default for StreamSpec {
    fn default() -> Self {
        StreamSpec { entities: 4, horizon: 300, per_fluent: 3, max_len: 60, open: 0.05 }
    }
}

struct Ids(usize);

impl Ids {
    fn next(&mut self) -> String {
        self.0 += 1;
        format!("r{}", self.0)
    }
}

fn interval(ids: &mut Ids, rng: &mut impl Rng, spec: &StreamSpec, name: &str, args: &[String]) -> InputRecord {
    let from = rng.gen_range(0..spec.horizon);
    let to = (!rng.gen_bool(spec.open)).then(|| from + rng.gen_range(1..=spec.max_len));
    InputRecord::assert(
        ids.next(),
        Payload::Interval { name: name.into(), args: args.to_vec(), value: "true".into(), from, to },
    )
}

fn event(ids: &mut Ids, rng: &mut impl Rng, spec: &StreamSpec, name: &str, args: &[String]) -> InputRecord {
    InputRecord::assert(
        ids.next(),
        Payload::Event { name: name.into(), args: args.to_vec(), t: rng.gen_range(0..spec.horizon) },
    )
}

fn sort_by_occurrence(mut records: Vec<InputRecord>) -> Vec<InputRecord> {
    records.sort_by_key(|r| r.occurrence());
    records
}

pub fn entity_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("e{i}")).collect()
}

/// In-order stream over the surveillance input vocabulary. `close` is
/// asserted for both orders of a pair.
pub fn surveillance(rng: &mut impl Rng, spec: &StreamSpec) -> Vec<InputRecord> {
    let names = entity_names(spec.entities);
    let mut ids = Ids(0);
    let mut out = Vec::new();
    for e in &names {
        let arg = std::slice::from_ref(e);
        for f in ["walking", "active", "inactive", "running", "abrupt"] {
            for _ in 0..rng.gen_range(0..=spec.per_fluent) {
                out.push(interval(&mut ids, rng, spec, f, arg));
            }
        }
        for ev in ["appear", "disappear"] {
            for _ in 0..rng.gen_range(0..=2) {
                out.push(event(&mut ids, rng, spec, ev, arg));
            }
        }
    }
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            for _ in 0..rng.gen_range(0..=spec.per_fluent) {
                let r = interval(&mut ids, rng, spec, "close", &[a.clone(), b.clone()]);
                let mut back = r.clone();
                back.id = ids.next();
                if let Some(Payload::Interval { args, .. }) = &mut back.payload {
                    args.reverse();
                }
                out.push(r);
                out.push(back);
            }
        }
    }
    sort_by_occurrence(out)
}

/// In-order stream over the vocabulary of [`crate::MIXED`].
pub fn mixed(rng: &mut impl Rng, spec: &StreamSpec) -> Vec<InputRecord> {
    let names = entity_names(spec.entities);
    let mut ids = Ids(0);
    let mut out = Vec::new();
    for e in &names {
        let arg = std::slice::from_ref(e);
        for f in ["a", "b", "c"] {
            for _ in 0..rng.gen_range(0..=spec.per_fluent) {
                out.push(interval(&mut ids, rng, spec, f, arg));
            }
        }
        for ev in ["ping", "ping", "reset"] {
            for _ in 0..rng.gen_range(0..=2) {
                out.push(event(&mut ids, rng, spec, ev, arg));
            }
        }
    }
    sort_by_occurrence(out)
}

/// Disjoint, non-abutting random intervals in `[0, horizon)`.
fn separated(rng: &mut impl Rng, horizon: Tick, max: usize, max_len: Tick) -> Vec<(Tick, Tick)> {
    let mut cuts: Vec<Tick> = (0..2 * rng.gen_range(1..=max)).map(|_| rng.gen_range(0..horizon)).collect();
    cuts.sort_unstable();
    cuts.dedup();
    // Sorted distinct cuts taken in pairs never touch.
    cuts.chunks_exact(2).map(|c| (c[0], c[1].min(c[0] + max_len))).collect()
}

/// Walking of `p1` and `p2` and their closeness, such that every maximal
/// overlap of the three lasts at least two ticks.
pub fn walking_and_close(rng: &mut impl Rng, horizon: Tick) -> Vec<InputRecord> {
    loop {
        let w1 = separated(rng, horizon, 4, horizon / 2);
        let w2 = separated(rng, horizon, 4, horizon / 2);
        let c = separated(rng, horizon, 4, horizon / 2);
        let set = |v: &[(Tick, Tick)]| -> Points { v.iter().flat_map(|&(a, b)| a..b).collect() };
        let (s1, s2, s3) = (set(&w1), set(&w2), set(&c));
        let both: Points = s1.iter().filter(|t| s2.contains(t) && s3.contains(t)).copied().collect();
        if algebra::runs(&both).iter().any(|(a, b)| b - a < 2) {
            continue;
        }
        let mut ids = Ids(0);
        let mut out = Vec::new();
        let mut push = |name: &str, args: &[&str], v: &[(Tick, Tick)]| {
            for &(a, b) in v {
                out.push(InputRecord::interval(ids.next(), name, args, a, Some(b)));
            }
        };
        push("walking", &["p1"], &w1);
        push("walking", &["p2"], &w2);
        push("close", &["p1", "p2"], &c);
        push("close", &["p2", "p1"], &c);
        return sort_by_occurrence(out);
    }
}

/// Adds retractions and updates of random records. Each revision arrives
/// within `lag` ticks of the original occurrence; updated content never
/// moves earlier.
pub fn with_revisions(rng: &mut impl Rng, records: &[InputRecord], count: usize, lag: Tick) -> Vec<InputRecord> {
    let mut out: Vec<InputRecord> = records.to_vec();
    let mut picks: Vec<&InputRecord> = records.iter().filter(|r| r.payload.is_some()).collect();
    picks.shuffle(rng);
    for r in picks.into_iter().take(count) {
        let occ = r.occurrence().unwrap_or(0);
        let arrival = occ + rng.gen_range(0..lag.max(1));
        if rng.gen_bool(0.5) {
            out.push(InputRecord::retract(r.id.clone(), arrival));
        } else {
            let shift = rng.gen_range(0..10);
            let payload = match r.payload.clone() {
                Some(Payload::Event { name, args, t }) => Payload::Event { name, args, t: t + shift },
                Some(Payload::Interval { name, args, value, from, to }) => {
                    let from = from + shift;
                    let to = to.map(|e| (e + rng.gen_range(-10..10)).max(from + 1));
                    Payload::Interval { name, args, value, from, to }
                }
                Some(p) => p,
                None => continue,
            };
            out.push(InputRecord::update(r.id.clone(), arrival, payload));
        }
    }
    out.sort_by_key(|r| r.effective_arrival());
    out
}
