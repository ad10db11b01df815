//! Coordinate samples to durative `close` records.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_traits::Float;

use super::record::{Action, InputRecord, Payload};
use super::StreamError;
use crate::Tick;

#[derive(Debug, Clone, PartialEq)]
pub struct CoordSample<F> {
    pub entity: String,
    pub t: Tick,
    pub x: F,
    pub y: F,
    pub arrival: Option<Tick>,
}

/// Final coordinate samples of a record stream: updates replace, retractions
/// remove. The sample's arrival is that of its latest revision.
pub fn coord_samples(records: &[InputRecord]) -> Vec<CoordSample<f64>> {
    let mut by_id: HashMap<&str, (usize, CoordSample<f64>)> = HashMap::new();
    for (i, r) in records.iter().enumerate() {
        match (&r.action, &r.payload) {
            (Action::Retract, _) => {
                by_id.remove(r.id.as_str());
            }
            (_, Some(Payload::Coord { entity, t, x, y })) => {
                let order = by_id.get(r.id.as_str()).map_or(i, |(o, _)| *o);
                let sample = CoordSample { entity: entity.clone(), t: *t, x: *x, y: *y, arrival: r.arrival };
                by_id.insert(&r.id, (order, sample));
            }
            _ => {}
        }
    }
    let mut out: Vec<(usize, CoordSample<f64>)> = by_id.into_values().collect();
    out.sort_by_key(|(o, _)| *o);
    out.into_iter().map(|(_, s)| s).collect()
}

#[derive(Clone, Copy)]
struct Run {
    from: Tick,
    last: Tick,
    arrival: Option<Tick>,
}

/// Durative `close(a, b) = true` records: the pair is close at `t` iff both
/// entities have a sample at `t` within `threshold` pixels of each other.
/// Consecutive close ticks form one record unless their availability
/// differs; a tick becomes available when both of its samples have arrived.
/// With `pairs = None` every ordered pair of sampled entities is covered.
pub fn closeness<F: Float>(
    samples: &[CoordSample<F>],
    pairs: Option<&[(String, String)]>,
    threshold: F,
) -> Result<Vec<InputRecord>, StreamError> {
    if threshold.is_nan() || threshold < F::zero() {
        return Err(StreamError::InvalidThreshold);
    }
    let limit = threshold * threshold;

    let mut names: Vec<&str> = samples.iter().map(|s| s.entity.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    let index: HashMap<&str, u32> = names.iter().enumerate().map(|(i, n)| (*n, i as u32)).collect();
    let wanted: Option<HashSet<(u32, u32)>> = pairs
        .map(|ps| ps.iter().filter_map(|(a, b)| Some((*index.get(a.as_str())?, *index.get(b.as_str())?))).collect());

    let mut by_tick: BTreeMap<Tick, Vec<(u32, &CoordSample<F>)>> = BTreeMap::new();
    for s in samples {
        by_tick.entry(s.t).or_default().push((index[s.entity.as_str()], s));
    }

    let mut open: HashMap<(u32, u32), Run> = HashMap::new();
    let mut done: Vec<((u32, u32), Run)> = Vec::new();
    for (&t, at) in &by_tick {
        for (i, (ea, a)) in at.iter().enumerate() {
            for (eb, b) in &at[i + 1..] {
                if ea == eb {
                    continue;
                }
                let (dx, dy) = (a.x - b.x, a.y - b.y);
                if dx * dx + dy * dy > limit {
                    continue;
                }
                let key = if ea < eb { (*ea, *eb) } else { (*eb, *ea) };
                let arrival = match (a.arrival, b.arrival) {
                    (None, None) => None,
                    (x, y) => Some(x.unwrap_or(t).max(y.unwrap_or(t))),
                };
                match open.get_mut(&key) {
                    Some(run) if run.last == t - 1 && run.arrival == arrival => run.last = t,
                    Some(run) => {
                        done.push((key, *run));
                        *run = Run { from: t, last: t, arrival };
                    }
                    None => {
                        open.insert(key, Run { from: t, last: t, arrival });
                    }
                }
            }
        }
    }
    done.extend(open);

    let mut out = Vec::new();
    for ((a, b), run) in done {
        for (x, y) in [(a, b), (b, a)] {
            if wanted.as_ref().is_some_and(|w| !w.contains(&(x, y))) {
                continue;
            }
            let (nx, ny) = (names[x as usize], names[y as usize]);
            out.push(InputRecord {
                id: format!("close:{nx}:{ny}:{}", run.from),
                arrival: run.arrival,
                action: Action::Assert,
                payload: Some(Payload::Interval {
                    name: "close".into(),
                    args: vec![nx.to_string(), ny.to_string()],
                    value: "true".into(),
                    from: run.from,
                    to: Some(run.last + 1),
                }),
            });
        }
    }
    out.sort_by(|p, q| {
        let key = |r: &InputRecord| (r.effective_arrival(), r.occurrence(), r.id.clone());
        key(p).cmp(&key(q))
    });
    Ok(out)
}

/// Replaces the coordinate samples of a stream with `close` records and
/// merges them in by arrival.
pub fn with_closeness(records: Vec<InputRecord>, threshold: f64) -> Result<Vec<InputRecord>, StreamError> {
    let samples = coord_samples(&records);
    if samples.is_empty() {
        return Ok(records);
    }
    let close = closeness(&samples, None, threshold)?;
    let rest: Vec<InputRecord> =
        records.into_iter().filter(|r| !matches!(r.payload, Some(Payload::Coord { .. }))).collect();
    Ok(merge_by_arrival(rest, close))
}

// Stable merge of two arrival-ordered streams.
fn merge_by_arrival(a: Vec<InputRecord>, b: Vec<InputRecord>) -> Vec<InputRecord> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut b = b.into_iter().peekable();
    for r in a {
        let ra = r.effective_arrival().unwrap_or(Tick::MIN);
        while let Some(x) = b.peek() {
            if x.effective_arrival().unwrap_or(Tick::MIN) < ra {
                out.push(b.next().expect("peeked"));
            } else {
                break;
            }
        }
        out.push(r);
    }
    out.extend(b);
    out
}
