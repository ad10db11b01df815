//! Windowed store of input records.

use std::collections::{BTreeMap, HashMap};

use smallvec::SmallVec;

use super::intern::Sym;
use crate::interval::{End, Interval, IntervalList};
use crate::{Span, Spans, Tick};

pub(crate) type Args = SmallVec<[Sym; 2]>;

/// Grounded fluent-value: name, arguments, value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct FKey {
    pub name: Sym,
    pub args: Args,
    pub value: Sym,
}

#[derive(Debug, Clone)]
pub(crate) struct EventOcc {
    pub t: Tick,
    pub args: Args,
    pub id: u64,
}

#[derive(Debug, Default, Clone)]
pub(crate) struct Durative {
    pub records: SmallVec<[(u64, Span); 2]>,
    /// The fluent-value held at the last window start.
    pub held_at_boundary: bool,
}

#[derive(Debug, Clone)]
enum Loc {
    Event { name: Sym, first: Option<Sym>, t: Tick },
    Interval { key: FKey },
}

#[derive(Debug, Clone)]
pub(crate) enum StoredPayload {
    Event { name: Sym, args: Args, t: Tick },
    Interval { key: FKey, span: Span },
}

/// Input events indexed by name and first argument; durative records by
/// grounded fluent-value.
#[derive(Debug, Default, Clone)]
pub(crate) struct SdeStore {
    pub events: HashMap<Sym, HashMap<Option<Sym>, Vec<EventOcc>>>,
    pub durative: HashMap<FKey, Durative>,
    ids: HashMap<String, (u64, Loc)>,
    next_serial: u64,
}

impl SdeStore {
    pub fn contains(&self, id: &str) -> bool {
        self.ids.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn insert(&mut self, id: &str, payload: StoredPayload) {
        let serial = self.next_serial;
        self.next_serial += 1;
        let loc = match payload {
            StoredPayload::Event { name, args, t } => {
                let first = args.first().copied();
                let occs = self.events.entry(name).or_default().entry(first).or_default();
                let at = occs.partition_point(|o| o.t <= t);
                occs.insert(at, EventOcc { t, args, id: serial });
                Loc::Event { name, first, t }
            }
            StoredPayload::Interval { key, span } => {
                self.durative.entry(key.clone()).or_default().records.push((serial, span));
                Loc::Interval { key }
            }
        };
        self.ids.insert(id.to_string(), (serial, loc));
    }

    /// Removes a record; false if the id is unknown.
    pub fn remove(&mut self, id: &str) -> bool {
        let Some((serial, loc)) = self.ids.remove(id) else {
            return false;
        };
        match loc {
            Loc::Event { name, first, t } => {
                if let Some(occs) = self.events.get_mut(&name).and_then(|m| m.get_mut(&first)) {
                    let lo = occs.partition_point(|o| o.t < t);
                    if let Some(pos) = occs[lo..].iter().position(|o| o.id == serial) {
                        occs.remove(lo + pos);
                    }
                }
            }
            Loc::Interval { key } => {
                if let Some(d) = self.durative.get_mut(&key) {
                    d.records.retain(|(s, _)| *s != serial);
                }
            }
        }
        true
    }

    /// Drops everything at or before `ws`, clipping durative records that
    /// straddle it, and records which fluent-values held at `ws`.
    pub fn forget(&mut self, ws: Tick) {
        let mut gone: Vec<u64> = Vec::new();
        for by_first in self.events.values_mut() {
            for occs in by_first.values_mut() {
                let cut = occs.partition_point(|o| o.t <= ws);
                gone.extend(occs.drain(..cut).map(|o| o.id));
            }
            by_first.retain(|_, occs| !occs.is_empty());
        }
        self.events.retain(|_, m| !m.is_empty());

        let cut = ws + 1;
        for d in self.durative.values_mut() {
            d.held_at_boundary = d.records.iter().any(|(_, iv)| iv.contains(ws));
            d.records.retain(|(serial, iv)| {
                if iv.end <= End::At(cut) {
                    gone.push(*serial);
                    false
                } else {
                    if iv.start < cut {
                        iv.start = cut;
                    }
                    true
                }
            });
        }
        self.durative.retain(|_, d| !d.records.is_empty() || d.held_at_boundary);

        if !gone.is_empty() {
            gone.sort_unstable();
            self.ids.retain(|_, (serial, _)| gone.binary_search(serial).is_err());
        }
    }

    /// Union of the records of a fluent-value within `[ws, qi]`, with the
    /// boundary marker `[ws, ws+1)` when it held at `ws`. Holding at `qi`
    /// is reported open-ended.
    pub fn view(&self, d: &Durative, ws: Tick, qi: Tick) -> Spans {
        let marker = d.held_at_boundary.then(|| Interval { start: ws, end: End::At(ws + 1) });
        let raw = d.records.iter().map(|(_, iv)| *iv).chain(marker);
        IntervalList::normalize(raw).expect("stored intervals are well formed").restrict(ws, qi)
    }

    /// Event occurrences in `(lo, hi]`.
    pub fn events_in(occs: &[EventOcc], lo: Tick, hi: Tick) -> &[EventOcc] {
        let a = occs.partition_point(|o| o.t <= lo);
        let b = occs.partition_point(|o| o.t <= hi);
        &occs[a..b.max(a)]
    }

    /// Entities mentioned by resident records and boundary markers.
    pub fn entities(&self) -> impl Iterator<Item = Sym> + '_ {
        let ev = self
            .events
            .values()
            .flat_map(|m| m.values())
            .flat_map(|occs| occs.iter().flat_map(|o| o.args.iter().copied()));
        let du = self.durative.keys().flat_map(|k| k.args.iter().copied());
        ev.chain(du)
    }

    /// Earliest time point of any resident content, boundary markers aside.
    pub fn earliest(&self) -> Option<Tick> {
        let ev = self.events.values().flat_map(|m| m.values()).filter_map(|occs| occs.first().map(|o| o.t));
        let du = self.durative.values().flat_map(|d| d.records.iter().map(|(_, iv)| iv.start));
        ev.chain(du).min()
    }

    /// Resident events as `(name, args, t)`.
    pub fn event_list(&self) -> Vec<(Sym, Args, Tick)> {
        let mut out: Vec<(Sym, Args, Tick)> = Vec::new();
        for (name, by_first) in &self.events {
            for occs in by_first.values() {
                out.extend(occs.iter().map(|o| (*name, o.args.clone(), o.t)));
            }
        }
        out.sort();
        out
    }

    /// Resident durative content per fluent-value, deterministic order.
    pub fn durative_list(&self) -> BTreeMap<FKey, (Vec<Span>, bool)> {
        self.durative
            .iter()
            .map(|(k, d)| {
                let mut ivs: Vec<Span> = d.records.iter().map(|(_, iv)| *iv).collect();
                ivs.sort();
                (k.clone(), (ivs, d.held_at_boundary))
            })
            .collect()
    }
}
