//! Seeded arrival-delay simulation.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::record::InputRecord;
use super::StreamError;
use crate::Tick;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delay {
    /// Leave arrivals untouched.
    None,
    Fixed(Tick),
    /// Uniform on `lo..=hi`.
    Uniform {
        lo: Tick,
        hi: Tick,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DelayModel {
    pub delay: Delay,
    pub seed: u64,
}

impl DelayModel {
    pub fn none() -> Self {
        DelayModel { delay: Delay::None, seed: 0 }
    }

    pub fn fixed(d: Tick) -> Self {
        DelayModel { delay: Delay::Fixed(d), seed: 0 }
    }

    pub fn uniform(lo: Tick, hi: Tick, seed: u64) -> Self {
        DelayModel { delay: Delay::Uniform { lo, hi }, seed }
    }

    fn check(&self) -> Result<(), StreamError> {
        match self.delay {
            Delay::Fixed(d) if d < 0 => Err(StreamError::InvalidDelay(format!("fixed delay {d} is negative"))),
            Delay::Uniform { lo, hi } if lo < 0 || hi < lo => {
                Err(StreamError::InvalidDelay(format!("uniform({lo}, {hi}) needs 0 <= lo <= hi")))
            }
            _ => Ok(()),
        }
    }
}

/// Sets `arrival = base + delay` for every record and sorts by arrival, then
/// occurrence, then id. The base is the record's own arrival if present,
/// otherwise its occurrence; retractions inherit the occurrence of the last
/// earlier record with the same id.
pub fn simulate_delays(records: Vec<InputRecord>, model: DelayModel) -> Result<Vec<InputRecord>, StreamError> {
    model.check()?;
    if model.delay == Delay::None {
        return Ok(records);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let mut last_occurrence: HashMap<String, Tick> = HashMap::new();
    let mut keyed: Vec<(Tick, Tick, InputRecord)> = Vec::with_capacity(records.len());
    for mut r in records {
        let occurrence = match r.occurrence() {
            Some(o) => o,
            None => last_occurrence.get(&r.id).copied().or(r.arrival).unwrap_or(0),
        };
        last_occurrence.insert(r.id.clone(), occurrence);
        let base = r.arrival.unwrap_or(occurrence);
        let d = match model.delay {
            Delay::None => 0,
            Delay::Fixed(d) => d,
            Delay::Uniform { lo, hi } => rng.gen_range(lo..=hi),
        };
        r.arrival = Some(base + d);
        keyed.push((base + d, occurrence, r));
    }
    keyed.sort_by(|a, b| (a.0, a.1, &a.2.id).cmp(&(b.0, b.1, &b.2.id)));
    Ok(keyed.into_iter().map(|(_, _, r)| r).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream() -> Vec<InputRecord> {
        (0..40)
            .map(|i| {
                if i % 3 == 0 {
                    InputRecord::interval(format!("r{i:02}"), "walking", &["p"], i * 5, Some(i * 5 + 4))
                } else {
                    InputRecord::event(format!("r{i:02}"), "appear", &["o"], i * 5)
                }
            })
            .collect()
    }

    #[test]
    fn none_is_identity() {
        assert_eq!(simulate_delays(stream(), DelayModel::none()).unwrap(), stream());
    }

    #[test]
    fn fixed_zero_keeps_order() {
        let out = simulate_delays(stream(), DelayModel::fixed(0)).unwrap();
        let ids: Vec<_> = out.iter().map(|r| r.id.clone()).collect();
        let want: Vec<_> = stream().iter().map(|r| r.id.clone()).collect();
        assert_eq!(ids, want);
        assert!(out.iter().all(|r| r.arrival == r.occurrence()));
    }

    #[test]
    fn fixed_shift() {
        let out = simulate_delays(stream(), DelayModel::fixed(7)).unwrap();
        assert!(out.iter().all(|r| r.arrival == r.occurrence().map(|o| o + 7)));
    }

    #[test]
    fn uniform_is_deterministic_and_bounded() {
        let a = simulate_delays(stream(), DelayModel::uniform(0, 50, 9)).unwrap();
        let b = simulate_delays(stream(), DelayModel::uniform(0, 50, 9)).unwrap();
        assert_eq!(a, b);
        let c = simulate_delays(stream(), DelayModel::uniform(0, 50, 10)).unwrap();
        assert_ne!(a, c);
        for r in &a {
            let d = r.arrival.unwrap() - r.occurrence().unwrap();
            assert!((0..=50).contains(&d));
        }
        assert!(a.windows(2).all(|w| w[0].arrival <= w[1].arrival));
    }

    #[test]
    fn retractions_follow_their_record() {
        let recs = vec![InputRecord::event("a", "appear", &["o"], 10), InputRecord::retract("a", 12)];
        let out = simulate_delays(recs, DelayModel::fixed(3)).unwrap();
        assert_eq!(out[1].arrival, Some(15));
    }

    #[test]
    fn rejects_negative_delays() {
        assert!(simulate_delays(stream(), DelayModel::fixed(-1)).is_err());
        assert!(simulate_delays(stream(), DelayModel::uniform(5, 2, 0)).is_err());
    }
}
