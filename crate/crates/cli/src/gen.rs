//! Synthetic surveillance streams.

use evcalc_core::stream::{InputRecord, Payload};
use evcalc_core::Tick;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Frame size in pixels.
const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
/// Horizontal distance between copies, far beyond any closeness threshold.
const COPY_OFFSET: f64 = 10_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub entities: usize,
    /// Stream length in ticks (frames).
    pub duration: Tick,
    pub seed: u64,
    pub copies: usize,
}

impl GenSpec {
    pub fn validate(&self) -> Result<(), String> {
        if self.entities < 2 {
            return Err("at least two entities are needed".into());
        }
        if self.copies < 1 {
            return Err("at least one copy is needed".into());
        }
        if self.duration < 20 {
            return Err("duration must be at least 20 ticks".into());
        }
        Ok(())
    }
}

const ACTIVITIES: [(&str, f64, f64); 5] = [
    ("walking", 0.4, 1.0),
    ("active", 0.25, 0.0),
    ("inactive", 0.15, 0.0),
    ("running", 0.1, 3.0),
    ("abrupt", 0.1, 0.5),
];

struct Track {
    name: String,
    appear: Tick,
    disappear: Option<Tick>,
    /// Activity and position per frame from `appear`.
    frames: Vec<(&'static str, f64, f64)>,
}

fn person(rng: &mut ChaCha8Rng, name: String, duration: Tick) -> Track {
    let appear = rng.gen_range(0..(duration / 10).max(1));
    let disappear = rng.gen_bool(0.5).then(|| rng.gen_range(duration * 8 / 10..duration));
    let end = disappear.unwrap_or(duration);
    let (mut x, mut y) = (rng.gen_range(0.0..WIDTH), rng.gen_range(0.0..HEIGHT));
    let mut frames = Vec::with_capacity((end - appear) as usize);
    while (frames.len() as Tick) < end - appear {
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        let &(act, _, speed) = ACTIVITIES
            .iter()
            .find(|(_, w, _)| {
                acc += w;
                r < acc
            })
            .unwrap_or(&ACTIVITIES[0]);
        let len = if act == "abrupt" { rng.gen_range(10..50) } else { rng.gen_range(100..600) };
        let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let (mut dx, mut dy) = (speed * angle.cos(), speed * angle.sin());
        for _ in 0..len {
            if frames.len() as Tick >= end - appear {
                break;
            }
            if !(0.0..=WIDTH).contains(&(x + dx)) {
                dx = -dx;
            }
            if !(0.0..=HEIGHT).contains(&(y + dy)) {
                dy = -dy;
            }
            x += dx;
            y += dy;
            frames.push((act, x, y));
        }
    }
    Track { name, appear, disappear, frames }
}

/// An object left next to a person who is present when it appears.
fn object(rng: &mut ChaCha8Rng, name: String, duration: Tick, people: &[Track]) -> Track {
    let appear = rng.gen_range(duration / 10..(duration / 2).max(duration / 10 + 1));
    let near = people
        .iter()
        .filter(|p| p.appear <= appear && (appear - p.appear) < p.frames.len() as Tick)
        .collect::<Vec<_>>()
        .choose(rng)
        .map(|p| p.frames[(appear - p.appear) as usize]);
    let (x, y) = match near {
        Some((_, px, py)) => (px + rng.gen_range(5.0..15.0), py + rng.gen_range(5.0..15.0)),
        None => (rng.gen_range(0.0..WIDTH), rng.gen_range(0.0..HEIGHT)),
    };
    let stay = rng.gen_range(duration / 5..(duration / 2).max(duration / 5 + 1));
    let disappear = (appear + stay < duration).then_some(appear + stay);
    let end = disappear.unwrap_or(duration);
    Track { name, appear, disappear, frames: vec![("inactive", x, y); (end - appear) as usize] }
}

fn base_tracks(spec: &GenSpec) -> Vec<Track> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let names: Vec<(String, bool)> = (0..spec.entities).map(|i| (format!("id{i}"), i % 5 == 4)).collect();
    let mut people: Vec<Track> =
        names.iter().filter(|(_, obj)| !obj).map(|(n, _)| person(&mut rng, n.clone(), spec.duration)).collect();
    let objects: Vec<Track> = names
        .iter()
        .filter(|(_, obj)| *obj)
        .map(|(n, _)| object(&mut rng, n.clone(), spec.duration, &people))
        .collect();
    people.extend(objects);
    people.sort_by_key(|t| names.iter().position(|(n, _)| *n == t.name));
    people
}

fn emit(track: &Track, name: &str, dx: f64, out: &mut Vec<InputRecord>) {
    let ev = |kind: &str, t: Tick| {
        InputRecord::assert(
            format!("{name}:{kind}:{t}"),
            Payload::Event { name: kind.into(), args: vec![name.into()], t },
        )
    };
    out.push(ev("appear", track.appear));
    for (i, &(act, x, y)) in track.frames.iter().enumerate() {
        let t = track.appear + i as Tick;
        out.push(InputRecord::assert(
            format!("{name}:{act}:{t}"),
            Payload::Interval {
                name: act.into(),
                args: vec![name.into()],
                value: "true".into(),
                from: t,
                to: Some(t + 1),
            },
        ));
        out.push(InputRecord::assert(
            format!("{name}:xy:{t}"),
            Payload::Coord { entity: name.into(), t, x: x + dx, y },
        ));
    }
    if let Some(d) = track.disappear {
        out.push(ev("disappear", d));
    }
}

/// Per-frame activity intervals, coordinates and appear/disappear events.
/// Copy `k > 0` renames every entity `e` to `e_k` and shifts it away from
/// the other copies. Records come out ordered by time, then id.
pub fn generate(spec: &GenSpec) -> Vec<InputRecord> {
    let tracks = base_tracks(spec);
    let mut out = Vec::new();
    for k in 0..spec.copies {
        for t in &tracks {
            let name = if k == 0 { t.name.clone() } else { format!("{}_{k}", t.name) };
            emit(t, &name, k as f64 * COPY_OFFSET, &mut out);
        }
    }
    out.sort_by(|a, b| (a.occurrence(), &a.id).cmp(&(b.occurrence(), &b.id)));
    out
}
