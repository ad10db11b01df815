//! Command implementations behind the `evcalc` binary.

pub mod bench;
pub mod gen;

use std::path::Path;

use anyhow::{bail, Context, Result};
use evcalc_core::packs::SURVEILLANCE;
use evcalc_core::rules::{load, EventDescription};
use evcalc_core::stream::{with_closeness, InputRecord, Payload};
use evcalc_core::Tick;

/// Loads a rule file, or the bundled surveillance pack when `path` is
/// `None`.
pub fn load_rules(path: Option<&Path>) -> Result<EventDescription> {
    let (text, origin) = match path {
        Some(p) => {
            (std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?, p.display().to_string())
        }
        None => (SURVEILLANCE.to_string(), "bundled surveillance pack".to_string()),
    };
    let ed = load(&text).with_context(|| format!("loading rules from {origin}"))?;
    for w in &ed.warnings {
        log::warn!("{w}");
    }
    Ok(ed)
}

/// Turns coordinate samples into `close` records. A threshold is required
/// as soon as the stream carries coordinates.
pub fn prepare_records(records: Vec<InputRecord>, threshold: Option<f64>) -> Result<Vec<InputRecord>> {
    let has_coords = records.iter().any(|r| matches!(r.payload, Some(Payload::Coord { .. })));
    match (has_coords, threshold) {
        (false, _) => Ok(records),
        (true, None) => bail!("the input has coordinate samples; pass --close-threshold"),
        (true, Some(p)) => Ok(with_closeness(records, p)?),
    }
}

/// Parses a duration given in ticks (`250`), seconds (`10s`) or
/// milliseconds (`400ms`).
pub fn parse_ticks(s: &str, tick_ms: f64) -> Result<Tick> {
    let s = s.trim();
    let ms = if let Some(v) = s.strip_suffix("ms") {
        v.trim().parse::<f64>()?
    } else if let Some(v) = s.strip_suffix('s') {
        v.trim().parse::<f64>()? * 1000.0
    } else {
        return s.parse::<Tick>().with_context(|| format!("invalid duration `{s}`"));
    };
    let ticks = ms / tick_ms;
    if (ticks - ticks.round()).abs() > 1e-9 {
        bail!("{s} is not a whole number of {tick_ms} ms ticks");
    }
    Ok(ticks.round() as Tick)
}
