//! Input records and their JSONL wire form.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::StreamError;
use crate::Tick;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    #[default]
    Assert,
    Retract,
    /// Atomic retract and assert under the same id.
    Update,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    /// Instantaneous input event.
    Event { name: String, args: Vec<String>, t: Tick },
    /// Durative input fluent-value over `[from, to)`; `to = None` means it
    /// still holds.
    Interval { name: String, args: Vec<String>, value: String, from: Tick, to: Option<Tick> },
    /// Position sample in pixels, consumed by the closeness preprocessor.
    Coord { entity: String, t: Tick, x: f64, y: f64 },
}

impl Payload {
    /// Earliest time point the payload talks about.
    pub fn occurrence(&self) -> Tick {
        match self {
            Payload::Event { t, .. } | Payload::Coord { t, .. } => *t,
            Payload::Interval { from, .. } => *from,
        }
    }

    /// Constants mentioned as arguments.
    pub fn entities(&self) -> Box<dyn Iterator<Item = &str> + '_> {
        match self {
            Payload::Event { args, .. } | Payload::Interval { args, .. } => Box::new(args.iter().map(String::as_str)),
            Payload::Coord { entity, .. } => Box::new(std::iter::once(entity.as_str())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputRecord {
    pub id: String,
    /// Stream time at which the record becomes available; `None` means it
    /// arrives at its occurrence time.
    pub arrival: Option<Tick>,
    pub action: Action,
    /// Absent for retractions.
    pub payload: Option<Payload>,
}

impl InputRecord {
    pub fn assert(id: impl Into<String>, payload: Payload) -> Self {
        InputRecord { id: id.into(), arrival: None, action: Action::Assert, payload: Some(payload) }
    }

    pub fn retract(id: impl Into<String>, arrival: Tick) -> Self {
        InputRecord { id: id.into(), arrival: Some(arrival), action: Action::Retract, payload: None }
    }

    pub fn update(id: impl Into<String>, arrival: Tick, payload: Payload) -> Self {
        InputRecord { id: id.into(), arrival: Some(arrival), action: Action::Update, payload: Some(payload) }
    }

    pub fn event(id: impl Into<String>, name: &str, args: &[&str], t: Tick) -> Self {
        Self::assert(id, Payload::Event { name: name.into(), args: strings(args), t })
    }

    pub fn interval(id: impl Into<String>, name: &str, args: &[&str], from: Tick, to: Option<Tick>) -> Self {
        Self::assert(id, Payload::Interval { name: name.into(), args: strings(args), value: "true".into(), from, to })
    }

    pub fn coord(id: impl Into<String>, entity: &str, t: Tick, x: f64, y: f64) -> Self {
        Self::assert(id, Payload::Coord { entity: entity.into(), t, x, y })
    }

    pub fn with_arrival(mut self, arrival: Tick) -> Self {
        self.arrival = Some(arrival);
        self
    }

    pub fn occurrence(&self) -> Option<Tick> {
        self.payload.as_ref().map(Payload::occurrence)
    }

    /// Arrival time, defaulting to the occurrence time.
    pub fn effective_arrival(&self) -> Option<Tick> {
        self.arrival.or_else(|| self.occurrence())
    }
}

fn strings(args: &[&str]) -> Vec<String> {
    args.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Event,
    Interval,
    Coord,
}

// Flat wire form; `to` distinguishes "absent" from "null" only on output.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    arrival: Option<Tick>,
    action: Action,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind: Option<Kind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    args: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<Tick>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    from: Option<Tick>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    to: Option<Option<Tick>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    entity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y: Option<f64>,
}

fn need<T>(v: Option<T>, field: &str, kind: &str) -> Result<T, String> {
    v.ok_or_else(|| format!("{kind} record needs `{field}`"))
}

impl Raw {
    fn into_record(self) -> Result<InputRecord, String> {
        let payload = match (self.action, self.kind) {
            (Action::Retract, _) => None,
            (_, None) => return Err("assert and update records need `kind`".into()),
            (_, Some(Kind::Event)) => Some(Payload::Event {
                name: need(self.name, "name", "event")?,
                args: self.args.unwrap_or_default(),
                t: need(self.t, "t", "event")?,
            }),
            (_, Some(Kind::Interval)) => {
                let from = need(self.from, "from", "interval")?;
                let to = self.to.flatten();
                if to.is_some_and(|to| to <= from) {
                    return Err(format!("interval [{from}, {}) is empty", to.unwrap_or_default()));
                }
                Some(Payload::Interval {
                    name: need(self.name, "name", "interval")?,
                    args: self.args.unwrap_or_default(),
                    value: self.value.unwrap_or_else(|| "true".into()),
                    from,
                    to,
                })
            }
            (_, Some(Kind::Coord)) => Some(Payload::Coord {
                entity: need(self.entity, "entity", "coord")?,
                t: need(self.t, "t", "coord")?,
                x: need(self.x, "x", "coord")?,
                y: need(self.y, "y", "coord")?,
            }),
        };
        if let Some(p) = &payload {
            if p.occurrence() < 0 {
                return Err("time points must be non-negative".into());
            }
        }
        Ok(InputRecord { id: self.id, arrival: self.arrival, action: self.action, payload })
    }

    fn from_record(r: &InputRecord) -> Raw {
        let mut raw = Raw { id: r.id.clone(), arrival: r.arrival, action: r.action, ..Raw::default() };
        match &r.payload {
            None => {}
            Some(Payload::Event { name, args, t }) => {
                raw.kind = Some(Kind::Event);
                raw.name = Some(name.clone());
                raw.args = Some(args.clone());
                raw.t = Some(*t);
            }
            Some(Payload::Interval { name, args, value, from, to }) => {
                raw.kind = Some(Kind::Interval);
                raw.name = Some(name.clone());
                raw.args = Some(args.clone());
                raw.value = Some(value.clone());
                raw.from = Some(*from);
                raw.to = Some(*to);
            }
            Some(Payload::Coord { entity, t, x, y }) => {
                raw.kind = Some(Kind::Coord);
                raw.entity = Some(entity.clone());
                raw.t = Some(*t);
                raw.x = Some(*x);
                raw.y = Some(*y);
            }
        }
        raw
    }
}

/// Problem that does not stop reading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StreamDiagnostic {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for StreamDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Parses one JSONL line.
pub fn parse_record(line: &str) -> Result<InputRecord, String> {
    let raw: Raw = serde_json::from_str(line).map_err(|e| e.to_string())?;
    raw.into_record()
}

/// Reads a JSONL stream. Blank lines are skipped. Malformed lines and
/// assertions of an id that is still live are errors; revisions of unknown
/// ids are reported as diagnostics and kept.
pub fn read_records(reader: impl BufRead) -> Result<(Vec<InputRecord>, Vec<StreamDiagnostic>), StreamError> {
    let mut records = Vec::new();
    let mut diagnostics = Vec::new();
    let mut live: HashSet<String> = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = parse_record(&line).map_err(|message| StreamError::Malformed { line: line_no, message })?;
        match record.action {
            Action::Assert => {
                if !live.insert(record.id.clone()) {
                    return Err(StreamError::DuplicateId { line: line_no, id: record.id });
                }
            }
            Action::Retract => {
                if !live.remove(&record.id) {
                    diagnostics.push(StreamDiagnostic {
                        line: line_no,
                        message: format!("retract of unknown id `{}`", record.id),
                    });
                }
            }
            Action::Update => {
                if !live.contains(&record.id) {
                    diagnostics.push(StreamDiagnostic {
                        line: line_no,
                        message: format!("update of unknown id `{}`", record.id),
                    });
                    live.insert(record.id.clone());
                }
            }
        }
        records.push(record);
    }
    Ok((records, diagnostics))
}

pub fn read_stream(
    path: impl AsRef<std::path::Path>,
) -> Result<(Vec<InputRecord>, Vec<StreamDiagnostic>), StreamError> {
    let file = std::fs::File::open(path)?;
    read_records(std::io::BufReader::new(file))
}

pub fn write_records<'a>(
    mut w: impl Write,
    records: impl IntoIterator<Item = &'a InputRecord>,
) -> Result<(), StreamError> {
    for r in records {
        serde_json::to_writer(&mut w, &Raw::from_record(r)).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}
