//! JSONL result output.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::StreamError;
use crate::engine::{RecognitionResult, Stability};
use crate::interval::End;
use crate::Tick;

/// One reported interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputLine {
    pub name: String,
    pub args: Vec<String>,
    pub value: String,
    pub from: Tick,
    /// `None` for an open interval.
    pub to: Option<Tick>,
    pub stability: Stability,
    pub q: Tick,
}

impl OutputLine {
    pub fn from_result(r: &RecognitionResult) -> Vec<OutputLine> {
        let mut lines: Vec<OutputLine> = r
            .entries
            .iter()
            .map(|e| OutputLine {
                name: e.name.clone(),
                args: e.args.clone(),
                value: e.value.clone(),
                from: e.interval.start,
                to: match e.interval.end {
                    End::At(t) => Some(t),
                    End::Open => None,
                },
                stability: e.stability,
                q: r.q,
            })
            .collect();
        lines.sort_by(|a, b| (&a.name, &a.args, a.from, &a.value).cmp(&(&b.name, &b.args, b.from, &b.value)));
        lines
    }
}

/// Writes one line per entry, ordered by query time, then name, arguments
/// and start.
pub fn write_results<'a>(
    mut w: impl Write,
    results: impl IntoIterator<Item = &'a RecognitionResult>,
) -> Result<(), StreamError> {
    let mut all: Vec<&RecognitionResult> = results.into_iter().collect();
    all.sort_by_key(|r| r.q);
    for r in all {
        for line in OutputLine::from_result(r) {
            serde_json::to_writer(&mut w, &line).map_err(std::io::Error::from)?;
            w.write_all(b"\n")?;
        }
    }
    w.flush()?;
    Ok(())
}
