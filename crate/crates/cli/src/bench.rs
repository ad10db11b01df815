//! Timed recognition runs, optionally split across shards.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use anyhow::{anyhow, Result};
use evcalc_core::engine::{run_stream_with, Engine, EngineConfig, Entry, Mode, RecognitionResult, ShardSpec};
use evcalc_core::rules::EventDescription;
use evcalc_core::stream::InputRecord;
use evcalc_core::Tick;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub wm: Tick,
    pub step: Tick,
    pub shards: usize,
    pub tick_ms: f64,
}

/// Timings of one run. A query's time is that of its slowest shard.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub wm: Tick,
    pub step: Tick,
    pub shards: usize,
    pub avg_ms: f64,
    pub p95_ms: f64,
    pub max_ms: f64,
    /// Average recognition time is below the wall duration of a step.
    pub realtime: bool,
    #[serde(skip)]
    pub queries: usize,
    /// Input records per second of stream time.
    #[serde(skip)]
    pub sde_rate: f64,
    /// Wall time of the whole run.
    #[serde(skip)]
    pub wall: Duration,
}

#[derive(Debug, Clone)]
pub struct BenchRun {
    pub report: BenchReport,
    /// Per-query results merged over shards.
    pub results: Vec<RecognitionResult>,
    /// Per-query recognition time in milliseconds, aligned with `results`.
    pub times_ms: Vec<f64>,
}

fn entity_count(records: &[InputRecord]) -> usize {
    records.iter().filter_map(|r| r.payload.as_ref()).flat_map(|p| p.entities()).collect::<BTreeSet<_>>().len()
}

/// Shards beyond the number of entity pairs would sit idle.
pub fn clamp_shards(shards: usize, records: &[InputRecord]) -> usize {
    let n = entity_count(records);
    let pairs = (n * n.saturating_sub(1) / 2).max(1);
    if shards > pairs {
        log::warn!("{shards} shards requested but only {pairs} entity pairs; using {pairs}");
        pairs
    } else {
        shards.max(1)
    }
}

fn percentile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Runs every query up to the last full step of the stream. Each shard has
/// its own engine reading the complete stream.
pub fn bench_once(ed: &EventDescription, records: &[InputRecord], cfg: BenchConfig) -> Result<BenchRun> {
    let shards = clamp_shards(cfg.shards, records);
    let ecfg = EngineConfig { tick_ms: cfg.tick_ms, ..EngineConfig::new(cfg.wm, cfg.step, Mode::Asap) };
    let horizon = records.iter().filter_map(InputRecord::occurrence).max().unwrap_or(0);
    let last_q = (horizon / cfg.step).max(1) * cfg.step;

    let mut engines = (0..shards)
        .map(|index| Engine::new(ed, ecfg)?.with_shard(ShardSpec { index, count: shards }))
        .collect::<Result<Vec<_>, _>>()?;
    let started = Instant::now();
    let per_shard: Vec<Result<(Vec<RecognitionResult>, Vec<Duration>)>> = std::thread::scope(|s| {
        let handles: Vec<_> = engines
            .iter_mut()
            .map(|engine| {
                s.spawn(move || {
                    let mut times = Vec::new();
                    let res = run_stream_with(engine, records, last_q, |_, _, d| times.push(d))?;
                    Ok((res, times))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().map_err(|_| anyhow!("shard thread panicked"))?).collect()
    });
    let wall = started.elapsed();

    let mut results: Vec<RecognitionResult> = Vec::new();
    let mut times: Vec<f64> = Vec::new();
    for shard in per_shard {
        let (res, t) = shard?;
        if results.is_empty() {
            results = res;
            times = t.iter().map(|d| d.as_secs_f64() * 1000.0).collect();
        } else {
            for (acc, r) in results.iter_mut().zip(res) {
                acc.entries.extend(r.entries);
            }
            for (acc, d) in times.iter_mut().zip(t) {
                *acc = acc.max(d.as_secs_f64() * 1000.0);
            }
        }
    }
    for r in &mut results {
        r.entries.sort_by(entry_order);
    }

    let avg_ms = if times.is_empty() { 0.0 } else { times.iter().sum::<f64>() / times.len() as f64 };
    let mut sorted = times.clone();
    sorted.sort_by(f64::total_cmp);
    let stream_secs = (horizon.max(1) as f64) * cfg.tick_ms / 1000.0;
    let report = BenchReport {
        wm: cfg.wm,
        step: cfg.step,
        shards,
        avg_ms,
        p95_ms: percentile(&sorted, 0.95),
        max_ms: sorted.last().copied().unwrap_or(0.0),
        realtime: avg_ms < cfg.step as f64 * cfg.tick_ms,
        queries: times.len(),
        sde_rate: records.len() as f64 / stream_secs,
        wall,
    };
    Ok(BenchRun { report, results, times_ms: times })
}

pub fn entry_order(a: &Entry, b: &Entry) -> std::cmp::Ordering {
    (&a.name, &a.args, &a.value, a.interval).cmp(&(&b.name, &b.args, &b.value, b.interval))
}

/// CSV with header `wm,step,shards,avg_ms,p95_ms,max_ms,realtime`.
pub fn write_csv(w: impl Write, reports: &[BenchReport]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    for r in reports {
        csv.serialize(r)?;
    }
    csv.flush()?;
    Ok(())
}
