use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use evcalc::bench::{bench_once, write_csv, BenchConfig};
use evcalc::gen::{generate, GenSpec};
use evcalc::{load_rules, parse_ticks, prepare_records};
use evcalc_core::engine::{run_stream, Engine, EngineConfig, Mode};
use evcalc_core::stream::{read_stream, write_records, write_results};

#[derive(Parser)]
#[command(name = "evcalc", version, about = "Windowed Event Calculus recognition over event streams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Asap,
    Partial,
    Final,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Asap => Mode::Asap,
            ModeArg::Partial => Mode::PartialStable,
            ModeArg::Final => Mode::Final,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Recognise composite events in a stream and write them as JSONL.
    Run {
        /// Rule file; the bundled surveillance pack when omitted.
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long)]
        input: PathBuf,
        /// Window length: ticks, or seconds/milliseconds with `s`/`ms`.
        #[arg(long)]
        wm: String,
        #[arg(long)]
        step: String,
        #[arg(long, value_enum, default_value = "asap")]
        mode: ModeArg,
        #[arg(long, default_value_t = 40.0)]
        tick_ms: f64,
        /// Pixel distance for `close`; required when the input has coordinates.
        #[arg(long)]
        close_threshold: Option<f64>,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic surveillance stream.
    Gen {
        #[arg(long, default_value_t = 10)]
        entities: usize,
        /// Length in ticks.
        #[arg(long, default_value_t = 4000)]
        duration: i64,
        #[arg(long, default_value_t = 1)]
        copies: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time recognition over a list of window lengths.
    Bench {
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated window lengths.
        #[arg(long, value_delimiter = ',', default_value = "10s,30s,50s,70s,90s,110s")]
        wm: Vec<String>,
        #[arg(long, default_value = "5s")]
        step: String,
        #[arg(long, default_value_t = 1)]
        shards: usize,
        #[arg(long, default_value_t = 40.0)]
        tick_ms: f64,
        #[arg(long)]
        close_threshold: Option<f64>,
        /// CSV report; standard output when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Directory for the recognised intervals of every window length.
        #[arg(long)]
        results: Option<PathBuf>,
    },
}

fn writer(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn read_input(path: &PathBuf, threshold: Option<f64>) -> Result<Vec<evcalc_core::stream::InputRecord>> {
    let (records, diags) = read_stream(path).with_context(|| format!("reading {}", path.display()))?;
    for d in &diags {
        log::warn!("{d}");
    }
    prepare_records(records, threshold)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { rules, input, wm, step, mode, tick_ms, close_threshold, out } => {
            let ed = load_rules(rules.as_deref())?;
            let cfg = EngineConfig {
                tick_ms,
                ..EngineConfig::new(parse_ticks(&wm, tick_ms)?, parse_ticks(&step, tick_ms)?, mode.into())
            };
            let mut engine = Engine::new(&ed, cfg)?;
            let records = read_input(&input, close_threshold)?;
            let results = run_stream(&mut engine, &records)?;
            for w in engine.take_warnings() {
                log::warn!("{w}");
            }
            let mut w = writer(out.as_ref())?;
            write_results(&mut w, &results)?;
            w.flush()?;
        }
        Command::Gen { entities, duration, copies, seed, out } => {
            let spec = GenSpec { entities, duration, seed, copies };
            spec.validate().map_err(anyhow::Error::msg)?;
            let mut w = writer(Some(&out))?;
            write_records(&mut w, &generate(&spec))?;
            w.flush()?;
        }
        Command::Bench { rules, input, wm, step, shards, tick_ms, close_threshold, report, results } => {
            let ed = load_rules(rules.as_deref())?;
            let step = parse_ticks(&step, tick_ms)?;
            let records = read_input(&input, close_threshold)?;
            if let Some(dir) = &results {
                std::fs::create_dir_all(dir)?;
            }
            let mut reports = Vec::new();
            for w in &wm {
                let wm = parse_ticks(w, tick_ms)?;
                let run = bench_once(&ed, &records, BenchConfig { wm, step, shards, tick_ms })?;
                log::info!(
                    "wm={wm} shards={} queries={} avg={:.2}ms wall={:.2}s rate={:.0} SDE/s",
                    run.report.shards,
                    run.report.queries,
                    run.report.avg_ms,
                    run.report.wall.as_secs_f64(),
                    run.report.sde_rate
                );
                if let Some(dir) = &results {
                    let path = dir.join(format!("wm{wm}.jsonl"));
                    let mut f = writer(Some(&path))?;
                    write_results(&mut f, &run.results)?;
                    f.flush()?;
                }
                reports.push(run.report);
            }
            write_csv(writer(report.as_ref())?, &reports)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
