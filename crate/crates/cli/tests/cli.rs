use std::path::Path;
use std::process::{Command, Output};

use evcalc_core::engine::Stability;
use evcalc_core::stream::{read_stream, write_records, InputRecord, OutputLine};

fn evcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evcalc")).args(args).output().unwrap()
}

fn write_stream(path: &Path, records: &[InputRecord]) {
    let mut f = std::fs::File::create(path).unwrap();
    write_records(&mut f, records).unwrap();
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_reports_the_left_object() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    let out = dir.path().join("out.jsonl");
    write_stream(
        &input,
        &[
            InputRecord::interval("w", "walking", &["p"], 10, Some(400)),
            InputRecord::interval("c", "close", &["p", "o"], 90, Some(150)),
            InputRecord::interval("i", "inactive", &["o"], 100, Some(300)),
            InputRecord::event("a", "appear", &["o"], 100),
            InputRecord::event("d", "disappear", &["o"], 250),
        ],
    );
    let o = evcalc(&[
        "run",
        "--input",
        path(&input),
        "--wm",
        "200",
        "--step",
        "50",
        "--mode",
        "final",
        "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let lines: Vec<OutputLine> =
        std::fs::read_to_string(&out).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let left: Vec<&OutputLine> = lines.iter().filter(|l| l.name == "leaving_object" && l.value == "true").collect();
    assert_eq!(left.len(), 1);
    assert_eq!(
        (left[0].args.as_slice(), left[0].from, left[0].to),
        (&["p".to_string(), "o".to_string()][..], 101, Some(250))
    );
    assert!(lines.iter().all(|l| l.stability == Stability::Final));
}

#[test]
fn window_shorter_than_step_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    write_stream(&input, &[]);
    let o = evcalc(&["run", "--input", path(&input), "--wm", "10", "--step", "20"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn empty_input_gives_empty_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    write_stream(&input, &[]);
    let o = evcalc(&["run", "--input", path(&input), "--wm", "10s", "--step", "5s"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
}

#[test]
fn coordinates_need_a_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    write_stream(&input, &[InputRecord::coord("x", "p", 3, 1.0, 2.0)]);
    let o = evcalc(&["run", "--input", path(&input), "--wm", "10", "--step", "5"]);
    assert_eq!(o.status.code(), Some(1));
    let o = evcalc(&["run", "--input", path(&input), "--wm", "10", "--step", "5", "--close-threshold", "25"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn gen_is_deterministic_and_clean() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for p in [&a, &b] {
        let o =
            evcalc(&["gen", "--entities", "4", "--duration", "300", "--copies", "2", "--seed", "5", "--out", path(p)]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let (records, diags) = read_stream(&a).unwrap();
    assert!(!records.is_empty());
    assert!(diags.is_empty(), "{diags:?}");
}

#[test]
fn bench_writes_the_report_and_results() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.jsonl");
    let report = dir.path().join("report.csv");
    let results = dir.path().join("results");
    assert!(evcalc(&["gen", "--entities", "4", "--duration", "400", "--out", path(&input)]).status.success());
    let o = evcalc(&[
        "bench",
        "--input",
        path(&input),
        "--wm",
        "4s,8s",
        "--step",
        "2s",
        "--close-threshold",
        "25",
        "--report",
        path(&report),
        "--results",
        path(&results),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&report).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "wm,step,shards,avg_ms,p95_ms,max_ms,realtime");
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("100,50,1,"));
    assert!(results.join("wm100.jsonl").exists() && results.join("wm200.jsonl").exists());

    let again = dir.path().join("again");
    let o = evcalc(&[
        "bench",
        "--input",
        path(&input),
        "--wm",
        "4s,8s",
        "--step",
        "2s",
        "--close-threshold",
        "25",
        "--report",
        path(&report),
        "--results",
        path(&again),
    ]);
    assert!(o.status.success());
    for f in ["wm100.jsonl", "wm200.jsonl"] {
        assert_eq!(std::fs::read(results.join(f)).unwrap(), std::fs::read(again.join(f)).unwrap(), "{f}");
    }
}
