use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tracemine::io::parse_canonical;
use tracemine::reference;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tracemine"));
    cmd.args(args).env_remove("TRACEMINE_TIMEOUT_SECS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let pool = data("fig1.pool");
    let before = fs::read(&pool).unwrap();
    let a = dir.path().join("a.trc");
    let b = dir.path().join("b.trc");
    for out in [&a, &b] {
        let o = run(&["generate", "--pool", s(&pool), "--mode", "SNI", "--traces", "100", "--seed", "7", "--out", s(out)]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(fs::read(&pool).unwrap(), before);
    assert_eq!(parse_canonical(&fs::read_to_string(&a).unwrap()).unwrap().traces.len(), 100);
}

#[test]
fn generate_reads_config_file_and_vocabulary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("gen.cfg");
    fs::write(&cfg, "mode=MI\ntraces=4\nmax_step_width=2\nseed=3\n").unwrap();
    let out = dir.path().join("mi.trc");
    let o = run(&["generate", "--pool", s(&data("fig1.pool")), "--config", s(&cfg), "--vocab", s(&data("example.trc")), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let c = parse_canonical(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(c.traces.len(), 4);
    assert_eq!(c.vocabulary, reference::example_vocabulary());
    assert!(c.provenance.contains("mode=MI"));
}

#[test]
fn mine_ltl_lists_the_worked_example_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rules.txt");
    let o = run(&["mine", "--miner", "ltl", "--in", s(&data("example.trc")), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    let v = reference::example_vocabulary();
    for (x, y) in [(1, 2), (1, 5), (1, 6), (3, 4), (3, 5), (3, 6), (5, 6), (6, 2)] {
        let line = format!("G(x -> XF y): x={} y={}", v.name(x.into()), v.name(y.into()));
        assert!(text.lines().any(|l| l == line), "missing {line}");
    }
}

#[test]
fn mine_all_writes_one_file_per_miner() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ex.txt");
    let o = run(&["mine", "--miner", "all", "--in", s(&data("example.trc")), "--out", s(&out), "--miner-arg", "seqpat.max_len=4"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for m in ["seqpat", "alternating", "episode", "ltl", "flow"] {
        assert!(dir.path().join(format!("ex.{m}.txt")).exists(), "{m}");
    }
    let seqpat = fs::read_to_string(dir.path().join("ex.seqpat.txt")).unwrap();
    assert!(seqpat.lines().any(|l| l == "1 -1 5 -1 6 -1 2 -1 #SUP: 1"));
}

#[test]
fn bench_writes_a_four_row_report() {
    let dir = tempfile::tempdir().unwrap();
    let trc = dir.path().join("sni.trc");
    let report = dir.path().join("r.csv");
    run(&["generate", "--pool", s(&data("fig1.pool")), "--mode", "SNI", "--traces", "100", "--seed", "7", "--out", s(&trc)]);
    let o = run(&["bench", "--in", s(&trc), "--gt", s(&data("fig1.pool")), "--miners", "all", "--report", s(&report)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "miner,corpus,n_patterns,n_binary,precision,recall,runtime_ms,status");
    assert_eq!(lines.len(), 5);
    assert!(lines[1..].iter().all(|l| l.ends_with(",complete")));
}

#[test]
fn exhausted_budget_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.csv");
    let o = run(&["bench", "--in", s(&data("example.trc")), "--gt", s(&data("fig1.pool")), "--miners", "ltl,flow", "--timeout", "0", "--report", s(&report)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(fs::read_to_string(&report).unwrap().contains("incomplete:timeout"));

    let out = dir.path().join("p.txt");
    let o = run_env(&["mine", "--miner", "seqpat", "--in", s(&data("example.trc")), "--out", s(&out)], &[("TRACEMINE_TIMEOUT_SECS", "0")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(out.exists());
}

#[test]
fn result_guard_exits_3_with_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.txt");
    let o = run(&["mine", "--miner", "seqpat", "--in", s(&data("example.trc")), "--out", s(&out), "--max-results", "10"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("memory"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["mine", "--miner", "ltl"]).status.code(), Some(1));
    let ex = data("example.trc");
    assert_eq!(run(&["mine", "--miner", "nope", "--in", s(&ex), "--out", "/dev/null"]).status.code(), Some(1));
    assert_eq!(
        run(&["mine", "--miner", "ltl", "--in", s(&ex), "--out", "/dev/null", "--miner-arg", "window_w=3"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.trc");
    fs::write(&bad, "event 0 a:b:c\ntrace\n0 7\n").unwrap();
    let o = run(&["mine", "--miner", "ltl", "--in", s(&bad), "--out", "/dev/null"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let small = dir.path().join("small.trc");
    fs::write(&small, "event 0 a:b:c\nevent 1 a:b:d\ntrace\n0\n1\n").unwrap();
    let o = run(&["bench", "--in", s(&small), "--gt", s(&data("fig1.pool")), "--miners", "ltl"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn convert_monitor_log_and_export() {
    let dir = tempfile::tempdir().unwrap();
    let trc = dir.path().join("m.trc");
    let o = run(&[
        "convert", "--in", s(&data("membus.log")), "--from", "monitor", "--field-map", s(&data("membus.fields")), "--out", s(&trc),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let c = parse_canonical(&fs::read_to_string(&trc).unwrap()).unwrap();
    assert_eq!(c.traces[0].len(), 4);

    let spmf = dir.path().join("ex.spmf");
    let o = run(&["convert", "--in", s(&data("example.trc")), "--to", "spmf", "--out", s(&spmf)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&spmf).unwrap(), "1 -1 3 -1 1 -1 2 -1 5 -1 1 -1 5 -1 6 -1 2 -1 4 -1 6 -1 2 -2");

    let o = run(&["convert", "--in", s(&data("example.trc")), "--to", "texada", "--flatten", "capture", "--out", s(&spmf)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read_to_string(&spmf).unwrap().ends_with(". .\n"));
}

#[test]
fn eval_scores_mined_file() {
    let dir = tempfile::tempdir().unwrap();
    let mined = dir.path().join("gt.txt");
    fs::write(&mined, "1 2 [sup=1]\n3 4 [sup=1]\n1 5 6 2 [sup=1]\n3 5 6 4 [sup=1]\n0 1 [sup=1]\n").unwrap();
    let report = dir.path().join("e.csv");
    let o = run(&["eval", "--miner", "flow", "--mined", s(&mined), "--gt", s(&data("fig1.pool")), "--report", s(&report)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read_to_string(&report).unwrap().contains(",5,3,0.8000,1.0000,0,complete"));
}
