use std::path::Path;
use std::process::{Command, Output};

use swarmbo::io::{self, Artifact};
use swarmbo_cli::{ReportOutput, RunOutput};

const FAST: &str = "[pso]\nmax_iters = 15\n[gp.pso]\nmax_iters = 15\n";

fn swarmbo(args: &[&str], seed_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_swarmbo"));
    cmd.args(args).env_remove("SWARMBO_SEED");
    if let Some(s) = seed_env {
        cmd.env("SWARMBO_SEED", s);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_run(dir: &Path) -> RunOutput {
    let a: Artifact<RunOutput> = io::read_json(&dir.join("result.json")).unwrap();
    a.payload
}

#[test]
fn run_writes_result_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        &format!("[objective]\nname = \"sphere\"\ndims = 2\n[experiment]\niterations = 3\n{FAST}"),
    );
    let out_dir = dir.path().join("out");
    let out = swarmbo(&["run", "--config", &cfg, "--output-dir", out_dir.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let run = read_run(&out_dir);
    assert_eq!(run.seed, 0);
    assert_eq!(run.result.evaluations, 8);
    assert!(run.result.incumbent_trace.windows(2).all(|w| w[0] <= w[1]));
    let trace = io::read_trace_csv(&out_dir.join("trace.csv")).unwrap();
    let values: Vec<f64> = trace.iter().map(|r| r.incumbent).collect();
    assert_eq!(values, run.result.incumbent_trace);
    assert!(String::from_utf8_lossy(&out.stdout).contains("best value"));
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        &format!("[objective]\nname = \"sphere\"\ndims = 1\n[experiment]\niterations = 1\nseed = 5\n{FAST}"),
    );
    let run = |args: &[&str], env: Option<&str>, name: &str| {
        let out_dir = dir.path().join(name);
        let mut all = vec!["run", "--config", &cfg, "--output-dir", out_dir.to_str().unwrap()];
        all.extend_from_slice(args);
        let out = swarmbo(&all, env);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        read_run(&out_dir).seed
    };
    assert_eq!(run(&[], None, "a"), 5);
    assert_eq!(run(&[], Some("9"), "b"), 9);
    assert_eq!(run(&["--seed", "3"], Some("9"), "c"), 3);
    let out = swarmbo(&["run", "--config", &cfg], Some("nine"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "typo.toml", "[objective]\nname = \"sphere\"\ndims = 2\n[acquisition]\ngamna = 1.0\n");
    let out = swarmbo(&["run", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("gamna"), "{}", stderr(&out));
    assert!(stderr(&out).contains("line 5"), "{}", stderr(&out));

    let missing = swarmbo(&["run", "--config", dir.path().join("nope.toml").to_str().unwrap()], None);
    assert_eq!(missing.status.code(), Some(2));

    let usage = swarmbo(&["run"], None);
    assert_eq!(usage.status.code(), Some(2));

    let single = write_config(
        dir.path(),
        "single.toml",
        "[objective]\nname = \"sphere\"\ndims = 2\n[experiment]\nmethods = [\"pso_bo\"]\n",
    );
    assert_eq!(swarmbo(&["compare", "--config", &single], None).status.code(), Some(2));

    let arity = write_config(dir.path(), "arity.toml", "[objective]\nname = \"hartmann3\"\ndims = 2\n");
    assert_eq!(swarmbo(&["run", "--config", &arity], None).status.code(), Some(2));
}

#[test]
fn compare_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        &format!(
            "[objective]\nname = \"branin\"\ndims = 2\n[experiment]\niterations = 2\nseeds = [1, 2]\n\
             methods = [\"pso_bo\", \"random_search\", \"local_bo\"]\n[experiment.local_bo]\nrestarts = 2\n{FAST}"
        ),
    );
    let out_dir = dir.path().join("out");
    let out = swarmbo(&["compare", "--config", &cfg, "--output-dir", out_dir.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let rows = io::read_report_csv(&out_dir.join("report.csv")).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(io::format_report_table(&rows), String::from_utf8_lossy(&out.stdout));
    for r in &rows {
        assert!(r.min <= r.ave && r.ave <= r.max);
    }

    let report: Artifact<ReportOutput> = io::read_json(&out_dir.join("report.json")).unwrap();
    assert!(report.payload.budget_parity());
    assert_eq!(io::report_rows(&report.payload), rows);
    for m in &report.payload.methods {
        for s in &m.per_seed {
            let trace = io::read_trace_csv(&out_dir.join(format!("trace_{}_{}.csv", m.method, s.seed))).unwrap();
            assert_eq!(trace.len(), 7);
        }
    }
}

#[test]
fn sweep_stability_gate() {
    let dir = tempfile::tempdir().unwrap();
    let base = format!("[objective]\nname = \"sphere\"\ndims = 1\n{FAST}[experiment]\niterations = 1\nseeds = [1, 2]\n");
    let ok = write_config(dir.path(), "ok.toml", &format!("{base}omegas = [0.95]\n"));
    let out_dir = dir.path().join("out");
    let out = swarmbo(&["sweep", "--config", &ok, "--output-dir", out_dir.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = io::read_sweep_csv(&out_dir.join("sweep.csv")).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].omega, 0.95);

    let bad = write_config(dir.path(), "bad.toml", &format!("{base}omegas = [0.5, -1.0]\n"));
    let out = swarmbo(&["sweep", "--config", &bad], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("-1"), "{}", stderr(&out));
}
