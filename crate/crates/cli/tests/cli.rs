use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gitstar_core::harness::read_jsonl;
use gitstar_core::world::open_world;
use gitstar_core::{generate_scenario, ProblemInstance, ScenarioKind, ScenarioParams, StateVec};
use tempfile::TempDir;

fn gitstar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gitstar"))
        .args(args)
        .env_remove("GITSTAR_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn ok(o: &Output) {
    assert!(o.status.success(), "exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr));
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn free_problem(dir: &TempDir) -> PathBuf {
    let path = dir.path().join("free.json");
    open_world(StateVec::splat(2, 0.1), StateVec::splat(2, 0.9), 0.01).unwrap().save(&path).unwrap();
    path
}

fn tiny_benchmark(dir: &TempDir, runs: usize) -> PathBuf {
    let path = dir.path().join("bench.json");
    let text = format!(
        r#"{{"problems":[{{"scenario":"rr","dimension":2,"seed":1,"batch_budget":3,"runs":{runs}}},
            {{"scenario":"rr","dimension":2,"seed":2,"batch_budget":3,"runs":{runs}}}],"segments":[[0],[1]]}}"#
    );
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn worldgen_is_deterministic_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        ok(&gitstar(&["worldgen", "--kind", "dw", "--dim", "4", "--seed", "7", "--out", s(out)]));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let loaded = ProblemInstance::load(&a).unwrap();
    let generated = generate_scenario(ScenarioKind::DividingWalls, 4, 7, &ScenarioParams::default()).unwrap();
    assert_eq!(loaded, generated);
}

#[test]
fn worldgen_rejects_unknown_kind_and_bad_params() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.json");
    assert_eq!(gitstar(&["worldgen", "--kind", "maze", "--out", s(&out)]).status.code(), Some(2));
    let params = dir.path().join("params.json");
    std::fs::write(&params, r#"{"goal_half_width": 0.5}"#).unwrap();
    let o = gitstar(&["worldgen", "--kind", "rr", "--params", s(&params), "--out", s(&out)]);
    assert_ne!(o.status.code(), Some(0));
    assert!(!o.stderr.is_empty());
    assert_eq!(gitstar(&["worldgen"]).status.code(), Some(2));
}

#[test]
fn plan_solves_free_world() {
    let dir = TempDir::new().unwrap();
    let problem = free_problem(&dir);
    let path_out = dir.path().join("path.json");
    let o = gitstar(&["plan", "--problem", s(&problem), "--batch-budget", "3", "--path-out", s(&path_out)]);
    ok(&o);
    assert!(stdout(&o).contains("success=1"), "{}", stdout(&o));
    assert!(path_out.exists());
}

#[test]
fn sealed_enclosure_reports_inf() {
    let dir = TempDir::new().unwrap();
    let params = dir.path().join("params.json");
    std::fs::write(&params, r#"{"sealed": true}"#).unwrap();
    let problem = dir.path().join("sealed.json");
    ok(&gitstar(&["worldgen", "--kind", "ge", "--params", s(&params), "--out", s(&problem)]));
    let jsonl = dir.path().join("run.jsonl");
    let o = gitstar(&["plan", "--problem", s(&problem), "--time-limit", "0.1", "--out", s(&jsonl)]);
    ok(&o);
    let line = stdout(&o);
    assert!(line.contains("success=0") && line.contains("t_init=inf") && line.contains("c_final=inf"), "{line}");
    let rec = &read_jsonl(&jsonl).unwrap()[0];
    assert!(!rec.success);
    assert!(std::fs::read_to_string(&jsonl).unwrap().contains("\"c_final\":null"));
}

#[test]
fn batch_budget_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let problem = dir.path().join("rr.json");
    ok(&gitstar(&["worldgen", "--kind", "rr", "--seed", "3", "--out", s(&problem)]));
    let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    for out in [&a, &b] {
        ok(&gitstar(&["plan", "--problem", s(&problem), "--batch-budget", "4", "--seed", "11", "--out", s(out)]));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn seed_comes_from_environment_unless_flagged() {
    let dir = TempDir::new().unwrap();
    let problem = dir.path().join("rr.json");
    ok(&gitstar(&["worldgen", "--kind", "rr", "--seed", "3", "--out", s(&problem)]));
    let run = |env_seed: Option<&str>, flag: Option<&str>, out: &Path| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_gitstar"));
        cmd.args(["plan", "--problem", s(&problem), "--batch-budget", "2", "--out", s(out)]);
        cmd.env_remove("GITSTAR_SEED");
        if let Some(v) = env_seed {
            cmd.env("GITSTAR_SEED", v);
        }
        if let Some(v) = flag {
            cmd.args(["--seed", v]);
        }
        ok(&cmd.output().unwrap());
        read_jsonl(out).unwrap()[0].seed
    };
    let out = dir.path().join("r.jsonl");
    assert_eq!(run(None, None, &out), 0);
    assert_eq!(run(Some("5"), None, &out), 5);
    assert_eq!(run(Some("5"), Some("9"), &out), 9);
}

#[test]
fn plan_input_errors_map_to_exit_codes() {
    let dir = TempDir::new().unwrap();
    let problem = free_problem(&dir);
    let missing = dir.path().join("missing.heuristic");
    let key = format!("file:{}", s(&missing));
    assert_eq!(gitstar(&["plan", "--problem", s(&problem), "--key", &key]).status.code(), Some(3));
    let garbage = dir.path().join("bad.heuristic");
    std::fs::write(&garbage, "not a heuristic").unwrap();
    let key = format!("file:{}", s(&garbage));
    assert_eq!(gitstar(&["plan", "--problem", s(&problem), "--key", &key]).status.code(), Some(3));
    let nothing = dir.path().join("nothing.json");
    assert_eq!(gitstar(&["plan", "--problem", s(&nothing)]).status.code(), Some(3));
    let o = gitstar(&["plan", "--problem", s(&problem), "--time-limit", "1", "--batch-budget", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(gitstar(&["plan", "--problem", s(&problem), "--key", "fast"]).status.code(), Some(2));
}

#[test]
fn bench_writes_one_row_per_key_and_problem() {
    let dir = TempDir::new().unwrap();
    let bench = dir.path().join("bench.json");
    std::fs::write(&bench, r#"{"problems":[{"scenario":"rr","dimension":2,"seed":1,"batch_budget":2,"runs":10}]}"#)
        .unwrap();
    let out = dir.path().join("out");
    ok(&gitstar(&["bench", "--benchmark", s(&bench), "--keys", "git,baseline", "--out-dir", s(&out), "--jobs", "2"]));
    let mut reader = csv::Reader::from_path(out.join("metrics.csv")).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, gitstar_core::harness::CSV_HEADER);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    let records = read_jsonl(out.join("runs.jsonl")).unwrap();
    assert_eq!(records.len(), 20);
    for row in &rows {
        let runs: Vec<_> = records.iter().filter(|r| r.planner == row[0]).collect();
        let rate = runs.iter().filter(|r| r.success).count() as f64 / runs.len() as f64;
        assert_eq!(row[11].parse::<f64>().unwrap(), rate);
    }
    let rank = |r: &gitstar_core::RunRecord| (usize::from(r.planner != "git"), r.seed);
    assert!(records.windows(2).all(|w| rank(&w[0]) < rank(&w[1])), "runs follow key order, then seed");
    assert!(out.join("improvement.csv").exists());
}

#[test]
fn train_rejects_tiny_population() {
    let dir = TempDir::new().unwrap();
    let bench = tiny_benchmark(&dir, 1);
    let o = gitstar(&["train", "--benchmark", s(&bench), "--pop", "1", "--gens", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(gitstar(&["train", "--pop", "4"]).status.code(), Some(2));
}

#[test]
fn train_is_reproducible_and_winner_plans() {
    let dir = TempDir::new().unwrap();
    let bench = tiny_benchmark(&dir, 2);
    let run = |name: &str| {
        let out = dir.path().join(name);
        let args = ["train", "--preset", "desk", "--benchmark", s(&bench), "--pop", "6", "--gens", "3", "--seed", "4"];
        ok(&gitstar(&[&args[..], &["--out-dir", s(&out)]].concat()));
        out
    };
    let (a, b) = (run("a"), run("b"));
    let winner = std::fs::read(a.join("winner.heuristic")).unwrap();
    assert_eq!(winner, std::fs::read(b.join("winner.heuristic")).unwrap());

    let mut reader = csv::Reader::from_path(a.join("generations.csv")).unwrap();
    let mins: Vec<f64> = reader.records().map(|r| r.unwrap()[1].parse().unwrap()).collect();
    assert_eq!(mins.len(), 3);
    assert!(mins.windows(2).all(|w| w[1] <= w[0]), "{mins:?}");

    let problem = free_problem(&dir);
    let key = format!("file:{}", s(&a.join("winner.heuristic")));
    ok(&gitstar(&["plan", "--problem", s(&problem), "--key", &key, "--batch-budget", "2"]));
}
