use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netdefense"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn write_scenario(dir: &Path, cost: f64) {
    let s = format!(
        r#"{{"graph": "g/graph.txt", "worths": {{"file": "g/worths.txt"}},
  "configurations": [{{"name": "none", "penetration": 1.0, "cost": 0}},
                     {{"name": "full", "penetration": 0.0, "cost": {cost}}}],
  "priors": {{"attack_prob": 1.0}}}}"#
    );
    fs::write(dir.join("s.json"), s).unwrap();
}

#[test]
fn gen_solve_and_baseline_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let out = run(
        d,
        &[
            "--seed", "3", "--out", "g", "gen", "--model", "pa", "--n", "15", "--m", "1",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    write_scenario(d, 0.05);

    let out = run(
        d,
        &[
            "--samples",
            "500",
            "--out",
            "o",
            "solve",
            "--scenario",
            "s.json",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("o/solve.json")).unwrap()).unwrap();
    assert!(report["objective"].as_f64().unwrap() <= 0.0);
    assert_eq!(report["policy"]["rows"].as_array().unwrap().len(), 15);

    let out = run(
        d,
        &[
            "--samples",
            "500",
            "--out",
            "b",
            "baseline",
            "--scenario",
            "s.json",
            "--method",
            "degree",
            "--budget",
            "0.1",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let out = run(
        d,
        &[
            "--samples",
            "500",
            "--out",
            "l",
            "losses",
            "--scenario",
            "s.json",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn sweep_csv_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let args = |out: &'static str, threads: &'static str| {
        vec![
            "--seed",
            "5",
            "--samples",
            "200",
            "--replications",
            "3",
            "--threads",
            threads,
            "--out",
            out,
            "sweep",
            "--kind",
            "cost",
            "--values",
            "0,0.01,0.1",
            "--n",
            "20",
            "--no-timings",
        ]
    };
    assert!(run(d, &args("a", "1")).status.success());
    assert!(run(d, &args("b", "2")).status.success());
    let a = fs::read(d.join("a/cost.csv")).unwrap();
    assert_eq!(a, fs::read(d.join("b/cost.csv")).unwrap());
    assert!(String::from_utf8(a)
        .unwrap()
        .starts_with("param,method,seed"));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(run(d, &["bogus"]).status.code(), Some(2));
    let out = run(d, &["solve", "--scenario", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));

    fs::create_dir(d.join("g")).unwrap();
    fs::write(d.join("g/graph.txt"), "3 undirected\n0 1 0.5\n1 1 0.5\n").unwrap();
    fs::write(d.join("g/worths.txt"), "1\n1\n1\n").unwrap();
    write_scenario(d, 0.05);
    let out = run(d, &["solve", "--scenario", "s.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("line 3"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
