use std::path::PathBuf;
use std::process::{Command, Output};

use mssc::branch_bound::SolveReport;

fn mssc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mssc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_ruspini_at_the_root() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let o = mssc(&["solve", &data("ruspini.csv"), "--k", "4", "--json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("ruspini"), "{out}");
    assert!(out.contains("f_opt=1.28811e+04"), "{out}");
    assert!(out.contains("N=1"), "{out}");
    let text = std::fs::read_to_string(&json).unwrap();
    let r = SolveReport::from_json(&text).unwrap();
    assert_eq!(SolveReport::from_json(&r.to_json().unwrap()).unwrap(), r);
    assert_eq!(r.nodes, 1);
}

#[test]
fn solve_iris_two_clusters() {
    let o = mssc(&["solve", &data("iris.csv"), "--k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("f_opt=1.52348e+02"), "{}", stdout(&o));
}

#[test]
fn zero_clusters_is_a_usage_error() {
    let o = mssc(&["solve", &data("iris.csv"), "--k", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("k must be ≥ 1"));
}

#[test]
fn missing_input_fails() {
    let o = mssc(&["solve", "/nonexistent/points.csv", "--k", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn time_limit_gives_gap_exit_code() {
    let o = mssc(&["solve", &data("iris.csv"), "--k", "3", "--time-limit", "0.2"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
}

#[test]
fn generate_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = mssc(&[
            "generate", "--n", "200", "--k", "10", "--sigma", "0.5", "--seed", "1", "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let fa = std::fs::read_to_string(a.path().join("200_10_0.5.csv")).unwrap();
    let fb = std::fs::read_to_string(b.path().join("200_10_0.5.csv")).unwrap();
    assert_eq!(fa, fb);
    assert_eq!(fa.lines().count(), 200);
}

#[test]
fn generate_one_point_per_centre() {
    let dir = tempfile::tempdir().unwrap();
    let o = mssc(&[
        "generate", "--n", "4", "--k", "4", "--sigma", "0.01", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("4_4_0.01.csv")).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn baseline_single_restart_is_reproducible() {
    let args = ["baseline", &data("iris.csv"), "--k", "3", "--restarts", "1", "--seed", "7"];
    let a = mssc(&args);
    let b = mssc(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("UB_++"));
}

#[test]
fn baseline_iris_plus_plus() {
    let o = mssc(&["baseline", &data("iris.csv"), "--k", "3", "--restarts", "50"]);
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split('\t').collect();
    let ub_pp: f64 = row[2].parse().unwrap();
    assert!((ub_pp - 78.8518).abs() / 78.8518 < 1e-4, "{out}");
}

#[test]
fn single_k_sweep_matches_solve() {
    let o = mssc(&["sweep", &data("ruspini.csv"), "--k-min", "4", "--k-max", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 2);
    assert!(out.lines().nth(1).unwrap().contains("1.28811e+04"));
}

#[test]
fn heuristic_sweep_is_non_increasing() {
    let dir = tempfile::tempdir().unwrap();
    let o = mssc(&[
        "generate", "--n", "60", "--k", "3", "--sigma", "1", "--seed", "3", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let file = dir.path().join("60_3_1.csv");
    let o = mssc(&[
        "sweep", file.to_str().unwrap(), "--k-min", "1", "--k-max", "6", "--heuristic-only",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let values: Vec<f64> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split('\t').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 6);
    assert!(values.windows(2).all(|w| w[1] <= w[0]), "{values:?}");
}
