//! One PASS/FAIL line per acceptance criterion. Lines go straight to stderr
//! so they show up without `--nocapture`.

mod common;

use std::io::Write;
use std::sync::OnceLock;

use mssc::branch_bound::{root_bound, shrink_merge, solve_exact_detailed, Node, SolveOutcome};
use mssc::cuts::{Cut, CutPool};
use mssc::dataset::{clustering_matrix, generate_gaussian, gram, load_csv, mssc_objective, Assignment, SyntheticSpec};
use mssc::heuristic::{multistart_baseline, ConstraintSet, InitKind};
use mssc::linalg::{dot, lambda_max};
use mssc::RunConfig;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(criterion: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {criterion}: {verdict} {detail}");
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn iris_k3() -> &'static SolveOutcome {
    static RUN: OnceLock<SolveOutcome> = OnceLock::new();
    RUN.get_or_init(|| {
        let data = load_csv(common::data_path("iris.csv")).unwrap();
        let mut cfg = RunConfig::new(3);
        cfg.record_nodes = true;
        solve_exact_detailed(&data, &cfg).unwrap()
    })
}

#[test]
fn criterion_1_published_optima() {
    let cases = [
        ("ruspini.csv", 4, 1.28811e4),
        ("iris.csv", 2, 1.52348e2),
        ("iris.csv", 3, 7.88514e1),
        ("iris.csv", 4, 5.72285e1),
        ("seeds.csv", 3, 5.87319e2),
        ("wine.csv", 2, 4.54375e6),
        ("glass.csv", 3, 1.14341e2),
    ];
    let mut all = true;
    for (file, k, want) in cases {
        let path = common::data_path(file);
        let Ok(data) = load_csv(&path) else {
            report(1, false, &format!("{file} k={k}: dataset not available at {}", path.display()));
            all = false;
            continue;
        };
        let r = if file == "iris.csv" && k == 3 {
            iris_k3().report.clone()
        } else {
            solve_exact_detailed(&data, &RunConfig::new(k)).unwrap().report
        };
        let ok = rel(r.f_opt, want) <= 1e-4 && r.gap <= 1e-4 && r.certified();
        report(
            1,
            ok,
            &format!(
                "{file} k={k}: f_opt {:.6e} (published {want:.5e}), gap {:.2e}, N {}, {:.1}s",
                r.f_opt, r.gap, r.nodes, r.wall_time
            ),
        );
        all &= ok;
    }
    assert!(all, "some published optima were not reproduced");
}

#[test]
fn criterion_2_iris_root_gap() {
    let r = &iris_k3().report;
    let gap = (7.88514e1 - iris_k3().root.lb0) / 7.88514e1;
    let ok = (3e-2..=6e-2).contains(&gap);
    report(2, ok, &format!("Iris k=3 root gap without cuts {gap:.4e} (band [3e-2, 6e-2]); reported gap0 {:.4e}", r.gap0));
    assert!(ok);
}

struct OracleRun {
    k: usize,
    data: mssc::dataset::DataMatrix,
    outcome: SolveOutcome,
    brute: f64,
}

fn oracle_runs() -> &'static Vec<OracleRun> {
    static RUNS: OnceLock<Vec<OracleRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        (0..50)
            .map(|i| {
                let n = rng.random_range(6..=10);
                let d = rng.random_range(2..=3);
                let k = rng.random_range(2..=3);
                let data = common::random_data(1000 + i, n, d);
                let mut cfg = RunConfig::new(k);
                cfg.record_nodes = true;
                let outcome = solve_exact_detailed(&data, &cfg).unwrap();
                let brute = common::brute_force(&data, k).1;
                OracleRun { k, data, outcome, brute }
            })
            .collect()
    })
}

#[test]
fn criterion_3_brute_force_equivalence() {
    let runs = oracle_runs();
    let mut mismatches = 0;
    let mut nodes = 0;
    for run in runs {
        let r = &run.outcome.report;
        let f = mssc_objective(&run.data, &r.labels).unwrap();
        nodes += r.nodes;
        if f.to_bits() != run.brute.to_bits() {
            mismatches += 1;
        }
    }
    let ok = mismatches == 0;
    report(3, ok, &format!("{} instances, {mismatches} mismatches, {nodes} nodes in total", runs.len()));
    assert!(ok);
}

#[test]
fn criterion_4_safe_bounds_below_node_optima() {
    let mut checked = 0;
    let mut violations = 0;
    for run in oracle_runs() {
        // node bounds refer to the centered data the search runs on
        let centered = run.data.centered();
        for node in &run.outcome.nodes {
            let (Some(lb), Some(groups), Some(cl)) = (node.lb, &node.groups, &node.cl_global) else {
                continue;
            };
            if let Some((_, opt)) = common::constrained_optimum(&centered, run.k, groups, cl) {
                checked += 1;
                if lb > opt {
                    violations += 1;
                }
            }
        }
    }
    let ok = violations == 0 && checked > 0;
    report(4, ok, &format!("{checked} node bounds checked, {violations} above the constrained optimum"));
    assert!(ok);
}

#[test]
fn criterion_5_shrink_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let n = rng.random_range(3..=12);
        let mut node = Node::root(n, CutPool::default());
        for _ in 0..rng.random_range(0..n - 1) {
            let i = rng.random_range(0..node.m() - 1);
            let j = rng.random_range(i + 1..node.m());
            node = shrink_merge(&node, (i, j)).unwrap();
        }
        let m = node.m();
        let k = rng.random_range(1..=m.min(4));
        let data = common::random_data(trial, n, 3);
        let g = gram(&data);
        let p = node.problem(&data, g.trace_w, k).unwrap();
        let sizes: Vec<f64> = node.groups.iter().map(|g| g.len() as f64).collect();
        // convex combination of two local clustering matrices
        let mut zl = DMatrix::zeros(m, m);
        for wgt in [0.3, 0.7] {
            let labels: Vec<usize> = (0..m).map(|r| if r < k { r } else { rng.random_range(0..k) }).collect();
            let mut cs = vec![0.0; k];
            for r in 0..m {
                cs[labels[r]] += sizes[r];
            }
            for r in 0..m {
                for s in 0..m {
                    if labels[r] == labels[s] {
                        zl[(r, s)] += wgt / cs[labels[r]];
                    }
                }
            }
        }
        let mut t = DMatrix::zeros(m, n);
        for (r, grp) in node.groups.iter().enumerate() {
            for &q in grp {
                t[(r, q)] = 1.0;
            }
        }
        let z = t.transpose() * &zl * &t;
        for i in 0..n {
            worst = worst.max((z.row(i).sum() - 1.0).abs());
        }
        worst = worst.max((z.trace() - k as f64).abs());
        worst = worst.max((dot(&g.w, &z) - dot(&p.w_shrunk, &zl)).abs());
    }
    let ok = worst <= 1e-10;
    report(5, ok, &format!("100 shrunk problems, largest deviation {worst:.2e} (tolerance 1e-10)"));
    assert!(ok);
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            go(n, size, x + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, size, 0, &mut Vec::new(), &mut out);
    out
}

#[test]
fn criterion_6_cut_validity() {
    let mut checks = 0usize;
    let mut worst = f64::NEG_INFINITY;
    for n in 2..=8 {
        let mut base = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                base.push(Cut::pair(i, j));
                for h in (j + 1)..n {
                    if h != i {
                        base.push(Cut::triangle(i, j, h));
                    }
                }
            }
        }
        for k in 1..=n {
            let cliques: Vec<Cut> = subsets(n, k + 1).into_iter().map(|q| Cut::clique(q, n, k)).collect();
            for labels in common::partitions(n, k) {
                let z = clustering_matrix(&Assignment { labels, k });
                for c in base.iter().chain(&cliques) {
                    worst = worst.max(c.violation(&z));
                    checks += 1;
                }
            }
        }
    }
    // clustering matrices hold fractions 1/|C|, so sums carry rounding
    let ok = worst <= 1e-12;
    report(6, ok, &format!("{checks} (partition, cut) pairs for n <= 8, largest violation {worst:.2e}"));
    assert!(ok);
}

#[test]
fn criterion_7_heuristic_quality() {
    let data = load_csv(common::data_path("iris.csv")).unwrap();
    let published = [
        1.52348e2, 7.88514e1, 5.72285e1, 4.64462e1, 3.90400e1, 3.42982e1, 2.99904e1, 2.77861e1, 2.58341e1,
    ];
    let mut matched = 0;
    let mut beats = 0;
    for (k, want) in (2..=10).zip(published) {
        let root = root_bound(&data, &RunConfig::new(k)).unwrap();
        let ub_cp = root.ub_cp.unwrap_or(f64::INFINITY);
        let (_, ub_pp) = multistart_baseline(&data, k, 50, 0, InitKind::PlusPlus);
        let m = rel(ub_cp, want) <= 1e-3;
        let b = ub_cp <= ub_pp;
        matched += m as usize;
        beats += b as usize;
        let _ = writeln!(
            std::io::stderr(),
            "  Iris k={k}: UB_0 {:.5e} UB_CP {ub_cp:.5e} (published {want:.5e}) UB_++ {ub_pp:.5e}",
            root.ub_0.unwrap_or(f64::NAN)
        );
    }
    let ok = matched >= 7 && beats >= 7;
    report(7, ok, &format!("UB_CP within 1e-3 of published for {matched}/9, UB_CP <= UB_++ for {beats}/9"));
    assert!(ok);
}

#[test]
fn criterion_8_cop_kmeans_respects_constraints() {
    let nodes = &iris_k3().nodes;
    let mut outputs = 0;
    let mut violations = 0;
    for node in nodes {
        let (Some(groups), Some(cl)) = (&node.groups, &node.cl_global) else {
            continue;
        };
        let cons = ConstraintSet::from_groups(groups, cl);
        for labels in &node.heuristic {
            outputs += 1;
            if !cons.satisfied_by(labels) {
                violations += 1;
            }
        }
    }
    let ok = violations == 0 && outputs > 0;
    report(8, ok, &format!("{} nodes, {outputs} heuristic outputs, {violations} violating", nodes.len()));
    assert!(ok);
}

#[test]
fn criterion_9_eigenvalue_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let n = rng.random_range(2..=30);
        let terms = rng.random_range(1..=5);
        let weights: Vec<f64> = (0..terms).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let mut z = DMatrix::zeros(n, n);
        for w in weights {
            let k = rng.random_range(1..=n);
            let labels: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.random_range(0..k) }).collect();
            z += clustering_matrix(&Assignment { labels, k }) * (w / total);
        }
        worst = worst.max(lambda_max(&z));
    }
    let ok = worst <= 1.0 + 1e-9;
    report(9, ok, &format!("100 matrices, largest eigenvalue {worst:.12}"));
    assert!(ok);
}

#[test]
#[ignore = "stretch: root of a 2000-point instance, long running"]
fn criterion_10_large_instance_root() {
    let data = generate_gaussian(&SyntheticSpec {
        n: 2000,
        k: 10,
        sigma: 0.5,
        seed: 1,
    })
    .unwrap();
    let start = std::time::Instant::now();
    let root = root_bound(&data, &RunConfig::new(10)).unwrap();
    let ub = root.ub_cp.unwrap_or(f64::INFINITY);
    let (_, pp) = multistart_baseline(&data, 10, 10, 0, InitKind::PlusPlus);
    let best = ub.min(pp);
    let gap = (best - root.lb_cp) / best;
    let ok = gap <= 1e-2;
    report(
        10,
        ok,
        &format!("2000_10_0.5 root gap {gap:.3e} after {} rounds, {:.0}s", root.rounds, start.elapsed().as_secs_f64()),
    );
    assert!(ok);
}
