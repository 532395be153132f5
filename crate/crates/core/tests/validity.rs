mod common;

use mssc::branch_bound::{separate, shrink_merge, Node};
use mssc::cuts::{Cut, CutPool};
use mssc::dataset::{clustering_matrix, gram, Assignment};
use mssc::linalg::lambda_max;
use mssc::safe_bound::safe_lower_bound;
use mssc::sdp::{solve, SdpSolution, SolveStatus};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all_cuts(n: usize, k: usize) -> Vec<Cut> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out.push(Cut::pair(i, j));
            }
            for h in (j + 1)..n {
                if i != j && i != h {
                    out.push(Cut::triangle(i, j, h));
                }
            }
        }
    }
    fn subsets(n: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x);
            subsets(n, size, x + 1, cur, out);
            cur.pop();
        }
    }
    let mut qs = Vec::new();
    subsets(n, k + 1, 0, &mut Vec::new(), &mut qs);
    out.extend(qs.into_iter().map(|q| Cut::clique(q, n, k)));
    out
}

#[test]
fn cuts_hold_at_every_partition_of_six_points() {
    for k in 1..=4 {
        let cuts = all_cuts(6, k);
        for labels in common::partitions(6, k) {
            let z = clustering_matrix(&Assignment { labels, k });
            for c in &cuts {
                assert!(c.violation(&z) <= 1e-12, "{c:?} violated");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clustering_matrices_have_unit_top_eigenvalue(seed in any::<u64>(), n in 2usize..15) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.random_range(1..=n);
        let mut z = DMatrix::zeros(n, n);
        let terms = rng.random_range(1..5);
        for _ in 0..terms {
            let mut labels: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.random_range(0..k) }).collect();
            for i in (1..n).rev() {
                labels.swap(i, rng.random_range(0..=i));
            }
            z += clustering_matrix(&Assignment { labels, k }) / terms as f64;
        }
        prop_assert!(lambda_max(&z) <= 1.0 + 1e-9);
    }

    /// The bound holds for arbitrary multipliers, not only for solver output.
    #[test]
    fn safe_bound_with_random_multipliers(seed in any::<u64>(), n in 4usize..=7, k in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = common::random_data(seed, n, 2).centered();
        let mut node = Node::root(n, CutPool::default());
        if rng.random_bool(0.5) {
            node = shrink_merge(&node, (0, 1)).unwrap();
        }
        if rng.random_bool(0.5) {
            node = separate(&node, (0, node.m() - 1));
        }
        let Some((_, opt)) = common::constrained_optimum(&data, k, &node.groups, &node.cl_global) else {
            return Ok(());
        };
        let m = node.m();
        for i in 0..m {
            node.pool.push(Cut::pair(i, (i + 1) % m));
        }
        // m >= 3 here
        node.pool.push(Cut::triangle(0, 1, 2));
        let p = node.problem(&data, gram(&data).trace_w, k).unwrap();
        let mut r = |lo: f64, hi: f64| rng.random_range(lo..hi);
        let sol = SdpSolution {
            z: DMatrix::zeros(m, m),
            obj_sdp: 0.0,
            y: (0..=m).map(|_| r(-3.0, 3.0)).collect(),
            u: p.cannot_link.iter().map(|_| r(-2.0, 2.0)).collect(),
            v: p.cuts.cuts().iter().map(|c| if c.is_upper() { 0.0 } else { r(0.0, 1.0) }).collect(),
            w: p.cuts.cuts().iter().map(|c| if c.is_upper() { r(0.0, 1.0) } else { 0.0 }).collect(),
            p_nonneg: DMatrix::from_fn(m, m, |_, _| r(0.0, 0.5)),
            s_psd: DMatrix::zeros(m, m),
            kkt_residual: 1.0,
            status: SolveStatus::MaxIterations,
            iterations: 0,
            sigma: 1.0,
            best_checked_lb: None,
        };
        let rep = safe_lower_bound(&p, &sol).unwrap();
        prop_assert!(rep.lb_mssc <= opt, "bound {} above optimum {}", rep.lb_mssc, opt);
    }

    #[test]
    fn safe_bound_of_solved_relaxation(seed in any::<u64>(), n in 4usize..=8, k in 2usize..=3) {
        let data = common::random_data(seed, n, 2).centered();
        let g = gram(&data);
        let p = mssc::sdp::build_root(&g, k).unwrap();
        let sol = solve(&p, 1e-6).unwrap();
        let rep = safe_lower_bound(&p, &sol).unwrap();
        let opt = common::brute_force(&data, k).1;
        prop_assert!(rep.lb_mssc <= opt, "{:?} opt {:e} diff {:e}", rep, opt, rep.lb_mssc - opt);
        prop_assert!(rep.correction <= 0.0);
    }
}
