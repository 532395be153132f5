#![allow(dead_code)]

use mssc::dataset::{mssc_objective, Assignment, DataMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every labelling of `n` points into exactly `k` nonempty clusters, each
/// partition once (restricted growth strings).
pub fn partitions(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, used: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            if used == k {
                out.push(cur.clone());
            }
            return;
        }
        if k - used > n - i {
            return;
        }
        for c in 0..(used + 1).min(k) {
            cur.push(c);
            go(i + 1, used.max(c + 1), n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, 0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Best partition respecting the must-link groups and cannot-link pairs, by
/// enumeration. `None` when no partition is feasible.
pub fn constrained_optimum(
    data: &DataMatrix,
    k: usize,
    groups: &[Vec<usize>],
    cl: &[(usize, usize)],
) -> Option<(Assignment, f64)> {
    let mut best: Option<(Assignment, f64)> = None;
    for local in partitions(groups.len(), k) {
        let mut labels = vec![0; data.n()];
        for (r, g) in groups.iter().enumerate() {
            for &p in g {
                labels[p] = local[r];
            }
        }
        if cl.iter().any(|&(a, b)| labels[a] == labels[b]) {
            continue;
        }
        let a = Assignment { labels, k };
        let f = mssc_objective(data, &a).unwrap();
        if best.as_ref().is_none_or(|b| f < b.1) {
            best = Some((a, f));
        }
    }
    best
}

pub fn brute_force(data: &DataMatrix, k: usize) -> (Assignment, f64) {
    let groups: Vec<Vec<usize>> = (0..data.n()).map(|p| vec![p]).collect();
    constrained_optimum(data, k, &groups, &[]).unwrap()
}

/// Uniform points in the unit cube.
pub fn random_data(seed: u64, n: usize, d: usize) -> DataMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect();
    DataMatrix::from_rows(&rows).unwrap()
}

pub fn data_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}
