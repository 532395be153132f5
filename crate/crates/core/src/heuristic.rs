//! Upper bounds: Lloyd's algorithm, k-means++ seeding, constrained (COP)
//! k-means and the SDP-based initialisation.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{cluster_means, mssc_objective, Assignment, DataMatrix};
use crate::linalg::sym_eigen;

/// Cluster centres, one row per cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Centroids {
    pub m: DMatrix<f64>,
}

impl Centroids {
    pub fn k(&self) -> usize {
        self.m.nrows()
    }

    fn from_rows(rows: &[Vec<f64>]) -> Self {
        let d = rows.first().map_or(0, Vec::len);
        Self {
            m: DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]),
        }
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.k())
            .map(|i| self.m.row(i).iter().copied().collect())
            .collect()
    }
}

/// Must-link and cannot-link pairs over the original points.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub ml: Vec<(usize, usize)>,
    pub cl: Vec<(usize, usize)>,
}

impl ConstraintSet {
    /// Must-links joining every group member to the group's smallest point.
    pub fn from_groups(groups: &[Vec<usize>], cl: &[(usize, usize)]) -> Self {
        let mut ml = Vec::new();
        for g in groups {
            if let Some(&root) = g.iter().min() {
                ml.extend(g.iter().filter(|&&p| p != root).map(|&p| (root, p)));
            }
        }
        Self {
            ml,
            cl: cl.to_vec(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.ml.is_empty() && self.cl.is_empty()
    }

    /// True when `labels` respects every pair.
    pub fn satisfied_by(&self, labels: &[usize]) -> bool {
        self.ml.iter().all(|&(a, b)| labels[a] == labels[b])
            && self.cl.iter().all(|&(a, b)| labels[a] != labels[b])
    }
}

/// Outcome of [`cop_kmeans`].
#[derive(Debug, Clone, PartialEq)]
pub enum CopResult {
    Partition(Assignment, f64),
    EmptyPartition,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn point(data: &DataMatrix, i: usize) -> Vec<f64> {
    data.points().row(i).iter().copied().collect()
}

/// Index of the nearest centre, lowest index on ties.
fn nearest(p: &[f64], centres: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, m) in centres.iter().enumerate() {
        let d = sq_dist(p, m);
        if d < best_d {
            best = c;
            best_d = d;
        }
    }
    best
}

fn objective_with(data: &DataMatrix, labels: &[usize], centres: &[Vec<f64>]) -> f64 {
    (0..data.n())
        .map(|i| data.sq_dist_to(i, &centres[labels[i]]))
        .sum()
}

/// Moves the farthest point of the largest cluster into each empty cluster.
fn repair_empty(data: &DataMatrix, labels: &mut [usize], k: usize, centres: &[Vec<f64>]) {
    loop {
        let mut counts = vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let largest = (0..k).max_by_key(|&c| (counts[c], std::cmp::Reverse(c))).unwrap();
        let far = (0..data.n())
            .filter(|&i| labels[i] == largest)
            .map(|i| (i, data.sq_dist_to(i, &centres[largest])))
            .fold((usize::MAX, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc })
            .0;
        labels[far] = empty;
    }
}

/// Lloyd iterations from `init`. Returns the labels, final centres and
/// objective.
pub fn lloyd(data: &DataMatrix, init: &Centroids, max_iter: usize) -> (Assignment, Centroids, f64) {
    let (a, c, f, _) = lloyd_traced(data, init, max_iter);
    (a, c, f)
}

/// [`lloyd`] that also returns the objective after every iteration.
pub fn lloyd_traced(
    data: &DataMatrix,
    init: &Centroids,
    max_iter: usize,
) -> (Assignment, Centroids, f64, Vec<f64>) {
    let k = init.k();
    let n = data.n();
    let mut centres = init.rows();
    let mut labels: Vec<usize> = Vec::new();
    let mut trace = Vec::new();
    for _ in 0..max_iter.max(1) {
        let mut next: Vec<usize> = (0..n).map(|i| nearest(&point(data, i), &centres)).collect();
        repair_empty(data, &mut next, k, &centres);
        if next == labels {
            break;
        }
        labels = next;
        let a = Assignment {
            labels: labels.clone(),
            k,
        };
        centres = cluster_means(data, &a);
        trace.push(objective_with(data, &labels, &centres));
    }
    let f = *trace.last().expect("at least one iteration");
    (
        Assignment { labels, k },
        Centroids::from_rows(&centres),
        f,
        trace,
    )
}

/// k-means++ seeding with a fresh generator for `seed`.
pub fn kmeans_pp_init(data: &DataMatrix, k: usize, seed: u64) -> Centroids {
    kmeans_pp_with(data, k, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// k-means++ seeding: the first centre uniformly, the rest with probability
/// proportional to the squared distance to the nearest chosen centre.
pub fn kmeans_pp_with<R: Rng>(data: &DataMatrix, k: usize, rng: &mut R) -> Centroids {
    let n = data.n();
    assert!(k >= 1 && k <= n, "k must be in 1..=n");
    let mut chosen = vec![rng.random_range(0..n)];
    let mut d2: Vec<f64> = (0..n)
        .map(|i| data.sq_dist_to(i, &point(data, chosen[0])))
        .collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut t = rng.random_range(0.0..total);
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w <= 0.0 {
                    continue;
                }
                if t < w {
                    pick = Some(i);
                    break;
                }
                t -= w;
            }
            // rounding can run off the end; take the last positive weight
            pick.unwrap_or_else(|| d2.iter().rposition(|&w| w > 0.0).unwrap())
        } else {
            let rest: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            rest[rng.random_range(0..rest.len())]
        };
        chosen.push(next);
        let c = point(data, next);
        for (i, v) in d2.iter_mut().enumerate() {
            *v = v.min(data.sq_dist_to(i, &c));
        }
    }
    let rows: Vec<Vec<f64>> = chosen.iter().map(|&i| point(data, i)).collect();
    Centroids::from_rows(&rows)
}

/// `k` distinct data points chosen uniformly.
pub fn random_init<R: Rng>(data: &DataMatrix, k: usize, rng: &mut R) -> Centroids {
    let idx = rand::seq::index::sample(rng, data.n(), k);
    let rows: Vec<Vec<f64>> = idx.iter().map(|i| point(data, i)).collect();
    Centroids::from_rows(&rows)
}

fn adjacency(n: usize, pairs: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in pairs {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

/// Connected components of the must-link graph, as a component id per point.
fn ml_components(n: usize, ml: &[Vec<usize>]) -> Vec<usize> {
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = next;
        while let Some(p) = stack.pop() {
            for &q in &ml[p] {
                if comp[q] == usize::MAX {
                    comp[q] = next;
                    stack.push(q);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Constrained k-means. Points are visited in ascending order and each takes
/// the nearest centre that breaks no constraint with an already placed point.
pub fn cop_kmeans(
    data: &DataMatrix,
    init: &Centroids,
    cons: &ConstraintSet,
    max_iter: usize,
) -> CopResult {
    let n = data.n();
    let k = init.k();
    let ml = adjacency(n, &cons.ml);
    let cl = adjacency(n, &cons.cl);
    let comp = ml_components(n, &ml);
    let mut centres = init.rows();
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut prev: Vec<usize> = Vec::new();

    for _ in 0..max_iter.max(1) {
        let mut labels = vec![usize::MAX; n];
        for p in 0..n {
            let x = point(data, p);
            let mut order: Vec<(f64, usize)> =
                centres.iter().enumerate().map(|(c, m)| (sq_dist(&x, m), c)).collect();
            order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let pick = order.iter().map(|&(_, c)| c).find(|&c| {
                !ml[p].iter().any(|&q| labels[q] != usize::MAX && labels[q] != c)
                    && !cl[p].iter().any(|&q| labels[q] == c)
            });
            match pick {
                Some(c) => labels[p] = c,
                None => return CopResult::EmptyPartition,
            }
        }
        if !fill_empty_clusters(data, &mut labels, k, &comp, &centres) {
            return CopResult::EmptyPartition;
        }
        if labels == prev {
            break;
        }
        let a = Assignment {
            labels: labels.clone(),
            k,
        };
        centres = cluster_means(data, &a);
        let f = objective_with(data, &labels, &centres);
        if cons.satisfied_by(&labels) && best.as_ref().is_none_or(|b| f < b.1) {
            best = Some((labels.clone(), f));
        }
        prev = labels;
    }
    match best {
        Some((labels, _)) => {
            let a = Assignment { labels, k };
            // recompute with the canonical objective so callers get one number
            let f = mssc_objective(data, &a).expect("nonempty clusters");
            CopResult::Partition(a, f)
        }
        None => CopResult::EmptyPartition,
    }
}

/// Moves whole must-link components into empty clusters. Returns false when
/// no donor cluster has a component to spare.
fn fill_empty_clusters(
    data: &DataMatrix,
    labels: &mut [usize],
    k: usize,
    comp: &[usize],
    centres: &[Vec<f64>],
) -> bool {
    loop {
        let mut counts = vec![0usize; k];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return true;
        };
        // candidate components: those sharing their cluster with another component
        let mut best: Option<(usize, f64)> = None;
        for c in 0..k {
            let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
            let mut comps: Vec<usize> = members.iter().map(|&i| comp[i]).collect();
            comps.sort_unstable();
            comps.dedup();
            if comps.len() < 2 {
                continue;
            }
            for &cid in &comps {
                let cost: f64 = members
                    .iter()
                    .filter(|&&i| comp[i] == cid)
                    .map(|&i| data.sq_dist_to(i, &centres[c]))
                    .sum();
                if best.is_none_or(|b| cost > b.1) {
                    best = Some((cid, cost));
                }
            }
        }
        let Some((cid, _)) = best else {
            return false;
        };
        for (i, l) in labels.iter_mut().enumerate() {
            if comp[i] == cid {
                *l = empty;
            }
        }
    }
}

/// Centres extracted from a relaxation solution: the rank-`k` truncation of
/// `z` times the group-sum data, clustered by one seeded k-means run.
/// Returns `None` when `z` has fewer than `k` positive eigenvalues.
pub fn sdp_init(
    z: &DMatrix<f64>,
    groups: &[Vec<usize>],
    data: &DataMatrix,
    k: usize,
    seed: u64,
) -> Option<Centroids> {
    let m = z.nrows();
    assert_eq!(groups.len(), m, "one group per relaxation index");
    let eig = sym_eigen(z);
    let scale = eig.values.last().copied().unwrap_or(0.0).abs().max(1e-300);
    let top: Vec<usize> = (m.saturating_sub(k)..m).collect();
    if top.len() < k || top.iter().any(|&i| eig.values[i] <= 1e-9 * scale) {
        return None;
    }
    let z_hat = eig.reassemble(&top, |l| l);
    let mrows = z_hat * data.group_sums(groups);
    let md = DataMatrix::new(mrows).ok()?;
    let init = kmeans_pp_init(&md, k, seed);
    let (_, centres, _) = lloyd(&md, &init, 300);
    Some(centres)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitKind {
    PlusPlus,
    Random,
}

/// Best of `restarts` Lloyd runs. Restart `r` draws from its own stream of
/// the seeded generator, so results do not depend on thread scheduling.
pub fn multistart_baseline(
    data: &DataMatrix,
    k: usize,
    restarts: usize,
    seed: u64,
    init: InitKind,
) -> (Assignment, f64) {
    assert!(restarts >= 1, "at least one restart");
    let run = |r: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64);
        let c = match init {
            InitKind::PlusPlus => kmeans_pp_with(data, k, &mut rng),
            InitKind::Random => random_init(data, k, &mut rng),
        };
        let (a, _, _) = lloyd(data, &c, 300);
        let f = mssc_objective(data, &a).expect("lloyd keeps clusters nonempty");
        (f, r, a)
    };
    let (f, _, a) = (0..restarts)
        .into_par_iter()
        .map(run)
        .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)))
        .unwrap();
    (a, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::clustering_matrix;
    use proptest::prelude::*;
    use rand::Rng;

    fn blobs(seed: u64, n: usize) -> DataMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let c = (i % 3) as f64 * 5.0;
                vec![c + rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]
            })
            .collect();
        DataMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn converged_centres_are_a_fixed_point() {
        let d = blobs(1, 30);
        let (a, c, f) = lloyd(&d, &kmeans_pp_init(&d, 3, 0), 100);
        let (_, _, _, trace) = lloyd_traced(&d, &c, 100);
        assert_eq!(trace.len(), 1);
        let (a2, _, f2) = lloyd(&d, &c, 100);
        assert_eq!(a, a2);
        assert_eq!(f, f2);
    }

    #[test]
    fn two_points_two_clusters() {
        let d = DataMatrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let init = Centroids::from_rows(&[vec![0.2], vec![0.3]]);
        let (_, _, f) = lloyd(&d, &init, 10);
        assert_eq!(f, 0.0);
    }

    #[test]
    fn kmeans_pp_small_cases() {
        let d = blobs(2, 9);
        let c = kmeans_pp_init(&d, 1, 5);
        assert_eq!(c.k(), 1);
        let all = kmeans_pp_init(&d, 9, 5);
        let mut rows = all.rows();
        rows.sort_by(|a, b| a.partial_cmp(b).unwrap());
        rows.dedup();
        assert_eq!(rows.len(), 9);
    }

    #[test]
    fn kmeans_pp_second_pick_frequencies() {
        // points 0, 1, 3 on a line; given the first pick, the second is drawn
        // with probability proportional to squared distance
        let d = DataMatrix::from_rows(&[vec![0.0], vec![1.0], vec![3.0]]).unwrap();
        let dist = |a: f64, b: f64| (a - b) * (a - b);
        let xs = [0.0, 1.0, 3.0];
        let mut counts = [[0usize; 3]; 3];
        for seed in 0..10_000u64 {
            let c = kmeans_pp_init(&d, 2, seed);
            let first = xs.iter().position(|&x| x == c.m[(0, 0)]).unwrap();
            let second = xs.iter().position(|&x| x == c.m[(1, 0)]).unwrap();
            counts[first][second] += 1;
        }
        for f in 0..3 {
            let total: usize = counts[f].iter().sum();
            let w: Vec<f64> = xs.iter().map(|&x| dist(x, xs[f])).collect();
            let ws: f64 = w.iter().sum();
            for s in 0..3 {
                let p = w[s] / ws;
                let mean = p * total as f64;
                let sd = (total as f64 * p * (1.0 - p)).sqrt();
                assert!((counts[f][s] as f64 - mean).abs() <= 3.0 * sd + 1e-9);
            }
        }
    }

    #[test]
    fn cop_without_constraints_matches_lloyd() {
        let d = blobs(3, 24);
        let init = kmeans_pp_init(&d, 3, 1);
        let (a, _, f) = lloyd(&d, &init, 100);
        match cop_kmeans(&d, &init, &ConstraintSet::default(), 100) {
            CopResult::Partition(b, g) => {
                assert_eq!(a, b);
                assert!((f - g).abs() < 1e-9 * (1.0 + f));
            }
            CopResult::EmptyPartition => panic!("unconstrained run cannot fail"),
        }
    }

    #[test]
    fn cop_infeasible_cannot_link() {
        let d = DataMatrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        let init = Centroids::from_rows(&[vec![1.0]]);
        let cons = ConstraintSet {
            ml: vec![],
            cl: vec![(0, 1)],
        };
        assert_eq!(cop_kmeans(&d, &init, &cons, 10), CopResult::EmptyPartition);
    }

    #[test]
    fn cop_respects_constraints() {
        let d = blobs(4, 30);
        let cons = ConstraintSet {
            ml: vec![(0, 1), (3, 4), (4, 10)],
            cl: vec![(0, 3), (1, 2), (10, 13)],
        };
        for seed in 0..20 {
            if let CopResult::Partition(a, _) = cop_kmeans(&d, &kmeans_pp_init(&d, 3, seed), &cons, 50) {
                assert!(cons.satisfied_by(&a.labels));
                a.check().unwrap();
            }
        }
    }

    #[test]
    fn sdp_init_on_exact_clustering_recovers_centroids() {
        let d = blobs(5, 15);
        let a = Assignment::new((0..15).map(|i| i % 3).collect(), 3).unwrap();
        let z = clustering_matrix(&a);
        let groups: Vec<Vec<usize>> = (0..15).map(|i| vec![i]).collect();
        let c = sdp_init(&z, &groups, &d, 3, 0).unwrap();
        let mut want = cluster_means(&d, &a);
        let mut got = c.rows();
        let key = |v: &Vec<f64>| v[0];
        want.sort_by(|x, y| key(x).total_cmp(&key(y)));
        got.sort_by(|x, y| key(x).total_cmp(&key(y)));
        for (g, w) in got.iter().zip(&want) {
            assert!(sq_dist(g, w) < 1e-18 + 1e-12 * w.iter().map(|x| x * x).sum::<f64>());
        }
    }

    #[test]
    fn sdp_init_degenerate_spectrum() {
        let d = blobs(6, 6);
        let z = DMatrix::from_element(6, 6, 1.0 / 6.0);
        let groups: Vec<Vec<usize>> = (0..6).map(|i| vec![i]).collect();
        assert!(sdp_init(&z, &groups, &d, 2, 0).is_none());
    }

    #[test]
    fn multistart_single_restart_reproducible() {
        let d = blobs(7, 40);
        let (a, f) = multistart_baseline(&d, 3, 1, 11, InitKind::PlusPlus);
        let (b, g) = multistart_baseline(&d, 3, 1, 11, InitKind::PlusPlus);
        assert_eq!((a, f), (b, g));
        let mut prev = f64::INFINITY;
        for r in 1..6 {
            let (_, f) = multistart_baseline(&d, 3, r, 11, InitKind::Random);
            assert!(f <= prev);
            prev = f;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn lloyd_objective_never_increases(seed in any::<u64>()) {
            let d = blobs(seed, 20);
            let (_, _, f, trace) = lloyd_traced(&d, &kmeans_pp_init(&d, 3, seed), 100);
            prop_assert!(trace.windows(2).all(|w| w[1] <= w[0] + 1e-12 * (1.0 + w[0])));
            prop_assert_eq!(f, *trace.last().unwrap());
        }
    }
}
