//! Pair, triangle and clique inequalities: evaluation, separation, purging and
//! remapping under must-link merges.
//!
//! Index conventions (all zero-based, local to the current problem):
//!
//! * `Pair [i, j]` is `Z_ij - Z_ii <= 0`.
//! * `Triangle [i, j, h]` with `j < h` is `Z_ij + Z_ih - Z_ii - Z_jh <= 0`.
//! * `Clique Q` (sorted, `|Q| = k + 1`) is `sum_{a<b in Q} Z_ab >= 1/(n - k + 1)`
//!   with `n` the original number of points.

use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CutKind {
    Pair,
    Triangle,
    Clique,
}

/// One valid inequality. Equality and hashing only look at `kind` and `idx`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Cut {
    pub kind: CutKind,
    pub idx: Vec<usize>,
    /// Right-hand side of the clique inequality; zero for the other kinds.
    pub rhs: f64,
}

impl PartialEq for Cut {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.idx == other.idx
    }
}

impl Eq for Cut {}

impl Hash for Cut {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind.hash(state);
        self.idx.hash(state);
    }
}

impl Cut {
    pub fn pair(i: usize, j: usize) -> Self {
        assert_ne!(i, j);
        Self {
            kind: CutKind::Pair,
            idx: vec![i, j],
            rhs: 0.0,
        }
    }

    pub fn triangle(i: usize, j: usize, h: usize) -> Self {
        assert!(i != j && i != h && j != h);
        let (j, h) = if j < h { (j, h) } else { (h, j) };
        Self {
            kind: CutKind::Triangle,
            idx: vec![i, j, h],
            rhs: 0.0,
        }
    }

    pub fn clique(mut q: Vec<usize>, n_original: usize, k: usize) -> Self {
        q.sort_unstable();
        q.dedup();
        assert_eq!(q.len(), k + 1, "clique needs k + 1 distinct indices");
        Self {
            kind: CutKind::Clique,
            idx: q,
            rhs: clique_rhs(n_original, k),
        }
    }

    /// `-inf` for the `<=` families.
    pub fn rhs_lo(&self) -> f64 {
        match self.kind {
            CutKind::Clique => self.rhs,
            _ => f64::NEG_INFINITY,
        }
    }

    /// `+inf` for cliques.
    pub fn rhs_hi(&self) -> f64 {
        match self.kind {
            CutKind::Clique => f64::INFINITY,
            _ => 0.0,
        }
    }

    /// True for the `<= 0` families (pair, triangle).
    pub fn is_upper(&self) -> bool {
        self.kind != CutKind::Clique
    }

    /// The linear form as `(a, b, c)` triples with `a <= b`, meaning
    /// `lhs(Z) = sum c * Z_ab`.
    pub fn terms(&self) -> Vec<(usize, usize, f64)> {
        let ord = |a: usize, b: usize| if a <= b { (a, b) } else { (b, a) };
        match self.kind {
            CutKind::Pair => {
                let (i, j) = (self.idx[0], self.idx[1]);
                let (a, b) = ord(i, j);
                vec![(a, b, 1.0), (i, i, -1.0)]
            }
            CutKind::Triangle => {
                let (i, j, h) = (self.idx[0], self.idx[1], self.idx[2]);
                let (a, b) = ord(i, j);
                let (c, d) = ord(i, h);
                vec![(a, b, 1.0), (c, d, 1.0), (i, i, -1.0), (j, h, -1.0)]
            }
            CutKind::Clique => {
                let q = &self.idx;
                let mut t = Vec::with_capacity(q.len() * (q.len() - 1) / 2);
                for (x, &a) in q.iter().enumerate() {
                    for &b in &q[x + 1..] {
                        t.push((a, b, 1.0));
                    }
                }
                t
            }
        }
    }

    pub fn lhs(&self, z: &DMatrix<f64>) -> f64 {
        let q = &self.idx;
        match self.kind {
            CutKind::Pair => z[(q[0], q[1])] - z[(q[0], q[0])],
            CutKind::Triangle => {
                let (i, j, h) = (q[0], q[1], q[2]);
                z[(i, j)] + z[(i, h)] - z[(i, i)] - z[(j, h)]
            }
            CutKind::Clique => {
                let mut s = 0.0;
                for (x, &a) in q.iter().enumerate() {
                    for &b in &q[x + 1..] {
                        s += z[(a, b)];
                    }
                }
                s
            }
        }
    }

    /// Positive when `z` violates the cut, by that amount.
    pub fn violation(&self, z: &DMatrix<f64>) -> f64 {
        match self.kind {
            CutKind::Clique => self.rhs - self.lhs(z),
            _ => self.lhs(z),
        }
    }

    /// Like [`Cut::violation`] but checks indices against the matrix size.
    pub fn checked_violation(&self, z: &DMatrix<f64>) -> crate::Result<f64> {
        let dim = z.nrows();
        if let Some(&index) = self.idx.iter().find(|&&i| i >= dim) {
            return Err(crate::Error::IndexOutOfRange { index, dim });
        }
        Ok(self.violation(z))
    }

    /// Index tuple after merging local `j` into `i` (`i < j`), or `None` when
    /// the cut touches both.
    pub fn remapped(&self, i: usize, j: usize) -> Option<Cut> {
        if self.idx.contains(&i) && self.idx.contains(&j) {
            return None;
        }
        let map = |x: usize| match x.cmp(&j) {
            std::cmp::Ordering::Equal => i,
            std::cmp::Ordering::Greater => x - 1,
            std::cmp::Ordering::Less => x,
        };
        let idx: Vec<usize> = self.idx.iter().map(|&x| map(x)).collect();
        Some(match self.kind {
            CutKind::Pair => Cut::pair(idx[0], idx[1]),
            CutKind::Triangle => Cut::triangle(idx[0], idx[1], idx[2]),
            CutKind::Clique => {
                let mut q = idx;
                q.sort_unstable();
                Cut {
                    kind: CutKind::Clique,
                    idx: q,
                    rhs: self.rhs,
                }
            }
        })
    }
}

pub fn clique_rhs(n_original: usize, k: usize) -> f64 {
    1.0 / (n_original - k + 1) as f64
}

/// Ordered set of cuts without duplicates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CutPool {
    cuts: Vec<Cut>,
    #[serde(skip)]
    index: HashSet<Cut>,
    pub eps_viol: f64,
    pub eps_act: f64,
}

impl Default for CutPool {
    fn default() -> Self {
        Self::new(1e-4, 1e-6)
    }
}

impl PartialEq for CutPool {
    fn eq(&self, other: &Self) -> bool {
        self.cuts == other.cuts && self.eps_viol == other.eps_viol && self.eps_act == other.eps_act
    }
}

impl CutPool {
    pub fn new(eps_viol: f64, eps_act: f64) -> Self {
        Self {
            cuts: Vec::new(),
            index: HashSet::new(),
            eps_viol,
            eps_act,
        }
    }

    /// An empty pool with the same thresholds.
    pub fn empty_like(&self) -> Self {
        Self::new(self.eps_viol, self.eps_act)
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn contains(&self, c: &Cut) -> bool {
        // the index is skipped by serde; fall back to a scan after a round trip
        if self.index.len() != self.cuts.len() {
            return self.cuts.contains(c);
        }
        self.index.contains(c)
    }

    /// Adds `c` unless already present.
    pub fn push(&mut self, c: Cut) -> bool {
        if self.index.len() != self.cuts.len() {
            self.index = self.cuts.iter().cloned().collect();
        }
        if self.index.insert(c.clone()) {
            self.cuts.push(c);
            true
        } else {
            false
        }
    }

    pub fn extend(&mut self, cuts: impl IntoIterator<Item = Cut>) -> usize {
        cuts.into_iter().filter(|c| self.push(c.clone())).count()
    }

    pub fn count(&self, kind: CutKind) -> usize {
        self.cuts.iter().filter(|c| c.kind == kind).count()
    }
}

/// Default number of random candidates examined per family.
pub const DEFAULT_BUDGET: usize = 100_000;
/// Default fraction of violated candidates that is kept.
pub const DEFAULT_KEEP_FRACTION: f64 = 0.05;

/// Random separation of pair and triangle inequalities; the budget applies
/// to each family separately. Pairs come first in the output.
pub fn separate_pairs_triangles<R: Rng>(
    z: &DMatrix<f64>,
    pool: &CutPool,
    budget_t: usize,
    keep_fraction: f64,
    rng: &mut R,
) -> Vec<Cut> {
    let mut out = separate_family(z, pool, CutKind::Pair, budget_t, keep_fraction, rng);
    out.extend(separate_family(
        z,
        pool,
        CutKind::Triangle,
        budget_t,
        keep_fraction,
        rng,
    ));
    out
}

fn separate_family<R: Rng>(
    z: &DMatrix<f64>,
    pool: &CutPool,
    kind: CutKind,
    budget: usize,
    keep_fraction: f64,
    rng: &mut R,
) -> Vec<Cut> {
    let m = z.nrows();
    let total: u128 = match kind {
        CutKind::Pair if m >= 2 => (m * (m - 1)) as u128,
        CutKind::Triangle if m >= 3 => m as u128 * ((m - 1) * (m - 2) / 2) as u128,
        _ => 0,
    };
    if total == 0 || budget == 0 {
        return Vec::new();
    }
    let mut found: Vec<(f64, Cut)> = Vec::new();
    let mut consider = |c: Cut| {
        let v = c.violation(z);
        if v >= pool.eps_viol && !pool.contains(&c) {
            found.push((v, c));
        }
    };
    if total <= budget as u128 {
        for i in 0..m {
            match kind {
                CutKind::Pair => (0..m).filter(|&j| j != i).for_each(|j| consider(Cut::pair(i, j))),
                _ => {
                    for j in 0..m {
                        for h in (j + 1)..m {
                            if j != i && h != i {
                                consider(Cut::triangle(i, j, h));
                            }
                        }
                    }
                }
            }
        }
    } else {
        let mut seen: HashSet<(usize, usize, usize)> = HashSet::with_capacity(budget);
        while seen.len() < budget {
            let i = rng.random_range(0..m);
            let cand = match kind {
                CutKind::Pair => {
                    let j = rng.random_range(0..m - 1);
                    let j = if j >= i { j + 1 } else { j };
                    (i, j, usize::MAX)
                }
                _ => {
                    let j = rng.random_range(0..m);
                    let h = rng.random_range(0..m);
                    if j == i || h == i || j == h {
                        continue;
                    }
                    (i, j.min(h), j.max(h))
                }
            };
            if !seen.insert(cand) {
                continue;
            }
            consider(match kind {
                CutKind::Pair => Cut::pair(cand.0, cand.1),
                _ => Cut::triangle(cand.0, cand.1, cand.2),
            });
        }
    }
    select_most_violated(found, keep_fraction)
}

fn select_most_violated(mut found: Vec<(f64, Cut)>, keep_fraction: f64) -> Vec<Cut> {
    if found.is_empty() {
        return Vec::new();
    }
    // stable sort keeps the deterministic candidate order among ties
    found.sort_by(|a, b| b.0.total_cmp(&a.0));
    let keep = ((keep_fraction * found.len() as f64).ceil() as usize).clamp(1, found.len());
    found.truncate(keep);
    found.into_iter().map(|(_, c)| c).collect()
}

/// Greedy clique separation: from every seed, repeatedly add the index with
/// the smallest total `Z` weight to the current set.
pub fn separate_cliques(
    z: &DMatrix<f64>,
    k: usize,
    n_original: usize,
    pool: &CutPool,
) -> Vec<Cut> {
    let m = z.nrows();
    if m < k + 1 {
        return Vec::new();
    }
    let rhs = clique_rhs(n_original, k);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut weight = vec![0.0; m];
    let mut in_q = vec![false; m];
    for seed in 0..m {
        in_q.fill(false);
        in_q[seed] = true;
        let mut q = vec![seed];
        let mut lhs = 0.0;
        for (j, w) in weight.iter_mut().enumerate() {
            *w = z[(seed, j)];
        }
        while q.len() < k + 1 {
            let mut best = usize::MAX;
            let mut best_w = f64::INFINITY;
            for j in 0..m {
                if !in_q[j] && weight[j] < best_w {
                    best = j;
                    best_w = weight[j];
                }
            }
            lhs += best_w;
            in_q[best] = true;
            q.push(best);
            for (j, w) in weight.iter_mut().enumerate() {
                *w += z[(best, j)];
            }
        }
        if rhs - lhs >= pool.eps_viol {
            let c = Cut::clique(q, n_original, k);
            if !pool.contains(&c) && seen.insert(c.clone()) {
                out.push(c);
            }
        }
    }
    out
}

/// Keeps the cuts that are tight at `z` (slack at most `eps_act`) or carry a
/// positive multiplier. `duals` is indexed like `pool.cuts()`.
pub fn purge_inactive(pool: &CutPool, z: &DMatrix<f64>, duals: Option<&[f64]>) -> CutPool {
    let mut out = pool.empty_like();
    let mut removed = 0usize;
    for (c_idx, c) in pool.cuts().iter().enumerate() {
        let slack = -c.violation(z);
        let dual = duals.map_or(0.0, |d| d[c_idx]);
        if slack <= pool.eps_act || dual > 0.0 {
            out.push(c.clone());
        } else {
            removed += 1;
        }
    }
    if removed > 0 {
        log::trace!("purged {removed} inactive cuts, {} kept", out.len());
    }
    out
}

/// Cut pool of the child obtained by merging local `i` and `j` (`i < j`).
pub fn inherit_remap(pool: &CutPool, merge: (usize, usize)) -> CutPool {
    let (i, j) = merge;
    assert!(i < j, "merge pair must be ordered");
    let mut out = pool.empty_like();
    for c in pool.cuts() {
        if let Some(r) = c.remapped(i, j) {
            out.push(r);
        }
    }
    out
}
