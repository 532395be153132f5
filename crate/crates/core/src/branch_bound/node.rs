use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cuts::{inherit_remap, CutPool};
use crate::dataset::{Assignment, DataMatrix};
use crate::error::{Error, Result};
use crate::sdp::{ShrunkProblem, WarmStart};

/// One subproblem: a partition of the points into must-link groups, the
/// cannot-link pairs between original points, and the cuts inherited from
/// the parent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    /// Sorted groups, ordered by their smallest point.
    pub groups: Vec<Vec<usize>>,
    /// Cannot-link pairs `(p, q)` with `p < q` in original indices.
    pub cl_global: Vec<(usize, usize)>,
    pub pool: CutPool,
    /// Best valid bound known before this node is solved.
    pub lb: f64,
    pub depth: usize,
    #[serde(skip)]
    pub warm: Option<WarmStart>,
}

impl Node {
    pub fn root(n: usize, pool: CutPool) -> Self {
        Self {
            id: 0,
            groups: (0..n).map(|p| vec![p]).collect(),
            cl_global: Vec::new(),
            pool,
            lb: f64::NEG_INFINITY,
            depth: 0,
            warm: None,
        }
    }

    pub fn m(&self) -> usize {
        self.groups.len()
    }

    pub fn n(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    /// Group index of every original point.
    pub fn local_index(&self) -> Vec<usize> {
        let mut idx = vec![0; self.n()];
        for (r, g) in self.groups.iter().enumerate() {
            for &p in g {
                idx[p] = r;
            }
        }
        idx
    }

    /// Cannot-link pairs between groups, sorted and deduplicated. Fails when a
    /// pair falls inside one group.
    pub fn local_cannot_link(&self) -> Result<Vec<(usize, usize)>> {
        let idx = self.local_index();
        let mut out = Vec::with_capacity(self.cl_global.len());
        for &(p, q) in &self.cl_global {
            let (a, b) = (idx[p], idx[q]);
            if a == b {
                return Err(Error::InfeasibleMerge(p, q));
            }
            out.push((a.min(b), a.max(b)));
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// The relaxation of this node. `data` must be the centered data the
    /// search runs on and `trace_w` its Gram trace.
    pub fn problem(&self, data: &DataMatrix, trace_w: f64, k: usize) -> Result<ShrunkProblem> {
        let sums = data.group_sums(&self.groups);
        let mut w = &sums * sums.transpose();
        crate::linalg::symmetrize(&mut w);
        let p = ShrunkProblem {
            w_shrunk: w,
            mult: self.groups.iter().map(Vec::len).collect(),
            k,
            cannot_link: self.local_cannot_link()?,
            cuts: self.pool.clone(),
            n_original: data.n(),
            trace_w,
        };
        p.validate()?;
        Ok(p)
    }

    /// Labels giving every point the label of its group.
    pub fn group_assignment(&self) -> Assignment {
        let idx = self.local_index();
        Assignment {
            labels: idx,
            k: self.m(),
        }
    }
}

/// Child where local groups `i < j` are merged. The merged group takes the
/// place of `i`; groups after `j` shift down by one.
pub fn shrink_merge(node: &Node, (i, j): (usize, usize)) -> Result<Node> {
    if i >= j || j >= node.m() {
        return Err(Error::IndexOutOfRange {
            index: j.max(i),
            dim: node.m(),
        });
    }
    let mut groups = node.groups.clone();
    let gj = groups.remove(j);
    groups[i].extend(gj);
    groups[i].sort_unstable();
    let child = Node {
        id: 0,
        groups,
        cl_global: node.cl_global.clone(),
        pool: inherit_remap(&node.pool, (i, j)),
        lb: node.lb,
        depth: node.depth + 1,
        warm: node.warm.as_ref().map(|w| w.merged(i, j)),
    };
    if let Err(Error::InfeasibleMerge(..)) = child.local_cannot_link() {
        return Err(Error::InfeasibleMerge(i, j));
    }
    Ok(child)
}

/// Child where groups `i` and `j` must be separated: every cross pair of
/// original points becomes a cannot-link.
pub fn separate(node: &Node, (i, j): (usize, usize)) -> Node {
    let mut cl = node.cl_global.clone();
    for &p in &node.groups[i] {
        for &q in &node.groups[j] {
            cl.push((p.min(q), p.max(q)));
        }
    }
    cl.sort_unstable();
    cl.dedup();
    Node {
        id: 0,
        groups: node.groups.clone(),
        cl_global: cl,
        pool: node.pool.clone(),
        lb: node.lb,
        depth: node.depth + 1,
        warm: node.warm.clone(),
    }
}

/// Whether the graph on `m` vertices with edges `edges` admits a proper
/// colouring with `k` colours. Exact backtracking in DSATUR order.
pub fn k_colorable(m: usize, edges: &[(usize, usize)], k: usize) -> bool {
    if m == 0 {
        return true;
    }
    if k == 0 {
        return false;
    }
    let mut adj = vec![Vec::new(); m];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    if edges.is_empty() {
        return true;
    }
    let mut colour = vec![usize::MAX; m];
    fn pick(adj: &[Vec<usize>], colour: &[usize]) -> Option<usize> {
        let mut best: Option<(usize, usize, usize)> = None;
        for v in 0..adj.len() {
            if colour[v] != usize::MAX {
                continue;
            }
            let mut seen: Vec<usize> = adj[v]
                .iter()
                .filter(|&&u| colour[u] != usize::MAX)
                .map(|&u| colour[u])
                .collect();
            seen.sort_unstable();
            seen.dedup();
            let key = (seen.len(), adj[v].len(), v);
            if best.is_none_or(|b| (key.0, key.1) > (b.0, b.1)) {
                best = Some(key);
            }
        }
        best.map(|b| b.2)
    }
    fn go(adj: &[Vec<usize>], colour: &mut [usize], k: usize, used: usize) -> bool {
        let Some(v) = pick(adj, colour) else {
            return true;
        };
        // a fresh colour beyond `used` is interchangeable with any other fresh one
        for c in 0..k.min(used + 1) {
            if adj[v].iter().all(|&u| colour[u] != c) {
                colour[v] = c;
                if go(adj, colour, k, used.max(c + 1)) {
                    return true;
                }
                colour[v] = usize::MAX;
            }
        }
        false
    }
    go(&adj, &mut colour, k, 0)
}

/// Outcome of the branching rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchChoice {
    /// The pair with the largest score.
    Pair { i: usize, j: usize, score: f64 },
    /// Every score is below the integrality threshold; `best` is still the
    /// top-scoring pair when one exists.
    Integral { best: Option<(usize, usize, f64)> },
}

/// Scores below this count as integral.
pub const INTEGRALITY_THRESHOLD: f64 = 1e-5;

/// Picks the pair maximising `min(Z_ij, ||Z_i - Z_j||^2)` over pairs that
/// are not in `excluded`. Ties go to the lexicographically smallest pair.
pub fn select_branching_pair_excluding(
    z: &DMatrix<f64>,
    excluded: &[(usize, usize)],
) -> BranchChoice {
    let m = z.nrows();
    let norms: Vec<f64> = (0..m).map(|i| z.row(i).norm_squared()).collect();
    let zz = z * z.transpose();
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..m {
        for j in (i + 1)..m {
            if excluded.binary_search(&(i, j)).is_ok() {
                continue;
            }
            let dist = (norms[i] + norms[j] - 2.0 * zz[(i, j)]).max(0.0);
            let score = z[(i, j)].min(dist);
            if best.is_none_or(|b| score > b.2) {
                best = Some((i, j, score));
            }
        }
    }
    match best {
        Some((i, j, score)) if score >= INTEGRALITY_THRESHOLD => BranchChoice::Pair { i, j, score },
        _ => BranchChoice::Integral { best },
    }
}

/// [`select_branching_pair_excluding`] with nothing excluded.
pub fn select_branching_pair(z: &DMatrix<f64>) -> BranchChoice {
    select_branching_pair_excluding(z, &[])
}

/// Reads a partition of the local indices off a (near) clustering matrix:
/// `j` joins `i`'s cluster when `Z_ij >= Z_ii / 2`. Returns `None` unless
/// exactly `k` clusters come out.
pub fn extract_partition(z: &DMatrix<f64>, k: usize) -> Option<Vec<usize>> {
    let m = z.nrows();
    let mut label = vec![usize::MAX; m];
    let mut next = 0;
    for i in 0..m {
        if label[i] != usize::MAX {
            continue;
        }
        let half = 0.5 * z[(i, i)];
        for j in i..m {
            if label[j] == usize::MAX && z[(i, j)] >= half {
                label[j] = next;
            }
        }
        next += 1;
        if next > k {
            return None;
        }
    }
    (next == k).then_some(label)
}
