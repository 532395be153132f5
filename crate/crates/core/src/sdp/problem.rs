use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cuts::CutPool;
use crate::dataset::GramMatrix;
use crate::error::{Error, Result};

/// The relaxation at one tree node, in the merged (local) index space.
///
/// Minimises `<-W, Z>` subject to `Z mult = 1`, `<Diag(mult), Z> = k`,
/// `Z_ab = 0` on cannot-link pairs, the cuts in `cuts`, `Z >= 0` and
/// `Z` positive semidefinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrunkProblem {
    pub w_shrunk: DMatrix<f64>,
    pub mult: Vec<usize>,
    pub k: usize,
    /// Cannot-link pairs `(a, b)` with `a < b`.
    pub cannot_link: Vec<(usize, usize)>,
    pub cuts: CutPool,
    /// Number of points before any merge.
    pub n_original: usize,
    /// Trace of the original Gram matrix; the MSSC value is `trace_w - <W, Z>`.
    pub trace_w: f64,
}

impl ShrunkProblem {
    pub fn m(&self) -> usize {
        self.w_shrunk.nrows()
    }

    pub fn mult_f64(&self) -> Vec<f64> {
        self.mult.iter().map(|&e| e as f64).collect()
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<()> {
        let m = self.m();
        if self.w_shrunk.ncols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: self.w_shrunk.ncols(),
            });
        }
        if self.mult.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: self.mult.len(),
            });
        }
        if self.mult.iter().any(|&e| e == 0) || self.mult.iter().sum::<usize>() != self.n_original {
            return Err(Error::InvalidConfig(
                "multiplicities must be positive and sum to n".into(),
            ));
        }
        if self.k == 0 || self.k > m {
            return Err(Error::InvalidK { k: self.k, n: m });
        }
        for &(a, b) in &self.cannot_link {
            if a >= b || b >= m {
                return Err(Error::IndexOutOfRange { index: b, dim: m });
            }
        }
        let mut cl = self.cannot_link.clone();
        cl.sort_unstable();
        cl.dedup();
        if cl.len() != self.cannot_link.len() {
            return Err(Error::InvalidConfig("duplicate cannot-link pair".into()));
        }
        for c in self.cuts.cuts() {
            if let Some(&index) = c.idx.iter().find(|&&i| i >= m) {
                return Err(Error::IndexOutOfRange { index, dim: m });
            }
        }
        Ok(())
    }

    /// `<-W, Z>`.
    pub fn objective(&self, z: &DMatrix<f64>) -> f64 {
        -crate::linalg::dot(&self.w_shrunk, z)
    }
}

/// The unmerged root relaxation.
pub fn build_root(g: &GramMatrix, k: usize) -> Result<ShrunkProblem> {
    let n = g.n();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    Ok(ShrunkProblem {
        w_shrunk: g.w.clone(),
        mult: vec![1; n],
        k,
        cannot_link: Vec::new(),
        cuts: CutPool::default(),
        n_original: n,
        trace_w: g.trace_w,
    })
}

/// Largest absolute violation of each constraint family at `z`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PrimalResiduals {
    pub row_sum_err: f64,
    pub trace_err: f64,
    pub cl_err: f64,
    pub cut_err: f64,
    /// `max(0, -lambda_min(z))`.
    pub neg_eig: f64,
    /// `max(0, -min_ij z_ij)`.
    pub neg_entry: f64,
}

impl PrimalResiduals {
    pub fn max(&self) -> f64 {
        [
            self.row_sum_err,
            self.trace_err,
            self.cl_err,
            self.cut_err,
            self.neg_eig,
            self.neg_entry,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn primal_residuals(p: &ShrunkProblem, z: &DMatrix<f64>) -> Result<PrimalResiduals> {
    let m = p.m();
    if z.nrows() != m || z.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: z.nrows(),
        });
    }
    let e = p.mult_f64();
    let mut row_sum_err: f64 = 0.0;
    let mut trace = 0.0;
    for i in 0..m {
        let s: f64 = (0..m).map(|j| z[(i, j)] * e[j]).sum();
        row_sum_err = row_sum_err.max((s - 1.0).abs());
        trace += e[i] * z[(i, i)];
    }
    let cl_err = p
        .cannot_link
        .iter()
        .map(|&(a, b)| z[(a, b)].abs())
        .fold(0.0, f64::max);
    let cut_err = p
        .cuts
        .cuts()
        .iter()
        .map(|c| c.violation(z).max(0.0))
        .fold(0.0, f64::max);
    let neg_eig = (-crate::linalg::lambda_min(z)).max(0.0);
    let neg_entry = (-z.min()).max(0.0);
    Ok(PrimalResiduals {
        row_sum_err,
        trace_err: (trace - p.k as f64).abs(),
        cl_err,
        cut_err,
        neg_eig,
        neg_entry,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{clustering_matrix, gram, Assignment, DataMatrix};

    fn tiny() -> GramMatrix {
        gram(&DataMatrix::from_rows(&[vec![0.0], vec![1.0], vec![3.0]]).unwrap())
    }

    #[test]
    fn root_shape() {
        let p = build_root(&tiny(), 2).unwrap();
        assert_eq!(p.m(), 3);
        assert_eq!(p.mult, vec![1, 1, 1]);
        assert!(p.cannot_link.is_empty() && p.cuts.is_empty());
        p.validate().unwrap();
        assert!(matches!(build_root(&tiny(), 4), Err(Error::InvalidK { .. })));
        assert!(matches!(build_root(&tiny(), 0), Err(Error::InvalidK { .. })));
    }

    #[test]
    fn residual_examples() {
        let p = build_root(&tiny(), 1).unwrap();
        let z = DMatrix::from_element(3, 3, 1.0 / 3.0);
        assert!(primal_residuals(&p, &z).unwrap().max() < 1e-15);

        let p2 = build_root(&tiny(), 2).unwrap();
        let r = primal_residuals(&p2, &DMatrix::identity(3, 3)).unwrap();
        assert_eq!(r.trace_err, 1.0);

        let a = Assignment::new(vec![0, 1, 1], 2).unwrap();
        let mut p3 = p2.clone();
        p3.cannot_link.push((0, 1));
        assert!(primal_residuals(&p3, &clustering_matrix(&a)).unwrap().max() < 1e-15);

        assert!(primal_residuals(&p, &DMatrix::identity(2, 2)).is_err());
    }
}
