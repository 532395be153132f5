//! Rigorous lower bounds from inexact dual solutions.
//!
//! For any multipliers `(y, u, v >= 0, w >= 0, P >= 0)` and the resulting
//! dual slack `S`, every feasible `Z` satisfies
//! `<-W, Z> >= dual_value + <S, Z>`, and `<S, Z> >= sum_{lambda_i(S) < 0} lambda_i(S)`
//! because the eigenvalues of a feasible `Z` lie in `[0, 1]`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::sym_eigen;
use crate::sdp::{SdpSolution, ShrunkProblem};

/// Entries below this are reported instead of clipped.
const CLIP_THRESHOLD: f64 = -1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SafeBoundReport {
    pub dual_value: f64,
    /// Sum of the (widened) negative eigenvalues of `S`; never positive.
    pub correction: f64,
    /// Allowance for rounding errors, subtracted from the bound.
    pub rounding: f64,
    pub lb_sdp: f64,
    pub lb_mssc: f64,
    pub min_eig_s: f64,
}

fn clipped(values: &[f64]) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|&x| {
            if x < CLIP_THRESHOLD {
                Err(Error::NegativeMultiplier { value: x })
            } else {
                Ok(x.max(0.0))
            }
        })
        .collect()
}

fn check_dims(p: &ShrunkProblem, sol: &SdpSolution) -> Result<()> {
    let m = p.m();
    let mismatch = |expected: usize, found: usize| {
        if expected != found {
            Err(Error::DimensionMismatch { expected, found })
        } else {
            Ok(())
        }
    };
    mismatch(m + 1, sol.y.len())?;
    mismatch(p.cannot_link.len(), sol.u.len())?;
    mismatch(p.cuts.len(), sol.v.len())?;
    mismatch(p.cuts.len(), sol.w.len())?;
    mismatch(m, sol.p_nonneg.nrows())?;
    mismatch(m, sol.p_nonneg.ncols())
}

/// The dual slack matrix `S` of the multipliers in `sol`.
pub fn assemble_s_tilde(p: &ShrunkProblem, sol: &SdpSolution) -> Result<DMatrix<f64>> {
    check_dims(p, sol)?;
    let m = p.m();
    let e = p.mult_f64();
    let v = clipped(&sol.v)?;
    let w = clipped(&sol.w)?;
    let mut s = -&p.w_shrunk;
    for j in 0..m {
        for i in 0..m {
            let pij = sol.p_nonneg[(i, j)];
            if pij < CLIP_THRESHOLD {
                return Err(Error::NegativeMultiplier { value: pij });
            }
            // E_i = (u_i e' + e u_i') / 2
            s[(i, j)] -= 0.5 * (sol.y[i] * e[j] + e[i] * sol.y[j]) + pij.max(0.0);
        }
        s[(j, j)] -= sol.y[m] * e[j];
    }
    for (&(a, b), &u) in p.cannot_link.iter().zip(&sol.u) {
        s[(a, b)] -= 0.5 * u;
        s[(b, a)] -= 0.5 * u;
    }
    for (ci, cut) in p.cuts.cuts().iter().enumerate() {
        // lower cuts enter with -v, upper cuts with +w
        let coef = w[ci] - v[ci];
        if coef == 0.0 {
            continue;
        }
        for (a, b, t) in cut.terms() {
            if a == b {
                s[(a, a)] += coef * t;
            } else {
                s[(a, b)] += 0.5 * coef * t;
                s[(b, a)] += 0.5 * coef * t;
            }
        }
    }
    Ok(s)
}

/// Entrywise sum of the absolute contributions to `S`, the scale rounding
/// acts on. Assumes the multipliers already passed [`assemble_s_tilde`].
fn magnitude(p: &ShrunkProblem, sol: &SdpSolution) -> DMatrix<f64> {
    let m = p.m();
    let e = p.mult_f64();
    let mut s = p.w_shrunk.abs() + sol.p_nonneg.abs();
    for j in 0..m {
        for i in 0..m {
            s[(i, j)] += 0.5 * (sol.y[i].abs() * e[j] + e[i] * sol.y[j].abs());
        }
        s[(j, j)] += sol.y[m].abs() * e[j];
    }
    for (&(a, b), &u) in p.cannot_link.iter().zip(&sol.u) {
        s[(a, b)] += 0.5 * u.abs();
        s[(b, a)] += 0.5 * u.abs();
    }
    for (ci, cut) in p.cuts.cuts().iter().enumerate() {
        let coef = sol.w[ci].abs() + sol.v[ci].abs();
        for (a, b, t) in cut.terms() {
            s[(a, b)] += 0.5 * coef * t.abs();
            s[(b, a)] += 0.5 * coef * t.abs();
        }
    }
    s
}

/// `sum_i y_i + k y_m + l'v - h'w` (cannot-link right-hand sides are zero).
pub fn dual_value(p: &ShrunkProblem, sol: &SdpSolution) -> Result<f64> {
    Ok(dual_terms(p, sol)?.iter().sum())
}

fn dual_terms(p: &ShrunkProblem, sol: &SdpSolution) -> Result<Vec<f64>> {
    check_dims(p, sol)?;
    let m = p.m();
    let v = clipped(&sol.v)?;
    let w = clipped(&sol.w)?;
    let mut terms: Vec<f64> = sol.y[..m].to_vec();
    terms.push(p.k as f64 * sol.y[m]);
    for (ci, cut) in p.cuts.cuts().iter().enumerate() {
        if v[ci] > 0.0 {
            terms.push(cut.rhs_lo() * v[ci]);
        }
        if w[ci] > 0.0 {
            terms.push(-cut.rhs_hi() * w[ci]);
        }
    }
    Ok(terms)
}

/// Sum over eigenpairs of `min(0, lambda_i - ||S q_i - lambda_i q_i||)`, and
/// the smallest computed eigenvalue.
pub fn eigen_correction(s: &DMatrix<f64>) -> (f64, f64) {
    let eig = sym_eigen(s);
    let res = eig.residuals(s);
    let corr = eig
        .values
        .iter()
        .zip(&res)
        .map(|(l, r)| (l - r).min(0.0))
        .sum();
    (corr, eig.values.first().copied().unwrap_or(0.0))
}

/// Rigorous MSSC lower bound from the multipliers in `sol`, including an
/// allowance for floating-point rounding in the sums and in `S`.
pub fn safe_lower_bound(p: &ShrunkProblem, sol: &SdpSolution) -> Result<SafeBoundReport> {
    let s = assemble_s_tilde(p, sol)?;
    let terms = dual_terms(p, sol)?;
    let dual: f64 = terms.iter().sum();
    let (correction, min_eig_s) = eigen_correction(&s);
    let u = f64::EPSILON;
    // every entry of S sums at most this many contributions
    let per_entry = (6 + p.cuts.len()) as f64;
    let mag = magnitude(p, sol).norm();
    let summed = p.trace_w.abs() + terms.iter().map(|t| t.abs()).sum::<f64>() + correction.abs();
    let rounding = u * (per_entry * p.k as f64 * mag + (terms.len() + 3) as f64 * summed);
    let lb_sdp = dual + correction - rounding;
    Ok(SafeBoundReport {
        dual_value: dual,
        correction,
        rounding,
        lb_sdp,
        lb_mssc: p.trace_w + lb_sdp,
        min_eig_s,
    })
}
