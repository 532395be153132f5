//! First-order solver for the node relaxation.
//!
//! The dual
//!
//! ```text
//! max  b'y + l'v   s.t.  A'y + B'v + S + P = C,  S psd,  P >= 0,  v >= 0
//! ```
//!
//! is handled by a two-block ADMM whose first block `(y, S)` is updated by a
//! symmetric Gauss-Seidel sweep `y, S, y` and whose second block is `(P, r)`,
//! with `r` a nonnegative copy of the cut multipliers `v`. The Lagrange
//! multiplier of the matrix equation is the primal `Z`. All constraints are
//! scaled to unit Frobenius norm and `C` to unit norm before iterating.

use std::collections::HashMap;
use std::path::Path;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::problem::ShrunkProblem;
use crate::cuts::Cut;
use crate::error::{Error, Result};
use crate::linalg::{dot, psd_split};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    /// KKT residual at or below the requested tolerance.
    Converged,
    /// The safe bound reached the caller's target before convergence.
    TargetReached,
    /// Iteration cap or deadline hit; the last iterate is returned.
    MaxIterations,
    /// Primal residual stalled above 1e-3.
    Infeasible,
}

/// Primal-dual pair in the units of the original problem.
///
/// Dual slack convention used by the safe bound:
/// `S = -W - sum_i y_i E_i - y_m Diag(mult) - sum u_ab E_ab - sum_lo v_c B_c
/// + sum_hi w_c B_c - P`, where `B_c` is the left-hand side of cut `c` as
/// written in [`crate::cuts`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpSolution {
    pub z: DMatrix<f64>,
    pub obj_sdp: f64,
    /// Row-sum multipliers followed by the trace multiplier.
    pub y: Vec<f64>,
    /// One multiplier per cannot-link pair.
    pub u: Vec<f64>,
    /// Multipliers of the `>=` cuts (cliques); zero for the others.
    pub v: Vec<f64>,
    /// Multipliers of the `<=` cuts (pairs, triangles); zero for cliques.
    pub w: Vec<f64>,
    pub p_nonneg: DMatrix<f64>,
    pub s_psd: DMatrix<f64>,
    pub kkt_residual: f64,
    pub status: SolveStatus,
    pub iterations: usize,
    pub sigma: f64,
    /// Best safe bound (MSSC units) seen during the periodic checks, if any.
    pub best_checked_lb: Option<f64>,
}

impl SdpSolution {
    /// Nonnegative multiplier of each cut, whichever side it bounds.
    pub fn cut_duals(&self) -> Vec<f64> {
        self.v.iter().zip(&self.w).map(|(a, b)| a + b).collect()
    }

    pub fn converged(&self) -> bool {
        matches!(self.status, SolveStatus::Converged)
    }
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub tau: f64,
    pub sigma0: f64,
    /// Stop once the safe MSSC bound reaches this value.
    pub prune_target: Option<f64>,
    /// Iterations between safe-bound checks when `prune_target` is set.
    pub check_every: usize,
    pub deadline: Option<Instant>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-5,
            max_iter: 20_000,
            tau: 1.618,
            sigma0: 1.0,
            prune_target: None,
            check_every: 100,
            deadline: None,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Solver state carried between related solves, in original units.
#[derive(Debug, Clone, Default)]
pub struct WarmStart {
    pub z: Option<DMatrix<f64>>,
    pub s_psd: Option<DMatrix<f64>>,
    pub p_nonneg: Option<DMatrix<f64>>,
    pub y: Vec<f64>,
    pub cl: HashMap<(usize, usize), f64>,
    pub cuts: HashMap<Cut, f64>,
    pub sigma: Option<f64>,
}

impl WarmStart {
    pub fn from_solution(p: &ShrunkProblem, sol: &SdpSolution) -> Self {
        let duals = sol.cut_duals();
        Self {
            z: Some(sol.z.clone()),
            s_psd: Some(sol.s_psd.clone()),
            p_nonneg: Some(sol.p_nonneg.clone()),
            y: sol.y.clone(),
            cl: p.cannot_link.iter().copied().zip(sol.u.iter().copied()).collect(),
            cuts: p
                .cuts
                .cuts()
                .iter()
                .cloned()
                .zip(duals)
                .filter(|(_, d)| *d > 0.0)
                .collect(),
            sigma: Some(sol.sigma),
        }
    }

    /// State for the child where local `j` is merged into `i` (`i < j`).
    pub fn merged(&self, i: usize, j: usize) -> Self {
        let drop = |a: &DMatrix<f64>| a.clone().remove_row(j).remove_column(j);
        let remap = |x: usize| if x > j { x - 1 } else if x == j { i } else { x };
        let mut y = self.y.clone();
        if j < y.len() {
            y.remove(j);
        }
        Self {
            z: self.z.as_ref().map(drop),
            s_psd: self.s_psd.as_ref().map(drop),
            p_nonneg: self.p_nonneg.as_ref().map(drop),
            y,
            cl: self
                .cl
                .iter()
                .filter(|((a, b), _)| !(*a == j || *b == j))
                .map(|(&(a, b), &u)| {
                    let (a, b) = (remap(a), remap(b));
                    ((a.min(b), a.max(b)), u)
                })
                .collect(),
            cuts: self
                .cuts
                .iter()
                .filter_map(|(c, &d)| c.remapped(i, j).map(|c| (c, d)))
                .collect(),
            sigma: self.sigma,
        }
    }
}

/// Scaled linear maps of one problem.
struct Ops {
    m: usize,
    e: Vec<f64>,
    row_norm: Vec<f64>,
    trace_norm: f64,
    cl: Vec<(usize, usize)>,
    cl_norm: f64,
    /// Cut terms already multiplied by the sign and divided by the norm.
    cut_terms: Vec<Vec<(usize, usize, f64)>>,
    /// Sign that turns the cut into a `>=` row, and its norm.
    cut_sign: Vec<f64>,
    cut_norm: Vec<f64>,
    b: Vec<f64>,
    l: Vec<f64>,
    neq: usize,
}

impl Ops {
    fn new(p: &ShrunkProblem) -> Self {
        let m = p.m();
        let e = p.mult_f64();
        let e2: f64 = e.iter().map(|x| x * x).sum();
        let row_norm: Vec<f64> = e.iter().map(|ei| (0.5 * (e2 + ei * ei)).sqrt()).collect();
        let trace_norm = e2.sqrt();
        let cl_norm = 0.5f64.sqrt();
        let mut b: Vec<f64> = row_norm.iter().map(|nu| 1.0 / nu).collect();
        b.push(p.k as f64 / trace_norm);
        b.extend(std::iter::repeat(0.0).take(p.cannot_link.len()));
        let mut cut_terms = Vec::new();
        let mut cut_sign = Vec::new();
        let mut cut_norm = Vec::new();
        let mut l = Vec::new();
        for c in p.cuts.cuts() {
            let terms = c.terms();
            let norm = terms
                .iter()
                .map(|&(a, bb, w)| if a == bb { w * w } else { 0.5 * w * w })
                .sum::<f64>()
                .sqrt();
            let (sign, lo) = if c.is_upper() {
                (-1.0, -c.rhs_hi())
            } else {
                (1.0, c.rhs_lo())
            };
            cut_terms.push(
                terms
                    .into_iter()
                    .map(|(a, bb, w)| (a, bb, sign * w / norm))
                    .collect(),
            );
            cut_sign.push(sign);
            cut_norm.push(norm);
            l.push(lo / norm);
        }
        let neq = m + 1 + p.cannot_link.len();
        Self {
            m,
            e,
            row_norm,
            trace_norm,
            cl: p.cannot_link.clone(),
            cl_norm,
            cut_terms,
            cut_sign,
            cut_norm,
            b,
            l,
            neq,
        }
    }

    fn ncut(&self) -> usize {
        self.cut_terms.len()
    }

    fn dim(&self) -> usize {
        self.neq + self.ncut()
    }

    /// `(A(Z), B(Z))` stacked.
    fn apply(&self, z: &DMatrix<f64>, out: &mut [f64]) {
        let m = self.m;
        for i in 0..m {
            out[i] = 0.0;
        }
        let mut tr = 0.0;
        for j in 0..m {
            let col = z.column(j);
            let ej = self.e[j];
            for i in 0..m {
                out[i] += col[i] * ej;
            }
            tr += ej * col[j];
        }
        for i in 0..m {
            out[i] /= self.row_norm[i];
        }
        out[m] = tr / self.trace_norm;
        for (q, &(a, b)) in self.cl.iter().enumerate() {
            out[m + 1 + q] = z[(a, b)] / self.cl_norm;
        }
        for (c, terms) in self.cut_terms.iter().enumerate() {
            out[self.neq + c] = terms.iter().map(|&(a, b, w)| w * z[(a, b)]).sum();
        }
    }

    /// Adjoint of [`Ops::apply`].
    fn adjoint(&self, x: &[f64], out: &mut DMatrix<f64>) {
        let m = self.m;
        let yh: Vec<f64> = (0..m).map(|i| x[i] / self.row_norm[i]).collect();
        for j in 0..m {
            let ej = self.e[j];
            let yj = yh[j];
            let mut col = out.column_mut(j);
            for i in 0..m {
                col[i] = 0.5 * (yh[i] * ej + self.e[i] * yj);
            }
        }
        let t = x[m] / self.trace_norm;
        for i in 0..m {
            out[(i, i)] += t * self.e[i];
        }
        for (q, &(a, b)) in self.cl.iter().enumerate() {
            let u = 0.5 * x[m + 1 + q] / self.cl_norm;
            out[(a, b)] += u;
            out[(b, a)] += u;
        }
        for (c, terms) in self.cut_terms.iter().enumerate() {
            let v = x[self.neq + c];
            if v == 0.0 {
                continue;
            }
            for &(a, b, w) in terms {
                if a == b {
                    out[(a, a)] += w * v;
                } else {
                    out[(a, b)] += 0.5 * w * v;
                    out[(b, a)] += 0.5 * w * v;
                }
            }
        }
    }
}

/// Conjugate gradients on `G G' x + [0; x_cut] = rhs`.
struct NormalSolver {
    work: DMatrix<f64>,
    r: Vec<f64>,
    p: Vec<f64>,
    ap: Vec<f64>,
}

impl NormalSolver {
    fn new(ops: &Ops) -> Self {
        let n = ops.dim();
        Self {
            work: DMatrix::zeros(ops.m, ops.m),
            r: vec![0.0; n],
            p: vec![0.0; n],
            ap: vec![0.0; n],
        }
    }

    fn apply(&mut self, ops: &Ops, x: &[f64], out: &mut [f64]) {
        ops.adjoint(x, &mut self.work);
        ops.apply(&self.work, out);
        for c in ops.neq..ops.dim() {
            out[c] += x[c];
        }
    }

    fn solve(&mut self, ops: &Ops, rhs: &[f64], x: &mut [f64], rel_tol: f64, max_iter: usize) -> usize {
        let n = ops.dim();
        let mut r = std::mem::take(&mut self.r);
        let mut p = std::mem::take(&mut self.p);
        let mut ap = std::mem::take(&mut self.ap);
        self.apply(ops, x, &mut ap);
        for i in 0..n {
            r[i] = rhs[i] - ap[i];
        }
        let bnorm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        let mut rr: f64 = r.iter().map(|v| v * v).sum();
        p.copy_from_slice(&r);
        let mut it = 0;
        while it < max_iter && rr.sqrt() > rel_tol * bnorm {
            self.apply(ops, &p, &mut ap);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if pap <= 0.0 {
                break;
            }
            let alpha = rr / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rr_new: f64 = r.iter().map(|v| v * v).sum();
            let beta = rr_new / rr;
            rr = rr_new;
            for i in 0..n {
                p[i] = r[i] + beta * p[i];
            }
            it += 1;
        }
        self.r = r;
        self.p = p;
        self.ap = ap;
        it
    }
}

/// `y += a x`.
fn add_scaled(y: &mut DMatrix<f64>, a: f64, x: &DMatrix<f64>) {
    for (yi, xi) in y.as_mut_slice().iter_mut().zip(x.as_slice()) {
        *yi += a * xi;
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves `p` to relative KKT accuracy `tol` from a cold start.
pub fn solve(p: &ShrunkProblem, tol: f64) -> Result<SdpSolution> {
    solve_with(p, &SolverOptions::with_tol(tol), None)
}

/// Solves `p` with explicit options and an optional warm start.
pub fn solve_with(
    p: &ShrunkProblem,
    opts: &SolverOptions,
    warm: Option<&WarmStart>,
) -> Result<SdpSolution> {
    p.validate()?;
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidConfig("solver tolerance must be positive".into()));
    }
    let m = p.m();
    let ops = Ops::new(p);
    let ncut = ops.ncut();
    let neq = ops.neq;
    let dim = ops.dim();

    let gamma = {
        let g = p.w_shrunk.norm();
        if g > 0.0 {
            g
        } else {
            1.0
        }
    };
    let c = -&p.w_shrunk / gamma;

    // state in scaled units
    let mut x = vec![0.0; dim];
    let mut z = DMatrix::<f64>::zeros(m, m);
    let mut s = DMatrix::<f64>::zeros(m, m);
    let mut pn = DMatrix::<f64>::zeros(m, m);
    let mut slack = vec![0.0; ncut];
    let mut r = vec![0.0; ncut];
    let mut sigma = opts.sigma0;

    if let Some(ws) = warm {
        if let Some(wz) = ws.z.as_ref().filter(|a| a.nrows() == m) {
            z.copy_from(wz);
        }
        if let Some(ws_s) = ws.s_psd.as_ref().filter(|a| a.nrows() == m) {
            s = ws_s / gamma;
        }
        if let Some(ws_p) = ws.p_nonneg.as_ref().filter(|a| a.nrows() == m) {
            pn = ws_p / gamma;
        }
        if ws.y.len() == m + 1 {
            for i in 0..m {
                x[i] = ws.y[i] * ops.row_norm[i] / gamma;
            }
            x[m] = ws.y[m] * ops.trace_norm / gamma;
        }
        for (q, pair) in p.cannot_link.iter().enumerate() {
            if let Some(u) = ws.cl.get(pair) {
                x[m + 1 + q] = u * ops.cl_norm / gamma;
            }
        }
        for (ci, cut) in p.cuts.cuts().iter().enumerate() {
            if let Some(d) = ws.cuts.get(cut) {
                let v = d * ops.cut_norm[ci] / gamma;
                x[neq + ci] = v;
                r[ci] = v;
            }
        }
        if let Some(sg) = ws.sigma {
            sigma = sg;
        }
    }
    {
        let mut bz = vec![0.0; dim];
        ops.apply(&z, &mut bz);
        for ci in 0..ncut {
            slack[ci] = (bz[neq + ci] - ops.l[ci]).max(0.0);
        }
    }

    let bl_norm = 1.0 + norm(&ops.b).hypot(norm(&ops.l));
    let mut cg = NormalSolver::new(&ops);
    let mut rhs = vec![0.0; dim];
    let mut gz = vec![0.0; dim];
    let mut at = DMatrix::<f64>::zeros(m, m);
    let mut work = DMatrix::<f64>::zeros(m, m);

    let mut kkt = f64::INFINITY;
    let mut pinf = f64::INFINITY;
    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0;
    let mut best_checked_lb: Option<f64> = None;
    let mut prim_win = 0usize;
    let mut dual_win = 0usize;
    let cg_tol = |kkt: f64| (0.05 * kkt).clamp(1e-10, 1e-3);

    // rhs for the (y, v) step given M = S + P - C + Z / sigma
    let build_rhs = |ops: &Ops,
                     s: &DMatrix<f64>,
                     pn: &DMatrix<f64>,
                     z: &DMatrix<f64>,
                     sigma: f64,
                     r: &[f64],
                     slack: &[f64],
                     work: &mut DMatrix<f64>,
                     rhs: &mut [f64]| {
        work.copy_from(s);
        *work += pn;
        *work -= &c;
        add_scaled(work, 1.0 / sigma, z);
        ops.apply(work, rhs);
        for i in 0..neq {
            rhs[i] = ops.b[i] / sigma - rhs[i];
        }
        for ci in 0..ncut {
            rhs[neq + ci] = ops.l[ci] / sigma - rhs[neq + ci] + r[ci] + slack[ci] / sigma;
        }
    };

    let mut cg_iters = 0usize;
    for iter in 1..=opts.max_iter {
        iterations = iter;
        let tol_cg = cg_tol(kkt);

        // y half step
        build_rhs(&ops, &s, &pn, &z, sigma, &r, &slack, &mut work, &mut rhs);
        cg_iters += cg.solve(&ops, &rhs, &mut x, tol_cg, 500);

        // S step: S = proj_psd(C - G'x - P - Z / sigma)
        ops.adjoint(&x, &mut at);
        work.copy_from(&c);
        work -= &at;
        work -= &pn;
        add_scaled(&mut work, -1.0 / sigma, &z);
        let (s_new, neg) = psd_split(&work);
        // psd primal candidate sigma (S - G)
        let z_psd = neg * (-sigma);
        s = s_new;

        // y full step
        build_rhs(&ops, &s, &pn, &z, sigma, &r, &slack, &mut work, &mut rhs);
        cg_iters += cg.solve(&ops, &rhs, &mut x, tol_cg, 500);
        ops.adjoint(&x, &mut at);

        // P and r step
        work.copy_from(&c);
        work -= &at;
        work -= &s;
        add_scaled(&mut work, -1.0 / sigma, &z);
        pn.copy_from(&work);
        pn.apply(|v| *v = v.max(0.0));
        for ci in 0..ncut {
            r[ci] = (x[neq + ci] - slack[ci] / sigma).max(0.0);
        }

        // multiplier step
        work.copy_from(&at);
        work += &s;
        work += &pn;
        work -= &c;
        let rd_norm = work.norm();
        add_scaled(&mut z, opts.tau * sigma, &work);
        crate::linalg::symmetrize(&mut z);
        let mut rv = 0.0;
        for ci in 0..ncut {
            let d = r[ci] - x[neq + ci];
            slack[ci] += opts.tau * sigma * d;
            rv += d * d;
        }

        // residuals
        ops.apply(&z, &mut gz);
        let mut p_eq = 0.0;
        for i in 0..neq {
            p_eq += (gz[i] - ops.b[i]).powi(2);
        }
        let mut p_cut = 0.0;
        for ci in 0..ncut {
            p_cut += (ops.l[ci] - gz[neq + ci]).max(0.0).powi(2);
        }
        pinf = (p_eq + p_cut).sqrt() / bl_norm;
        let dinf = (rd_norm.powi(2) + rv).sqrt() / 2.0;
        let znorm = z.norm();
        let neg_z = z.iter().map(|v| v.min(0.0).powi(2)).sum::<f64>().sqrt() / (1.0 + znorm);
        let psd_z = (&z - &z_psd).norm() / (1.0 + znorm);
        let pobj = dot(&c, &z);
        let dobj: f64 = (0..neq).map(|i| ops.b[i] * x[i]).sum::<f64>()
            + (0..ncut).map(|ci| ops.l[ci] * r[ci]).sum::<f64>();
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        kkt = pinf.max(dinf).max(gap).max(neg_z).max(psd_z);

        if iter % 200 == 0 {
            log::trace!(
                "admm it {iter}: pinf {pinf:.2e} dinf {dinf:.2e} gap {gap:.2e} sigma {sigma:.2e} pobj {:.8e}",
                pobj * gamma
            );
        }
        if kkt <= opts.tol {
            status = SolveStatus::Converged;
            break;
        }
        if let Some(target) = opts.prune_target {
            if iter % opts.check_every.max(1) == 0 {
                let lb = scaled_safe_bound(p, &ops, &c, gamma, &x, &r, &pn, &mut work);
                best_checked_lb = Some(best_checked_lb.map_or(lb, |b: f64| b.max(lb)));
                if lb >= target {
                    status = SolveStatus::TargetReached;
                    break;
                }
            }
        }
        if opts.deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }

        // penalty balancing
        if pinf < dinf {
            prim_win += 1;
        } else {
            dual_win += 1;
        }
        // a larger sigma pushes dual feasibility at the expense of primal
        if iter % 20 == 0 {
            let ratio = pinf / dinf.max(1e-300);
            if prim_win > dual_win * 3 / 2 && ratio < 0.1 {
                sigma = (sigma * 1.4).min(1e6);
            } else if dual_win > prim_win * 3 / 2 && ratio > 10.0 {
                sigma = (sigma / 1.4).max(1e-6);
            }
            prim_win = 0;
            dual_win = 0;
        }
    }
    log::debug!("admm: {iterations} iterations, {cg_iters} cg steps, kkt {kkt:.2e}");
    if status == SolveStatus::MaxIterations && pinf > 1e-3 {
        status = SolveStatus::Infeasible;
    }

    // back to original units
    let mut y = Vec::with_capacity(m + 1);
    for i in 0..m {
        y.push(gamma * x[i] / ops.row_norm[i]);
    }
    y.push(gamma * x[m] / ops.trace_norm);
    let u: Vec<f64> = (0..p.cannot_link.len())
        .map(|q| gamma * x[m + 1 + q] / ops.cl_norm)
        .collect();
    let mut v = vec![0.0; ncut];
    let mut w = vec![0.0; ncut];
    for ci in 0..ncut {
        let d = gamma * r[ci] / ops.cut_norm[ci];
        if ops.cut_sign[ci] > 0.0 {
            v[ci] = d;
        } else {
            w[ci] = d;
        }
    }
    Ok(SdpSolution {
        obj_sdp: p.objective(&z),
        z,
        y,
        u,
        v,
        w,
        p_nonneg: pn * gamma,
        s_psd: s * gamma,
        kkt_residual: kkt,
        status,
        iterations,
        sigma,
        best_checked_lb,
    })
}

/// Safe MSSC bound from scaled multipliers, used for early termination.
#[allow(clippy::too_many_arguments)]
fn scaled_safe_bound(
    p: &ShrunkProblem,
    ops: &Ops,
    c: &DMatrix<f64>,
    gamma: f64,
    x: &[f64],
    r: &[f64],
    pn: &DMatrix<f64>,
    work: &mut DMatrix<f64>,
) -> f64 {
    let mut xr = x.to_vec();
    xr[ops.neq..].copy_from_slice(r);
    ops.adjoint(&xr, work);
    let s_tilde = c - &*work - pn;
    let dual: f64 = (0..ops.neq).map(|i| ops.b[i] * x[i]).sum::<f64>()
        + r.iter().zip(&ops.l).map(|(a, b)| a * b).sum::<f64>();
    let corr = crate::safe_bound::eigen_correction(&s_tilde).0;
    p.trace_w + gamma * (dual + corr)
}

/// Writes problem and solution as JSON, for regression fixtures.
pub fn dump_json(path: impl AsRef<Path>, p: &ShrunkProblem, sol: &SdpSolution) -> Result<()> {
    #[derive(Serialize)]
    struct Dump<'a> {
        problem: &'a ShrunkProblem,
        solution: &'a SdpSolution,
    }
    let path = path.as_ref();
    let text = serde_json::to_string(&Dump {
        problem: p,
        solution: sol,
    })?;
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a dump written by [`dump_json`].
pub fn load_json(path: impl AsRef<Path>) -> Result<(ShrunkProblem, SdpSolution)> {
    #[derive(Deserialize)]
    struct Dump {
        problem: ShrunkProblem,
        solution: SdpSolution,
    }
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let d: Dump = serde_json::from_str(&text)?;
    Ok((d.problem, d.solution))
}
