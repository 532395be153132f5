use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of an exact solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub k: usize,
    /// Relative gap `(UB - LB) / UB` at which the search stops. `None` picks
    /// 1e-4 below 1000 points and 1e-3 from 1000 on.
    pub gap_tol: Option<f64>,
    pub cp_max_root: usize,
    pub cp_max_child: usize,
    pub eps_viol: f64,
    pub eps_act: f64,
    pub eps_cp_root: f64,
    pub eps_cp_child: f64,
    pub sdp_tol: f64,
    pub sdp_max_iter: usize,
    /// Random candidates per family in pair/triangle separation.
    pub budget_t: usize,
    pub keep_fraction: f64,
    pub workers: usize,
    pub seed: u64,
    /// Wall-clock limit in seconds.
    pub time_limit: Option<f64>,
    /// k-means++ restarts for the initial upper bound.
    pub initial_restarts: usize,
    /// Keep per-node group / cannot-link / heuristic details in the log.
    pub record_nodes: bool,
}

impl RunConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            gap_tol: None,
            cp_max_root: 50,
            cp_max_child: 30,
            eps_viol: 1e-4,
            eps_act: 1e-6,
            eps_cp_root: 1e-4,
            eps_cp_child: 1e-3,
            sdp_tol: 1e-5,
            sdp_max_iter: 20_000,
            budget_t: crate::cuts::DEFAULT_BUDGET,
            keep_fraction: crate::cuts::DEFAULT_KEEP_FRACTION,
            workers: 1,
            seed: 0,
            time_limit: None,
            initial_restarts: 10,
            record_nodes: false,
        }
    }

    pub fn gap_tol_for(&self, n: usize) -> f64 {
        self.gap_tol
            .unwrap_or(if n < 1000 { 1e-4 } else { 1e-3 })
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 || self.k > n {
            return Err(Error::InvalidK { k: self.k, n });
        }
        let positive = [
            ("gap tolerance", self.gap_tol_for(n)),
            ("eps_viol", self.eps_viol),
            ("eps_act", self.eps_act),
            ("eps_cp (root)", self.eps_cp_root),
            ("eps_cp (child)", self.eps_cp_child),
            ("sdp tolerance", self.sdp_tol),
            ("keep fraction", self.keep_fraction),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.keep_fraction > 1.0 {
            return Err(Error::InvalidConfig("keep fraction must be at most 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidConfig("at least one worker is required".into()));
        }
        if self.sdp_max_iter == 0 {
            return Err(Error::InvalidConfig("sdp iteration cap must be positive".into()));
        }
        if let Some(t) = self.time_limit {
            if !(t > 0.0) {
                return Err(Error::InvalidConfig(format!("time limit must be positive, got {t}")));
            }
        }
        Ok(())
    }
}
