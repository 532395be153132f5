use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Assignment;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchStatus {
    /// The final gap is within tolerance.
    Certified,
    /// Stopped by the time limit with a larger gap.
    GapLimited,
}

/// Result of an exact solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub f_opt: f64,
    pub labels: Assignment,
    pub lb: f64,
    pub gap: f64,
    pub nodes: usize,
    pub cp_root: usize,
    pub cuts_cp_root: usize,
    pub gap0: f64,
    pub gap_cp: f64,
    pub wall_time: f64,
    pub status: SearchStatus,
}

impl SolveReport {
    pub fn certified(&self) -> bool {
        self.status == SearchStatus::Certified
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Root-node statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSummary {
    /// Safe bound of the first root solve.
    pub lb0: f64,
    /// Best safe bound after the root cutting-plane loop.
    pub lb_cp: f64,
    /// Relaxation heuristic value after the first root solve.
    pub ub_0: Option<f64>,
    /// Best relaxation heuristic value over the root loop.
    pub ub_cp: Option<f64>,
    pub rounds: usize,
    pub cuts: usize,
    pub lbs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NodeDecision {
    /// Closed without solving: the inherited bound already prunes.
    PrunedOnArrival,
    Pruned,
    /// As many groups as clusters (or a single cluster): evaluated exactly.
    Leaf,
    /// The cannot-link graph cannot be coloured with `k` colours.
    Infeasible,
    Branched { i: usize, j: usize, integral: bool },
    /// Still open when the search stopped.
    Open,
}

/// Log entry for one node. Group, cannot-link and heuristic details are
/// filled only when recording is enabled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    pub m: usize,
    /// Bound the node closed with; `None` when infeasible.
    pub lb: Option<f64>,
    pub decision: NodeDecision,
    pub rounds: usize,
    pub cuts: usize,
    pub sdp_iterations: usize,
    pub groups: Option<Vec<Vec<usize>>>,
    pub cl_global: Option<Vec<(usize, usize)>>,
    pub heuristic: Vec<Vec<usize>>,
}
