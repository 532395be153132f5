//! Best-first branch and bound over must-link / cannot-link decisions.

mod cutting_plane;
mod node;
mod report;
mod search;

pub use cutting_plane::{cutting_plane_loop, prunable, HeuristicRun, Incumbent, NodeOutcome, SearchContext};
pub use node::{
    extract_partition, k_colorable, select_branching_pair, select_branching_pair_excluding,
    separate, shrink_merge, BranchChoice, Node, INTEGRALITY_THRESHOLD,
};
pub use report::{NodeDecision, NodeRecord, RootSummary, SearchStatus, SolveReport};
pub use search::{root_bound, solve_exact, solve_exact_detailed, SolveOutcome};
