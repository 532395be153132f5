//! The node relaxation and its solver.

mod problem;
mod solver;

pub use problem::{build_root, primal_residuals, PrimalResiduals, ShrunkProblem};
pub use solver::{
    dump_json, load_json, solve, solve_with, SdpSolution, SolveStatus, SolverOptions, WarmStart,
};
