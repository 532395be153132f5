//! Exact minimum sum-of-squares clustering.
//!
//! A best-first branch-and-bound over must-link / cannot-link decisions, with
//! a semidefinite relaxation (strengthened by pair, triangle and clique cuts)
//! for lower bounds and constrained k-means for upper bounds.

pub mod branch_bound;
pub mod config;
pub mod cuts;
pub mod dataset;
pub mod error;
pub mod heuristic;
pub mod linalg;
pub mod safe_bound;
pub mod sdp;

pub use branch_bound::{solve_exact, solve_exact_detailed, SolveReport};
pub use config::RunConfig;
pub use error::{Error, Result};
