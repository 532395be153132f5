//! The book's chapters as doc comments, so `cargo test` runs every snippet.

#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}
#[doc = include_str!("../../../book/src/data.md")]
mod data {}
#[doc = include_str!("../../../book/src/relaxation.md")]
mod relaxation {}
#[doc = include_str!("../../../book/src/safe_bounds.md")]
mod safe_bounds {}
#[doc = include_str!("../../../book/src/cuts.md")]
mod cuts {}
#[doc = include_str!("../../../book/src/branching.md")]
mod branching {}
#[doc = include_str!("../../../book/src/heuristics.md")]
mod heuristics {}
#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}
