//! Exact and heuristic solvers for the minimum labeling global cut problem
//! (MLGCP): find the cheapest set of edge labels whose removal disconnects
//! an edge-labeled graph.
//!
//! The crate provides the graph model and instance format ([`graph`]), a
//! seeded instance generator ([`gen`]), a bounded-variable simplex engine
//! ([`lp`]), a branch-and-cut driver ([`bnc`]), four MILP formulations with
//! their separation routines ([`formulations`]), MVCA and local-search
//! heuristics ([`heuristics`]), a brute-force oracle ([`oracle`]) and the
//! benchmark harness behind the `mlgcp` binary ([`solve`], [`bench`]).

pub mod bench;
pub mod bnc;
pub mod formulations;
pub mod gen;
pub mod graph;
pub mod heuristics;
pub mod lp;
pub mod oracle;
pub mod solve;
