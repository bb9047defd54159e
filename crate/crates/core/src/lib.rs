//! Migrant resettlement as approximately submodular maximization under two
//! partition-matroid constraints.
//!
//! - [`instance`]: problem data, the synthetic generator and the JSON format.
//! - [`solution`]: assignment bit vectors, feasibility, dominance and variation operators.
//! - [`objective`]: the interview and coordination employment models, Monte-Carlo and exact evaluation.
//! - [`algorithms`]: additive, greedy, GSEMO, GSEMO-SR, NSGA-II and MOEA/D solvers.
//! - [`harness`]: parameter sweeps, statistics and reports.
//! - [`cli`]: the `resettle` command line.

pub mod algorithms;
pub mod cli;
pub mod harness;
pub mod instance;
pub mod objective;
pub mod solution;
