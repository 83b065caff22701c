//! Kamada-Kawai multidimensional scaling through Sherali-Adams LP
//! relaxations with conditioning-based rounding.
//!
//! Given pairwise dissimilarities `d_ij > 0` and a target dimension `k`, the
//! solver discretizes `R^k` with an epsilon-net, optimizes a level-t
//! Sherali-Adams pseudo-distribution over net assignments with a built-in
//! simplex solver, conditions the pseudo-distribution on a sampled assignment
//! of a few variables, and outputs the pseudo-expected positions. Exhaustive
//! and local-search baselines, a Gaussian-sketch dimension reducer, and
//! executable checks of the geometric inequalities the rounding relies on
//! live alongside the solver.
//!
//! See the `examples/` directory for one runnable program per capability and
//! the `samds` binary for the batch interface.

pub mod core;
pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod gen;
pub mod lp;
pub mod net;
pub mod oracle;
pub mod rng;
pub mod rounding;
pub mod sa;

pub use crate::core::{kk_stress, Embedding, Instance, Provenance};
pub use crate::error::{Error, Result};
pub use crate::net::{build_net, discretize_embedding, snap, EpsNet};
pub use crate::rounding::{solve_mds, tau_formula, SolverParams};
