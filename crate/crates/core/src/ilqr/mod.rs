//! Iterative linear quadratic regulator.

mod cost;
mod lqr;
mod passes;
mod solver;
mod warm;

pub use cost::{evaluate_cost, QuadraticCost};
pub use lqr::{dt_lqr, ControlsAndTrajectory};
pub use passes::{backward_pass, forward_pass, BackwardPassGains, Rollout};
pub use solver::{ilqr_solve, Ilqr, IlqrConfig, IlqrError, IlqrResult, IlqrResultDoc, DIVERGENCE_STREAK};
pub use warm::{coarse_to_fine, prolong_zoh, CoarseToFine};
