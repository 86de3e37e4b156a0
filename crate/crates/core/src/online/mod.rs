//! Online equality-constrained Newton methods.
//!
//! At round `t` the learner plays `x_t`, then observes the loss `f_t` and
//! the constraint `(A_t, b_t)`. OEN-M assumes `(A, b)` never changes and
//! takes one Newton step of the equality-constrained second-order model from
//! `x_t`. OPEN-M first projects `x_t` onto `{x : A_t x = b_t}` and steps from
//! there, so it tolerates drifting constraints.

mod optimum;
mod problem;
mod runner;
mod step;
mod trajectory;

pub use optimum::{solve_round_optimum, OptimumSolver};
pub use problem::{AffineEqualityConstraint, ProblemSequence, RoundProblem};
pub use runner::{compute_optima, run, run_oen_m_with_parameters, run_with_optima, Algorithm};
pub use step::{oen_update, open_m_step, OenStep, OpenMStep, FEASIBILITY_TOL};
pub use trajectory::{RoundOptimum, RoundRecord, Trajectory};
