use thiserror::Error;

/// Errors raised by the solvers, steppers and benchmark generators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("KKT matrix is singular (reciprocal condition estimate {rcond:.3e})")]
    SingularKkt { rcond: f64 },

    #[error("constraint matrix is rank deficient (reciprocal condition estimate {rcond:.3e})")]
    RankDeficientConstraint { rcond: f64 },

    #[error("reduced Hessian is singular (reciprocal condition estimate {rcond:.3e})")]
    SingularReducedHessian { rcond: f64 },

    #[error("point violates the equality constraint (residual {residual:.3e})")]
    InfeasibleInput { residual: f64 },

    #[error("no convergence after {iterations} iterations (KKT residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("constraint changes at round {round}; OEN-M requires fixed (A, b)")]
    ConstraintDrift { round: usize },

    #[error("non-finite iterate produced at round {round}")]
    NonFiniteIterate { round: usize },

    #[error("round {round} has no recorded optimum")]
    MissingOptima { round: usize },

    #[error("degenerate constants: {0}")]
    DegenerateConstants(String),

    #[error("network is disconnected: node {node} is unreachable from the source")]
    DisconnectedNetwork { node: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
