//! Online Newton-type methods for sequential optimization under time-varying
//! linear equality constraints, with regret/violation instrumentation,
//! first-order primal-dual comparators and a network-flow benchmark.

pub mod baselines;
pub mod benchmark;
pub mod constants;
pub mod error;
pub mod instances;
pub mod linalg;
pub mod metrics;
pub mod objective;
pub mod online;

pub use constants::Constants;
pub use error::{Error, Result};
pub use objective::Objective;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
