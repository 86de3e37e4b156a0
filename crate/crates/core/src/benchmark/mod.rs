//! Network-flow benchmark: a radial power network with one source, node
//! balance constraints and adversarially drifting exponential arc costs.

mod cost;
pub mod format;
mod network;
mod sampling;

pub use cost::NetworkCost;
pub use network::{
    generate_network, incidence_constraint, Arc, NetworkSpec, DEFAULT_ARCS, DEFAULT_NODES, MAX_DEPTH,
};
pub use sampling::{sample_round, NetworkBenchmark, RoundParams, DEFAULT_EPSILON, RNG_NAME};
