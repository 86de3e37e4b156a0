use std::sync::Arc as Shared;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cost::NetworkCost;
use super::network::{generate_network, incidence_constraint, NetworkSpec};
use crate::error::{Error, Result};
use crate::linalg::{norm, null_space_basis};
use crate::online::{ProblemSequence, RoundProblem};

pub const DEFAULT_EPSILON: f64 = 1e-3;

/// Name of the generator recorded alongside experiment output.
pub const RNG_NAME: &str = "ChaCha8 (rand_chacha 0.9), stream 0 = topology, stream t = round t";

/// Sampled quantities for one round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundParams {
    pub t: usize,
    /// One load per non-source node, in node order.
    pub loads: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta_cost: Vec<f64>,
}

impl RoundParams {
    /// Draws loads first (node order), then α for every arc, then β for
    /// every arc.
    pub fn sample<R: Rng + ?Sized>(net: &NetworkSpec, t: usize, rng: &mut R) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidArgument("rounds are numbered from 1".into()));
        }
        let decay = 1.0 / (t as f64).sqrt();
        let loads = (0..net.node_count() - 1)
            .map(|_| rng.random_range(0.0..5.0) * decay + 10.0)
            .collect();
        let alpha = (0..net.arc_count())
            .map(|_| rng.random_range(0.0..10.0) * decay + 1.0)
            .collect();
        let beta_cost = (0..net.arc_count())
            .map(|_| rng.random_range(0.0..10.0) * decay + 2.0)
            .collect();
        Ok(Self {
            t,
            loads,
            alpha,
            beta_cost,
        })
    }

    pub fn to_problem(&self, net: &NetworkSpec, epsilon: f64) -> Result<RoundProblem> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
        }
        if self.alpha.len() != net.arc_count() || self.beta_cost.len() != net.arc_count() {
            return Err(Error::DimensionMismatch("cost parameters do not match arc count".into()));
        }
        let constraint = incidence_constraint(net, &self.loads)?;
        let cost = NetworkCost::new(self.alpha.clone(), self.beta_cost.clone(), epsilon);
        RoundProblem::new(self.t, Shared::new(cost), constraint)
    }
}

/// Builds the round-`t` problem from an arbitrary generator.
pub fn sample_round<R: Rng + ?Sized>(
    net: &NetworkSpec,
    t: usize,
    rng: &mut R,
    epsilon: f64,
) -> Result<RoundProblem> {
    RoundParams::sample(net, t, rng)?.to_problem(net, epsilon)
}

/// Seeded network benchmark; every round is a pure function of `(seed, t)`.
#[derive(Debug, Clone)]
pub struct NetworkBenchmark {
    seed: u64,
    epsilon: f64,
    network: NetworkSpec,
}

impl NetworkBenchmark {
    pub fn new(seed: u64, epsilon: f64) -> Result<Self> {
        Self::with_network(generate_network(seed), seed, epsilon)
    }

    pub fn with_network(network: NetworkSpec, seed: u64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
        }
        if let Some(node) = network.unreachable_node() {
            return Err(Error::DisconnectedNetwork { node });
        }
        Ok(Self {
            seed,
            epsilon,
            network,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn network(&self) -> &NetworkSpec {
        &self.network
    }

    pub fn round_rng(&self, t: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(t as u64);
        rng
    }

    pub fn params(&self, t: usize) -> Result<RoundParams> {
        RoundParams::sample(&self.network, t, &mut self.round_rng(t))
    }

    pub fn round(&self, t: usize) -> Result<RoundProblem> {
        self.params(t)?.to_problem(&self.network, self.epsilon)
    }

    /// Rounds `1..=horizon`.
    pub fn problems(&self, horizon: usize) -> Result<ProblemSequence> {
        if horizon == 0 {
            return Err(Error::InvalidArgument("horizon must be at least 1".into()));
        }
        let rounds = (1..=horizon).map(|t| self.round(t)).collect::<Result<Vec<_>>>()?;
        ProblemSequence::new(rounds)
    }

    /// Round-`t` cost function.
    pub fn cost(&self, t: usize) -> Result<NetworkCost> {
        let p = self.params(t)?;
        Ok(NetworkCost::new(p.alpha, p.beta_cost, self.epsilon))
    }

    /// Local curvature constants of round `t` around its optimum `x_star`:
    /// `h` is the smallest Hessian eigenvalue there and `L` bounds the
    /// Hessian's Lipschitz constant over the ball of radius `ball`. The
    /// Hessian is diagonal, so both reduce to per-arc quantities.
    pub fn local_constants(&self, t: usize, x_star: &[f64], ball: f64) -> Result<(f64, f64)> {
        let cost = self.cost(t)?;
        if x_star.len() != self.network.arc_count() {
            return Err(Error::DimensionMismatch("optimum length".into()));
        }
        let h = (0..x_star.len())
            .map(|i| cost.arc_curvature(i, x_star[i]))
            .fold(f64::INFINITY, f64::min);
        let l = (0..x_star.len())
            .map(|i| cost.third_derivative_bound(i, x_star[i], ball))
            .fold(0.0, f64::max);
        Ok((h, l))
    }

    /// `min(ball, h / 2L)` for round `t`: how close a start must be to
    /// `x_star` for the Newton contraction to apply.
    pub fn gamma_estimate(&self, t: usize, x_star: &[f64], ball: f64) -> Result<f64> {
        let (h, l) = self.local_constants(t, x_star, ball)?;
        Ok(if l > 0.0 { ball.min(h / (2.0 * l)) } else { ball })
    }

    /// `x_star` moved by exactly `radius` along a seeded direction inside
    /// the null space of the balance matrix, so the start stays feasible.
    /// The direction comes from stream `u64::MAX`.
    pub fn perturbed_start(&self, x_star: &[f64], radius: f64) -> Result<Vec<f64>> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("radius must be nonnegative, got {radius}")));
        }
        let loads = vec![10.0; self.network.node_count() - 1];
        let basis = null_space_basis(incidence_constraint(&self.network, &loads)?.a())?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(u64::MAX);
        let z: Vec<f64> = (0..basis.cols()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let d = basis.mul_vec(&z);
        let scale = radius / norm(&d);
        Ok(x_star.iter().zip(&d).map(|(x, di)| x + scale * di).collect())
    }

    /// Splits the total load evenly across the parallel arcs feeding each
    /// node. Feasible for every round's loads when the network is a tree
    /// with parallel reinforcement.
    pub fn even_split_flow(&self, loads: &[f64]) -> Vec<f64> {
        let net = &self.network;
        let n = net.node_count();
        let mut demand = vec![0.0; n];
        for (k, &i) in net.load_nodes().iter().enumerate() {
            demand[i] = loads[k];
        }
        // Downstream demand of each node, accumulated leaves first.
        let mut parent = vec![None; n];
        for a in net.arcs() {
            parent[a.head] = Some(a.tail);
        }
        let depth = |mut v: usize| {
            let mut d = 0;
            while let Some(p) = parent[v] {
                v = p;
                d += 1;
                if d > n {
                    break;
                }
            }
            d
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(depth(v)));
        let mut downstream = demand.clone();
        for &v in &order {
            if let Some(p) = parent[v] {
                downstream[p] += downstream[v];
            }
        }
        let mut inbound = vec![0usize; n];
        for a in net.arcs() {
            inbound[a.head] += 1;
        }
        net.arcs()
            .iter()
            .map(|a| downstream[a.head] / inbound[a.head] as f64)
            .collect()
    }
}
