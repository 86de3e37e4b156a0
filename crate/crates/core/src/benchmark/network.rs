use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::online::AffineEqualityConstraint;

pub const DEFAULT_NODES: usize = 15;
pub const DEFAULT_ARCS: usize = 30;
/// Maximum distance from the root in generated trees.
pub const MAX_DEPTH: usize = 1;

/// Directed arc `tail → head`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
}

/// Flow network with a single source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkSpec {
    node_count: usize,
    arcs: Vec<Arc>,
    source: usize,
}

impl NetworkSpec {
    pub fn new(node_count: usize, arcs: Vec<Arc>, source: usize) -> Result<Self> {
        if node_count < 2 {
            return Err(Error::InvalidArgument("network needs at least two nodes".into()));
        }
        if source >= node_count {
            return Err(Error::InvalidArgument(format!("source {source} out of range")));
        }
        for a in &arcs {
            if a.tail >= node_count || a.head >= node_count {
                return Err(Error::InvalidArgument(format!(
                    "arc {}→{} has an endpoint outside 0..{node_count}",
                    a.tail, a.head
                )));
            }
            if a.tail == a.head {
                return Err(Error::InvalidArgument(format!("self-loop at node {}", a.tail)));
            }
        }
        Ok(Self {
            node_count,
            arcs,
            source,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn source(&self) -> usize {
        self.source
    }

    /// Nodes other than the source, in index order. Rows of the balance
    /// constraint follow this order.
    pub fn load_nodes(&self) -> Vec<usize> {
        (0..self.node_count).filter(|&i| i != self.source).collect()
    }

    /// First node not reachable from the source in the undirected graph.
    pub fn unreachable_node(&self) -> Option<usize> {
        let mut adj = vec![Vec::new(); self.node_count];
        for a in &self.arcs {
            adj[a.tail].push(a.head);
            adj[a.head].push(a.tail);
        }
        let mut seen = vec![false; self.node_count];
        let mut queue = VecDeque::from([self.source]);
        seen[self.source] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.iter().position(|s| !s)
    }

    /// Node–arc incidence matrix with every node's row: `+1` where the arc
    /// enters the node, `−1` where it leaves. Rows sum to zero.
    pub fn full_incidence_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.node_count, self.arcs.len());
        for (l, a) in self.arcs.iter().enumerate() {
            m[(a.head, l)] += 1.0;
            m[(a.tail, l)] -= 1.0;
        }
        m
    }
}

/// Node balance `A x = b`: one row per non-source node (the source row is
/// dropped so `A` has full row rank), `b` holding that node's load.
pub fn incidence_constraint(net: &NetworkSpec, loads: &[f64]) -> Result<AffineEqualityConstraint> {
    if let Some(node) = net.unreachable_node() {
        return Err(Error::DisconnectedNetwork { node });
    }
    let rows = net.load_nodes();
    if loads.len() != rows.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} loads for {} load nodes",
            loads.len(),
            rows.len()
        )));
    }
    let full = net.full_incidence_matrix();
    let a = Matrix::from_fn(rows.len(), net.arc_count(), |r, l| full[(rows[r], l)]);
    AffineEqualityConstraint::new(a, loads.to_vec())
}

/// Deterministic radial network for `seed`: a spanning tree rooted at node 0
/// whose depth is at most `MAX_DEPTH`, reinforced by parallel arcs until there are
/// `DEFAULT_ARCS` arcs. Each reinforcement goes to the tree edge with the
/// largest downstream node count per existing arc, so heavily loaded feeders
/// get more capacity.
pub fn generate_network(seed: u64) -> NetworkSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Stream 0 is reserved for topology; round t samples from stream t.
    rng.set_stream(0);

    let n = DEFAULT_NODES;
    let mut order: Vec<usize> = (1..n).collect();
    order.shuffle(&mut rng);

    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut attached: Vec<usize> = vec![0];
    for &v in &order {
        let candidates: Vec<usize> = attached.iter().copied().filter(|&u| depth[u] < MAX_DEPTH).collect();
        let p = candidates[rng.random_range(0..candidates.len())];
        parent[v] = p;
        depth[v] = depth[p] + 1;
        attached.push(v);
    }

    let mut subtree = vec![1usize; n];
    let mut by_depth: Vec<usize> = (1..n).collect();
    by_depth.sort_by_key(|&v| std::cmp::Reverse(depth[v]));
    for &v in &by_depth {
        subtree[parent[v]] += subtree[v];
    }

    // Tree edges in attachment order, identified by their child node.
    let children: Vec<usize> = attached[1..].to_vec();
    let mut multiplicity = vec![1usize; n];
    for _ in 0..(DEFAULT_ARCS - (n - 1)) {
        let best = children
            .iter()
            .map(|&c| subtree[c] as f64 / multiplicity[c] as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        let ties: Vec<usize> = children
            .iter()
            .copied()
            .filter(|&c| subtree[c] as f64 / multiplicity[c] as f64 == best)
            .collect();
        let c = ties[rng.random_range(0..ties.len())];
        multiplicity[c] += 1;
    }

    let mut arcs = Vec::with_capacity(DEFAULT_ARCS);
    for &c in &children {
        for _ in 0..multiplicity[c] {
            arcs.push(Arc {
                tail: parent[c],
                head: c,
            });
        }
    }
    NetworkSpec::new(n, arcs, 0).expect("generated network is valid")
}
