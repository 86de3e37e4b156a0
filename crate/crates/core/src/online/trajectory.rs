use super::problem::RoundProblem;
use crate::linalg::distance;

/// Offline KKT point of one round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundOptimum {
    pub x: Vec<f64>,
    /// Optimal multiplier, one entry per constraint row.
    pub nu: Vec<f64>,
    pub value: f64,
}

/// What happened in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub t: usize,
    /// Decision played before the round's loss was revealed.
    pub decision: Vec<f64>,
    /// Dual estimate produced by this round's update.
    pub dual: Vec<f64>,
    /// Projection of the decision onto the round's feasible set, when the
    /// algorithm computes one.
    pub projected: Option<Vec<f64>>,
    pub loss: f64,
    /// `‖A_t x_t − b_t‖`
    pub residual: f64,
    pub optimum: Option<RoundOptimum>,
}

impl RoundRecord {
    pub fn new(
        round: &RoundProblem,
        decision: Vec<f64>,
        dual: Vec<f64>,
        projected: Option<Vec<f64>>,
        optimum: Option<RoundOptimum>,
    ) -> Self {
        Self {
            t: round.t(),
            loss: round.objective().value(&decision),
            residual: round.constraint().residual_norm(&decision),
            decision,
            dual,
            projected,
            optimum,
        }
    }

    /// `‖x_t − x_t*‖` if the optimum is known.
    pub fn gap(&self) -> Option<f64> {
        self.optimum.as_ref().map(|o| distance(&self.decision, &o.x))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    records: Vec<RoundRecord>,
}

impl Trajectory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            records: Vec::with_capacity(n),
        }
    }

    pub fn push(&mut self, record: RoundRecord) {
        self.records.push(record);
    }

    /// Horizon `T`.
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[RoundRecord] {
        &self.records
    }

    pub fn decisions(&self) -> impl Iterator<Item = &[f64]> {
        self.records.iter().map(|r| r.decision.as_slice())
    }

    /// Recorded optima, `None` if any round lacks one.
    pub fn optima(&self) -> Option<Vec<&[f64]>> {
        self.records
            .iter()
            .map(|r| r.optimum.as_ref().map(|o| o.x.as_slice()))
            .collect()
    }

    /// Records from index `start` on.
    pub fn slice_from(&self, start: usize) -> Self {
        Self {
            records: self.records[start.min(self.records.len())..].to_vec(),
        }
    }

    pub fn concat(mut self, other: Trajectory) -> Self {
        self.records.extend(other.records);
        self
    }
}

impl FromIterator<RoundRecord> for Trajectory {
    fn from_iter<I: IntoIterator<Item = RoundRecord>>(iter: I) -> Self {
        Self {
            records: iter.into_iter().collect(),
        }
    }
}
