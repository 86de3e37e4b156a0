use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{norm, HouseholderQr, Matrix, SINGULAR_RCOND};
use crate::objective::Objective;

/// `A x = b` with `A` of full row rank `p ≤ n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineEqualityConstraint {
    a: Matrix,
    b: Vec<f64>,
}

impl AffineEqualityConstraint {
    pub fn new(a: Matrix, b: Vec<f64>) -> Result<Self> {
        if a.rows() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "A has {} rows but b has {} entries",
                a.rows(),
                b.len()
            )));
        }
        if a.rows() > a.cols() {
            return Err(Error::DimensionMismatch(format!(
                "need p ≤ n, got p={} n={}",
                a.rows(),
                a.cols()
            )));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("b must be finite".into()));
        }
        if a.rows() > 0 {
            let rcond = HouseholderQr::factor(&a.transpose()).rcond();
            if rcond < SINGULAR_RCOND {
                return Err(Error::RankDeficientConstraint { rcond });
            }
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    pub fn num_constraints(&self) -> usize {
        self.a.rows()
    }

    /// `A x − b`
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        self.a
            .mul_vec(x)
            .iter()
            .zip(&self.b)
            .map(|(ax, b)| ax - b)
            .collect()
    }

    pub fn residual_norm(&self, x: &[f64]) -> f64 {
        norm(&self.residual(x))
    }

    /// `‖A x − b‖ ≤ tol (1 + ‖b‖)`
    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        self.residual_norm(x) <= tol * (1.0 + norm(&self.b))
    }
}

/// One round: loss `f_t` and constraint `(A_t, b_t)`.
#[derive(Debug, Clone)]
pub struct RoundProblem {
    t: usize,
    objective: Arc<dyn Objective>,
    constraint: AffineEqualityConstraint,
}

impl RoundProblem {
    pub fn new(
        t: usize,
        objective: Arc<dyn Objective>,
        constraint: AffineEqualityConstraint,
    ) -> Result<Self> {
        if objective.dim() != constraint.dim() {
            return Err(Error::DimensionMismatch(format!(
                "objective has dimension {} but constraint has {} columns",
                objective.dim(),
                constraint.dim()
            )));
        }
        Ok(Self {
            t,
            objective,
            constraint,
        })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn objective(&self) -> &dyn Objective {
        self.objective.as_ref()
    }

    pub fn objective_arc(&self) -> &Arc<dyn Objective> {
        &self.objective
    }

    pub fn constraint(&self) -> &AffineEqualityConstraint {
        &self.constraint
    }

    pub fn dim(&self) -> usize {
        self.constraint.dim()
    }

    /// Same loss with a different constraint.
    pub fn with_constraint(&self, constraint: AffineEqualityConstraint) -> Result<Self> {
        Self::new(self.t, self.objective.clone(), constraint)
    }
}

/// Non-empty sequence of rounds sharing one dimension `n`.
#[derive(Debug, Clone)]
pub struct ProblemSequence {
    rounds: Vec<RoundProblem>,
}

impl ProblemSequence {
    pub fn new(rounds: Vec<RoundProblem>) -> Result<Self> {
        let first = rounds
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty problem sequence".into()))?;
        let n = first.dim();
        if let Some(r) = rounds.iter().find(|r| r.dim() != n) {
            return Err(Error::DimensionMismatch(format!(
                "round {} has dimension {}, expected {n}",
                r.t(),
                r.dim()
            )));
        }
        Ok(Self { rounds })
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.rounds[0].dim()
    }

    pub fn rounds(&self) -> &[RoundProblem] {
        &self.rounds
    }

    pub fn iter(&self) -> std::slice::Iter<'_, RoundProblem> {
        self.rounds.iter()
    }

    /// Index of the first round whose constraint differs from round 0's.
    pub fn first_constraint_change(&self) -> Option<usize> {
        let c0 = self.rounds[0].constraint();
        self.rounds.iter().position(|r| r.constraint() != c0)
    }

    /// Copy with round `index` replaced.
    pub fn with_round(&self, index: usize, round: RoundProblem) -> Result<Self> {
        let mut rounds = self.rounds.clone();
        rounds[index] = round;
        Self::new(rounds)
    }
}

impl<'a> IntoIterator for &'a ProblemSequence {
    type Item = &'a RoundProblem;
    type IntoIter = std::slice::Iter<'a, RoundProblem>;

    fn into_iter(self) -> Self::IntoIter {
        self.rounds.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::Quadratic;

    #[test]
    fn constraint_validation() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        assert!(AffineEqualityConstraint::new(a.clone(), vec![2.0]).is_ok());
        assert!(matches!(
            AffineEqualityConstraint::new(a, vec![2.0, 1.0]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(AffineEqualityConstraint::new(Matrix::identity(2), vec![1.0, 1.0]).is_ok());
        assert!(matches!(
            AffineEqualityConstraint::new(Matrix::zeros(3, 2), vec![1.0; 3]),
            Err(Error::DimensionMismatch(_))
        ));
        let dep = Matrix::from_rows(&[vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0]]).unwrap();
        assert!(matches!(
            AffineEqualityConstraint::new(dep, vec![1.0, 2.0]),
            Err(Error::RankDeficientConstraint { .. })
        ));
    }

    #[test]
    fn round_dimension_check() {
        let c = AffineEqualityConstraint::new(Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap(), vec![2.0])
            .unwrap();
        let f: Arc<dyn Objective> = Arc::new(Quadratic::half_norm_squared(3));
        assert!(RoundProblem::new(0, f, c).is_err());
    }
}
