//! Dynamic regret, constraint violation, path length and the closed-form
//! bounds they are checked against.

use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::linalg::distance;
use crate::online::Trajectory;

/// Cumulative per-round series of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries {
    pub cumulative_regret: Vec<f64>,
    pub cumulative_violation: Vec<f64>,
    /// `V_T`, total variation of the recorded optima.
    pub path_length: f64,
    /// `δ`, zero when no constants are supplied.
    pub delta: f64,
}

impl MetricSeries {
    pub fn from_trajectory(traj: &Trajectory, constants: Option<&Constants>) -> Result<Self> {
        let cumulative_regret = dynamic_regret(traj)?;
        let cumulative_violation = constraint_violation(traj);
        let optima = traj.optima().ok_or(Error::MissingOptima { round: 0 })?;
        Ok(Self {
            cumulative_regret,
            cumulative_violation,
            path_length: path_length(&optima),
            delta: constants.map_or(Ok(0.0), |c| delta(c, traj))?,
        })
    }
}

fn cumulative(values: impl Iterator<Item = f64>) -> Vec<f64> {
    values
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

/// Entry `t` is `Σ_{s≤t} f_s(x_s) − f_s(x_s*)` (signed).
pub fn dynamic_regret(traj: &Trajectory) -> Result<Vec<f64>> {
    let per_round = traj
        .records()
        .iter()
        .map(|r| {
            r.optimum
                .as_ref()
                .map(|o| r.loss - o.value)
                .ok_or(Error::MissingOptima { round: r.t })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(cumulative(per_round.into_iter()))
}

/// Entry `t` is `Σ_{s≤t} ‖A_s x_s − b_s‖`.
pub fn constraint_violation(traj: &Trajectory) -> Vec<f64> {
    cumulative(traj.records().iter().map(|r| r.residual))
}

/// `Σ ‖x*_{t+1} − x*_t‖`; zero for fewer than two points.
pub fn path_length<V: AsRef<[f64]>>(optima: &[V]) -> f64 {
    optima
        .windows(2)
        .map(|w| distance(w[0].as_ref(), w[1].as_ref()))
        .sum()
}

/// `δ` from the first and last recorded gaps `‖x_t − x_t*‖`.
pub fn delta(c: &Constants, traj: &Trajectory) -> Result<f64> {
    let recs = traj.records();
    let (first, last) = match (recs.first(), recs.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Ok(0.0),
    };
    let g0 = first.gap().ok_or(Error::MissingOptima { round: first.t })?;
    let g1 = last.gap().ok_or(Error::MissingOptima { round: last.t })?;
    Ok(c.delta(g0, g1))
}

fn denominator(c: &Constants) -> Result<f64> {
    let den = c.bound_denominator();
    if den <= 1e-12 * c.h() {
        return Err(Error::DegenerateConstants(format!(
            "h − 2Lγ = {den:e} is not positive"
        )));
    }
    Ok(den)
}

/// `l h (V_T + δ) / (h − 2Lγ)`
pub fn regret_bound(c: &Constants, path_length: f64, delta: f64) -> Result<f64> {
    Ok(c.loss_lipschitz() * c.h() * (path_length + delta) / denominator(c)?)
}

/// `a h (V_T + δ) / (h − 2Lγ)`
pub fn violation_bound(c: &Constants, path_length: f64, delta: f64) -> Result<f64> {
    Ok(c.a() * c.h() * (path_length + delta) / denominator(c)?)
}

/// Measured totals next to their theoretical bounds.
///
/// The first record is the initial decision `x_0`; measured regret and
/// violation sum the remaining rounds `1..=T`, while `V_T` and `δ` use all
/// recorded optima.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub regret: f64,
    pub violation: f64,
    pub regret_bound: f64,
    pub violation_bound: f64,
    pub path_length: f64,
    pub delta: f64,
}

impl BoundCheck {
    pub fn evaluate(traj: &Trajectory, c: &Constants) -> Result<Self> {
        let optima = traj.optima().ok_or(Error::MissingOptima { round: 0 })?;
        let v = path_length(&optima);
        let d = delta(c, traj)?;
        let tail = traj.slice_from(1);
        Ok(Self {
            regret: dynamic_regret(&tail)?.last().copied().unwrap_or(0.0),
            violation: constraint_violation(&tail).last().copied().unwrap_or(0.0),
            regret_bound: regret_bound(c, v, d)?,
            violation_bound: violation_bound(c, v, d)?,
            path_length: v,
            delta: d,
        })
    }

    pub fn regret_within(&self, slack: f64) -> bool {
        self.regret <= self.regret_bound + slack
    }

    pub fn violation_within(&self, slack: f64) -> bool {
        self.violation <= self.violation_bound + slack
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::linalg::Matrix;
    use crate::objective::Quadratic;
    use crate::online::{AffineEqualityConstraint, RoundOptimum, RoundProblem, RoundRecord};

    fn round(a: Vec<f64>, b: f64, t: usize) -> RoundProblem {
        let c = AffineEqualityConstraint::new(Matrix::from_rows(&[a]).unwrap(), vec![b]).unwrap();
        RoundProblem::new(t, Arc::new(Quadratic::half_norm_squared(2)), c).unwrap()
    }

    fn opt(x: Vec<f64>, value: f64) -> Option<RoundOptimum> {
        Some(RoundOptimum { x, nu: vec![0.0], value })
    }

    #[test]
    fn regret_of_single_round() {
        // f = ½‖x‖²: f(2,0) = 2, f(1,1) = 1
        let r = round(vec![1.0, 1.0], 2.0, 0);
        let rec = RoundRecord::new(&r, vec![2.0, 0.0], vec![0.0], None, opt(vec![1.0, 1.0], 1.0));
        let traj: Trajectory = std::iter::once(rec).collect();
        assert_eq!(dynamic_regret(&traj).unwrap(), vec![1.0]);
    }

    #[test]
    fn regret_zero_at_optima_and_additive() {
        let r = round(vec![1.0, 1.0], 2.0, 0);
        let at_opt: Trajectory = (0..3)
            .map(|_| RoundRecord::new(&r, vec![1.0, 1.0], vec![0.0], None, opt(vec![1.0, 1.0], 1.0)))
            .collect();
        assert_eq!(dynamic_regret(&at_opt).unwrap(), vec![0.0; 3]);

        let off: Trajectory = (0..2)
            .map(|_| RoundRecord::new(&r, vec![2.0, 0.0], vec![0.0], None, opt(vec![1.0, 1.0], 1.0)))
            .collect();
        let a = *dynamic_regret(&off).unwrap().last().unwrap();
        let b = *dynamic_regret(&at_opt).unwrap().last().unwrap();
        let both = off.clone().concat(at_opt.clone());
        assert_eq!(*dynamic_regret(&both).unwrap().last().unwrap(), a + b);
    }

    #[test]
    fn missing_optima() {
        let r = round(vec![1.0, 1.0], 2.0, 4);
        let traj: Trajectory = std::iter::once(RoundRecord::new(&r, vec![0.0, 0.0], vec![], None, None)).collect();
        assert_eq!(dynamic_regret(&traj), Err(Error::MissingOptima { round: 4 }));
    }

    #[test]
    fn violation_sums_norms() {
        let r = round(vec![1.0, 0.0], 1.0, 0);
        let one: Trajectory = std::iter::once(RoundRecord::new(&r, vec![0.0, 0.0], vec![], None, None)).collect();
        assert_eq!(constraint_violation(&one), vec![1.0]);

        // Residuals 3 and 4 on orthogonal single constraints.
        let r1 = round(vec![1.0, 0.0], 0.0, 0);
        let r2 = round(vec![0.0, 1.0], 0.0, 1);
        let traj: Trajectory = [
            RoundRecord::new(&r1, vec![3.0, 4.0], vec![], None, None),
            RoundRecord::new(&r2, vec![3.0, 4.0], vec![], None, None),
        ]
        .into_iter()
        .collect();
        assert_eq!(constraint_violation(&traj), vec![3.0, 7.0]);

        let feasible: Trajectory = std::iter::once(RoundRecord::new(&r, vec![1.0, 5.0], vec![], None, None)).collect();
        assert_eq!(constraint_violation(&feasible), vec![0.0]);
    }

    #[test]
    fn path_length_examples() {
        assert_eq!(path_length(&vec![vec![1.0, 2.0]; 4]), 0.0);
        assert_eq!(path_length(&[vec![0.0, 0.0], vec![3.0, 4.0]]), 5.0);
        let unit: Vec<Vec<f64>> = (0..10).map(|t| vec![t as f64, 0.0]).collect();
        let v = path_length(&unit);
        assert_eq!(v, 9.0);
        assert!(v <= 1.0 * unit.len() as f64);
        assert_eq!(path_length::<Vec<f64>>(&[vec![1.0]]), 0.0);
    }

    #[test]
    fn bound_examples() {
        // γ = min(0.5, 2/2) = 0.5
        let c = Constants::new(2.0, 0.5, 1.0, 1.0, 0.1, 1.0).unwrap();
        assert_eq!(regret_bound(&c, 10.0, 0.0).unwrap(), 20.0);
        assert_eq!(violation_bound(&c, 10.0, 0.0).unwrap(), 20.0);

        let quad = Constants::new(3.0, 0.5, 0.0, 1.5, 0.1, 1.0).unwrap();
        assert_eq!(regret_bound(&quad, 4.0, 2.0).unwrap(), 1.5 * 6.0);

        let no_constraints = Constants::new(2.0, 0.5, 1.0, 1.0, 0.1, 0.0).unwrap();
        assert_eq!(violation_bound(&no_constraints, 10.0, 0.0).unwrap(), 0.0);
        let scaled = Constants::new(2.0, 0.5, 1.0, 1.0, 0.1, 3.0).unwrap();
        assert_eq!(violation_bound(&scaled, 10.0, 0.0).unwrap(), 60.0);
    }

    #[test]
    fn degenerate_constants() {
        // β ≥ h/(2L) makes γ = h/(2L), so h − 2Lγ = 0.
        let c = Constants::new(2.0, 5.0, 1.0, 1.0, 0.1, 1.0).unwrap();
        assert!(matches!(regret_bound(&c, 1.0, 0.0), Err(Error::DegenerateConstants(_))));
        assert!(matches!(violation_bound(&c, 1.0, 0.0), Err(Error::DegenerateConstants(_))));
    }
}
