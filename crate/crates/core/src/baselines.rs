//! First-order comparators on the relaxed inequality form `g(x) ≤ 0`.
//!
//! These are simplified stand-ins labelled "MOSP-style" (projected-free
//! online saddle point) and "MALM-style" (online augmented Lagrangian). They
//! are not reproductions of the published methods.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::online::{AffineEqualityConstraint, ProblemSequence, RoundOptimum, RoundProblem, RoundRecord, Trajectory};

/// Direction of a relaxed equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sense {
    /// `A x − b ≤ 0`
    #[default]
    AtMost,
    /// `b − A x ≤ 0`
    AtLeast,
}

/// `g(x) ≤ 0` with `g` affine, built from an equality `A x = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityConstraint {
    a: Matrix,
    b: Vec<f64>,
    sense: Sense,
}

impl InequalityConstraint {
    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    /// `g(x)`
    pub fn value(&self, x: &[f64]) -> Vec<f64> {
        let sign = self.sign();
        self.a
            .mul_vec(x)
            .iter()
            .zip(&self.b)
            .map(|(ax, b)| sign * (ax - b))
            .collect()
    }

    /// `∇g(x)ᵀ λ`
    pub fn jacobian_tr_mul(&self, lambda: &[f64]) -> Vec<f64> {
        let sign = self.sign();
        self.a.tr_mul_vec(lambda).into_iter().map(|v| sign * v).collect()
    }

    pub fn is_satisfied(&self, x: &[f64], tol: f64) -> bool {
        self.value(x).iter().all(|g| *g <= tol)
    }

    fn sign(&self) -> f64 {
        match self.sense {
            Sense::AtMost => 1.0,
            Sense::AtLeast => -1.0,
        }
    }
}

/// `A x = b` relaxed to `A x − b ≤ 0`.
pub fn relax_constraint(c: &AffineEqualityConstraint) -> InequalityConstraint {
    relax_constraint_with(c, Sense::AtMost)
}

pub fn relax_constraint_with(c: &AffineEqualityConstraint, sense: Sense) -> InequalityConstraint {
    InequalityConstraint {
        a: c.a().clone(),
        b: c.b().to_vec(),
        sense,
    }
}

fn check_steps(names: &[(&str, f64)]) -> Result<()> {
    for (name, v) in names {
        if !(v.is_finite() && *v > 0.0) {
            return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(())
}

fn check_lambda(lambda: &[f64]) -> Result<()> {
    if lambda.iter().any(|l| !(*l >= 0.0) || !l.is_finite()) {
        return Err(Error::InvalidArgument("multipliers must be finite and nonnegative".into()));
    }
    Ok(())
}

fn finite_or(v: Vec<f64>, round: usize) -> Result<Vec<f64>> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(Error::NonFiniteIterate { round })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddlePointState {
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    pub eta_x: f64,
    pub eta_l: f64,
}

impl SaddlePointState {
    pub fn new(x: Vec<f64>, lambda: Vec<f64>, eta_x: f64, eta_l: f64) -> Result<Self> {
        check_steps(&[("eta_x", eta_x), ("eta_l", eta_l)])?;
        check_lambda(&lambda)?;
        Ok(Self {
            x,
            lambda,
            eta_x,
            eta_l,
        })
    }
}

/// Gradient descent–ascent on `f(x) + λᵀ g(x)`:
/// `x⁺ = x − η_x (∇f(x) + ∇g λ)`, `λ⁺ = max(0, λ + η_l g(x⁺))`.
pub fn saddle_point_step(
    state: &SaddlePointState,
    round: &RoundProblem,
    sense: Sense,
) -> Result<SaddlePointState> {
    let ineq = relax_constraint_with(round.constraint(), sense);
    let grad = round.objective().gradient(&state.x);
    let penalty = ineq.jacobian_tr_mul(&state.lambda);
    let x: Vec<f64> = state
        .x
        .iter()
        .zip(grad.iter().zip(&penalty))
        .map(|(xi, (g, p))| xi - state.eta_x * (g + p))
        .collect();
    let x = finite_or(x, round.t())?;
    let lambda: Vec<f64> = state
        .lambda
        .iter()
        .zip(ineq.value(&x))
        .map(|(l, g)| (l + state.eta_l * g).max(0.0))
        .collect();
    let lambda = finite_or(lambda, round.t())?;
    Ok(SaddlePointState { x, lambda, ..*state })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugLagState {
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    pub rho: f64,
    pub eta_x: f64,
}

impl AugLagState {
    pub fn new(x: Vec<f64>, lambda: Vec<f64>, rho: f64, eta_x: f64) -> Result<Self> {
        check_steps(&[("rho", rho), ("eta_x", eta_x)])?;
        check_lambda(&lambda)?;
        Ok(Self {
            x,
            lambda,
            rho,
            eta_x,
        })
    }
}

/// One descent step on `f(x) + λᵀg(x) + (ρ/2)‖max(0, g(x))‖²`, then
/// `λ⁺ = max(0, λ + ρ g(x⁺))`.
pub fn aug_lagrangian_step(
    state: &AugLagState,
    round: &RoundProblem,
    sense: Sense,
) -> Result<AugLagState> {
    let ineq = relax_constraint_with(round.constraint(), sense);
    let g = ineq.value(&state.x);
    let weights: Vec<f64> = state
        .lambda
        .iter()
        .zip(&g)
        .map(|(l, gi)| l + state.rho * gi.max(0.0))
        .collect();
    let grad = round.objective().gradient(&state.x);
    let penalty = ineq.jacobian_tr_mul(&weights);
    let x: Vec<f64> = state
        .x
        .iter()
        .zip(grad.iter().zip(&penalty))
        .map(|(xi, (gf, p))| xi - state.eta_x * (gf + p))
        .collect();
    let x = finite_or(x, round.t())?;
    let lambda: Vec<f64> = state
        .lambda
        .iter()
        .zip(ineq.value(&x))
        .map(|(l, gi)| (l + state.rho * gi).max(0.0))
        .collect();
    let lambda = finite_or(lambda, round.t())?;
    Ok(AugLagState { x, lambda, ..*state })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Baseline {
    SaddlePoint,
    AugmentedLagrangian,
}

impl Baseline {
    pub fn name(self) -> &'static str {
        match self {
            Baseline::SaddlePoint => "mosp-style",
            Baseline::AugmentedLagrangian => "malm-style",
        }
    }
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mosp-style" | "mosp" => Ok(Baseline::SaddlePoint),
            "malm-style" | "malm" => Ok(Baseline::AugmentedLagrangian),
            _ => Err(Error::InvalidArgument(format!("unknown baseline {s:?}"))),
        }
    }
}

/// Step-size constants. Steps are `c / √T` for horizon `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineParams {
    /// Primal step constant.
    pub primal: f64,
    /// Dual step constant (saddle point) or penalty constant (augmented Lagrangian).
    pub dual: f64,
    pub sense: Sense,
}

impl BaselineParams {
    pub fn steps(&self, horizon: usize) -> (f64, f64) {
        let s = (horizon.max(1) as f64).sqrt();
        (self.primal / s, self.dual / s)
    }
}

/// Runs a baseline from `(x0, λ0)` over the sequence.
pub fn run_baseline(
    kind: Baseline,
    problems: &ProblemSequence,
    x0: &[f64],
    lambda0: &[f64],
    params: &BaselineParams,
    optima: Option<&[RoundOptimum]>,
) -> Result<Trajectory> {
    if x0.len() != problems.dim() {
        return Err(Error::DimensionMismatch("x0".into()));
    }
    let p = problems.rounds()[0].constraint().num_constraints();
    if lambda0.len() != p {
        return Err(Error::DimensionMismatch("lambda0".into()));
    }
    if let Some(o) = optima {
        if o.len() != problems.len() {
            return Err(Error::DimensionMismatch("optima".into()));
        }
    }
    let (eta_x, eta_l) = params.steps(problems.len());
    let mut traj = Trajectory::with_capacity(problems.len());
    match kind {
        Baseline::SaddlePoint => {
            let mut state = SaddlePointState::new(x0.to_vec(), lambda0.to_vec(), eta_x, eta_l)?;
            for (i, round) in problems.iter().enumerate() {
                let next = saddle_point_step(&state, round, params.sense)?;
                let played = std::mem::replace(&mut state, next);
                traj.push(RoundRecord::new(
                    round,
                    played.x,
                    state.lambda.clone(),
                    None,
                    optima.map(|o| o[i].clone()),
                ));
            }
        }
        Baseline::AugmentedLagrangian => {
            let mut state = AugLagState::new(x0.to_vec(), lambda0.to_vec(), eta_l, eta_x)?;
            for (i, round) in problems.iter().enumerate() {
                let next = aug_lagrangian_step(&state, round, params.sense)?;
                let played = std::mem::replace(&mut state, next);
                traj.push(RoundRecord::new(
                    round,
                    played.x,
                    state.lambda.clone(),
                    None,
                    optima.map(|o| o[i].clone()),
                ));
            }
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::objective::Quadratic;

    fn half_norm_round() -> RoundProblem {
        let c = AffineEqualityConstraint::new(Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap(), vec![2.0])
            .unwrap();
        RoundProblem::new(0, Arc::new(Quadratic::half_norm_squared(2)), c).unwrap()
    }

    #[test]
    fn relaxation_keeps_data() {
        let r = half_norm_round();
        let ineq = relax_constraint(r.constraint());
        assert_eq!(ineq.a(), r.constraint().a());
        assert_eq!(ineq.b(), &[2.0]);
        // x1 + x2 ≤ 2
        assert!(ineq.is_satisfied(&[1.0, 1.0], 0.0));
        assert_eq!(ineq.value(&[1.0, 1.0]), vec![0.0]);
        assert!(ineq.value(&[0.0, 0.0])[0] < 0.0);
        assert!(!ineq.is_satisfied(&[2.0, 1.0], 0.0));

        let rev = relax_constraint_with(r.constraint(), Sense::AtLeast);
        assert!(rev.is_satisfied(&[2.0, 1.0], 0.0));
        assert!(!rev.is_satisfied(&[0.0, 0.0], 0.0));
    }

    #[test]
    fn saddle_point_stationary() {
        let r = half_norm_round();
        // ∇f(0) = 0 and λ = 0
        let s = SaddlePointState::new(vec![0.0, 0.0], vec![0.0], 0.5, 0.5).unwrap();
        let n = saddle_point_step(&s, &r, Sense::AtMost).unwrap();
        assert_eq!(n.x, vec![0.0, 0.0]);
    }

    #[test]
    fn saddle_point_hand_step() {
        let r = half_norm_round();
        let s = SaddlePointState::new(vec![1.0, 1.0], vec![0.0], 0.1, 0.3).unwrap();
        let n = saddle_point_step(&s, &r, Sense::AtMost).unwrap();
        assert!((n.x[0] - 0.9).abs() < 1e-15 && (n.x[1] - 0.9).abs() < 1e-15);
        // max(0, 0.3 · (1.8 − 2)) = 0
        assert_eq!(n.lambda, vec![0.0]);
    }

    #[test]
    fn saddle_point_diverges_loudly() {
        let c = AffineEqualityConstraint::new(Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap(), vec![2.0])
            .unwrap();
        let steep = Quadratic::new(Matrix::identity(2).scaled(1e300), vec![0.0; 2], vec![0.0; 2]).unwrap();
        let r = RoundProblem::new(0, Arc::new(steep), c).unwrap();
        let s = SaddlePointState::new(vec![1.0, 1.0], vec![0.0], 1e300, 1.0).unwrap();
        assert!(matches!(
            saddle_point_step(&s, &r, Sense::AtMost),
            Err(Error::NonFiniteIterate { .. })
        ));
    }

    #[test]
    fn aug_lag_hand_step() {
        let r = half_norm_round();
        let s = AugLagState::new(vec![2.0, 2.0], vec![0.0], 1.0, 0.1).unwrap();
        let n = aug_lagrangian_step(&s, &r, Sense::AtMost).unwrap();
        assert!((n.x[0] - 1.6).abs() < 1e-15 && (n.x[1] - 1.6).abs() < 1e-15);
        // λ⁺ = max(0, 0 + 1 · (3.2 − 2))
        assert!((n.lambda[0] - 1.2).abs() < 1e-15);
    }

    #[test]
    fn aug_lag_inactive_is_gradient_step() {
        let r = half_norm_round();
        let s = AugLagState::new(vec![0.5, -0.25], vec![0.0], 2.0, 0.1).unwrap();
        let n = aug_lagrangian_step(&s, &r, Sense::AtMost).unwrap();
        let g = r.objective().gradient(&s.x);
        assert_eq!(n.x, vec![0.5 - 0.1 * g[0], -0.25 - 0.1 * g[1]]);
    }

    #[test]
    fn constructors_validate() {
        assert!(AugLagState::new(vec![0.0], vec![0.0], 0.0, 0.1).is_err());
        assert!(SaddlePointState::new(vec![0.0], vec![0.0], 0.0, 0.1).is_err());
        assert!(SaddlePointState::new(vec![0.0], vec![-1.0], 0.1, 0.1).is_err());
    }

    #[test]
    fn feasible_stationary_start_stays_put() {
        // Constant loss: zero gradient. Feasible start with λ = 0 is a fixed point.
        let c = AffineEqualityConstraint::new(Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap(), vec![2.0])
            .unwrap();
        let flat = Quadratic::new(Matrix::zeros(2, 2), vec![0.0; 2], vec![0.0; 2]).unwrap();
        let r = RoundProblem::new(0, Arc::new(flat), c).unwrap();
        let mut sp = SaddlePointState::new(vec![1.5, 0.5], vec![0.0], 0.1, 0.1).unwrap();
        let mut al = AugLagState::new(vec![1.5, 0.5], vec![0.0], 1.0, 0.1).unwrap();
        for _ in 0..10 {
            sp = saddle_point_step(&sp, &r, Sense::AtMost).unwrap();
            al = aug_lagrangian_step(&al, &r, Sense::AtMost).unwrap();
        }
        assert_eq!(sp.x, vec![1.5, 0.5]);
        assert_eq!(al.x, vec![1.5, 0.5]);
    }
}
