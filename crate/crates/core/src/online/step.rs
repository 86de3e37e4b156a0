use super::problem::RoundProblem;
use crate::error::{Error, Result};
use crate::linalg::{norm, project_affine, solve_kkt, KktSystem};

/// Feasibility tolerance (relative to `1 + ‖b‖`) for points handed to the OEN update.
pub const FEASIBILITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct OenStep {
    pub next: Vec<f64>,
    pub dual: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpenMStep {
    pub next: Vec<f64>,
    pub dual: Vec<f64>,
    pub projected: Vec<f64>,
}

/// One equality-constrained Newton update from a feasible `x`:
/// `(Δx, ν) = −D(x)⁻¹ [∇f(x); 0]`, `x⁺ = x + Δx`.
pub fn oen_update(x: &[f64], round: &RoundProblem) -> Result<OenStep> {
    let c = round.constraint();
    if x.len() != c.dim() {
        return Err(Error::DimensionMismatch(format!(
            "decision has length {}, round has dimension {}",
            x.len(),
            c.dim()
        )));
    }
    let residual = c.residual_norm(x);
    if !(residual <= FEASIBILITY_TOL * (1.0 + norm(c.b()))) {
        return Err(Error::InfeasibleInput { residual });
    }
    let f = round.objective();
    let sys = KktSystem::new(f.hessian(x), c.a().clone(), f.gradient(x))?;
    let sol = solve_kkt(&sys)?;
    let next: Vec<f64> = x.iter().zip(&sol.step).map(|(xi, d)| xi + d).collect();
    if next.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteIterate { round: round.t() });
    }
    Ok(OenStep {
        next,
        dual: sol.dual,
    })
}

/// Projection of `x` onto the round's feasible set followed by [`oen_update`].
pub fn open_m_step(x: &[f64], round: &RoundProblem) -> Result<OpenMStep> {
    let c = round.constraint();
    let projected = project_affine(x, c.a(), c.b())?;
    let OenStep { next, dual } = oen_update(&projected, round)?;
    Ok(OpenMStep {
        next,
        dual,
        projected,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::linalg::Matrix;
    use crate::objective::Quadratic;
    use crate::online::AffineEqualityConstraint;

    fn half_norm_round(a: Vec<f64>, b: f64) -> RoundProblem {
        let c = AffineEqualityConstraint::new(Matrix::from_rows(&[a]).unwrap(), vec![b]).unwrap();
        RoundProblem::new(0, Arc::new(Quadratic::half_norm_squared(2)), c).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn newton_is_exact_on_half_norm() {
        let r = half_norm_round(vec![1.0, 1.0], 2.0);
        let s = oen_update(&[2.0, 0.0], &r).unwrap();
        assert!(close(&s.next, &[1.0, 1.0], 1e-14));
        assert!(close(&s.dual, &[-1.0], 1e-14));
    }

    #[test]
    fn fixed_point_at_optimum() {
        let r = half_norm_round(vec![1.0, 1.0], 2.0);
        let s = oen_update(&[1.0, 1.0], &r).unwrap();
        assert!(close(&s.next, &[1.0, 1.0], 1e-10));
    }

    #[test]
    fn infeasible_start_rejected() {
        let r = half_norm_round(vec![1.0, 1.0], 2.0);
        assert!(matches!(oen_update(&[0.0, 0.0], &r), Err(Error::InfeasibleInput { .. })));
    }

    #[test]
    fn open_m_examples() {
        let r = half_norm_round(vec![1.0, 0.0], 1.0);
        let s = open_m_step(&[0.0, 0.0], &r).unwrap();
        assert!(close(&s.projected, &[1.0, 0.0], 1e-15));
        assert!(close(&s.next, &[1.0, 0.0], 1e-14));

        let r = half_norm_round(vec![1.0, 1.0], 2.0);
        let s = open_m_step(&[0.0, 0.0], &r).unwrap();
        assert!(close(&s.projected, &[1.0, 1.0], 1e-15));
        assert!(close(&s.next, &[1.0, 1.0], 1e-14));
    }

    #[test]
    fn open_m_on_feasible_point_matches_oen() {
        let r = half_norm_round(vec![1.0, 1.0], 2.0);
        let x = [2.0, 0.0];
        let s = open_m_step(&x, &r).unwrap();
        assert_eq!(s.projected, x.to_vec());
        let o = oen_update(&x, &r).unwrap();
        assert_eq!(s.next, o.next);
        assert_eq!(s.dual, o.dual);
    }
}
