use super::cholesky::{Cholesky, Lu};
use super::matrix::{norm, Matrix};
use super::qr::HouseholderQr;
use super::SINGULAR_RCOND;
use crate::error::{Error, Result};
use crate::objective::Objective;

fn check_constraint_shape(x_len: usize, a: &Matrix, b: &[f64]) -> Result<()> {
    if a.cols() != x_len || a.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{}, b has {}, x has {}",
            a.rows(),
            a.cols(),
            b.len(),
            x_len
        )));
    }
    Ok(())
}

/// Euclidean projection onto `{y : A y = b}`:
/// `x + Aᵀ (A Aᵀ)⁻¹ (b − A x)`.
pub fn project_affine(x: &[f64], a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    check_constraint_shape(x.len(), a, b)?;
    let gram = a.gram_rows();
    let chol = Cholesky::factor(&gram).ok_or(Error::RankDeficientConstraint { rcond: 0.0 })?;
    if chol.rcond() < SINGULAR_RCOND {
        return Err(Error::RankDeficientConstraint { rcond: chol.rcond() });
    }
    let mut out = x.to_vec();
    // A second pass removes the residual left by the normal equations.
    for _ in 0..2 {
        let resid: Vec<f64> = b.iter().zip(a.mul_vec(&out)).map(|(bi, ai)| bi - ai).collect();
        if resid.iter().all(|r| *r == 0.0) {
            break;
        }
        let w = chol.solve(&resid);
        let corr = a.tr_mul_vec(&w);
        out.iter_mut().zip(&corr).for_each(|(o, c)| *o += c);
    }
    Ok(out)
}

/// Orthonormal basis `F̄` (n x (n−p)) of the null space of a full-row-rank `A`,
/// taken from the trailing columns of a full QR of `Aᵀ`.
pub fn null_space_basis(a: &Matrix) -> Result<Matrix> {
    let (p, n) = (a.rows(), a.cols());
    if p > n {
        return Err(Error::RankDeficientConstraint { rcond: 0.0 });
    }
    let qr = HouseholderQr::factor(&a.transpose());
    if p > 0 && qr.rcond() < SINGULAR_RCOND {
        return Err(Error::RankDeficientConstraint { rcond: qr.rcond() });
    }
    let q = qr.q();
    Ok(Matrix::from_fn(n, n - p, |i, j| q[(i, p + j)]))
}

/// Newton step of the reduced function `z ↦ f(F̄ z + x̂)` lifted back to `Rⁿ`:
/// `F̄ Δz` with `Δz = −(F̄ᵀ ∇²f F̄)⁻¹ F̄ᵀ ∇f`.
pub fn reduced_newton_step(
    objective: &dyn Objective,
    a: &Matrix,
    b: &[f64],
    x: &[f64],
) -> Result<Vec<f64>> {
    check_constraint_shape(x.len(), a, b)?;
    if objective.dim() != x.len() {
        return Err(Error::DimensionMismatch("objective dimension".into()));
    }
    let resid: Vec<f64> = a.mul_vec(x).iter().zip(b).map(|(ax, bi)| ax - bi).collect();
    let residual = norm(&resid);
    if residual > 1e-8 * (1.0 + norm(b)) {
        return Err(Error::InfeasibleInput { residual });
    }
    let basis = null_space_basis(a)?;
    if basis.cols() == 0 {
        return Ok(vec![0.0; x.len()]);
    }
    let h = objective.hessian(x);
    let g = objective.gradient(x);
    let reduced_h = basis.transpose().matmul(&h).matmul(&basis);
    let reduced_g = basis.tr_mul_vec(&g);
    let lu = Lu::factor(&reduced_h);
    if !(lu.rcond() >= SINGULAR_RCOND) {
        return Err(Error::SingularReducedHessian { rcond: lu.rcond() });
    }
    let neg_g: Vec<f64> = reduced_g.iter().map(|v| -v).collect();
    let dz = lu.solve(&neg_g);
    Ok(basis.mul_vec(&dz))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::Quadratic;

    fn row(v: &[f64]) -> Matrix {
        Matrix::from_rows(&[v.to_vec()]).unwrap()
    }

    #[test]
    fn projection_examples() {
        assert_eq!(project_affine(&[1.0, 1.0], &row(&[1.0, 1.0]), &[2.0]).unwrap(), vec![1.0, 1.0]);
        assert_eq!(project_affine(&[0.0, 0.0], &row(&[1.0, 0.0]), &[1.0]).unwrap(), vec![1.0, 0.0]);
        // AAᵀ = 2: x + (1,1)·(2 − 0)/2 = (1, 1)
        let p = project_affine(&[0.0, 0.0], &row(&[1.0, 1.0]), &[2.0]).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15 && (p[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn projection_rejects_rank_deficient() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0, 0.0], vec![2.0, 4.0, 0.0]]).unwrap();
        assert!(matches!(
            project_affine(&[0.0; 3], &a, &[1.0, 2.0]),
            Err(Error::RankDeficientConstraint { .. })
        ));
    }

    #[test]
    fn null_space_examples() {
        let f = null_space_basis(&row(&[1.0, 0.0])).unwrap();
        assert_eq!((f.rows(), f.cols()), (2, 1));
        assert!(f[(0, 0)].abs() < 1e-15 && (f[(1, 0)].abs() - 1.0).abs() < 1e-15);

        let f = null_space_basis(&row(&[1.0, 1.0])).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((f[(0, 0)].abs() - s).abs() < 1e-15);
        assert!((f[(0, 0)] + f[(1, 0)]).abs() < 1e-15);
    }

    #[test]
    fn null_space_rank_deficient() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0, 1.0], vec![2.0, 2.0, 2.0]]).unwrap();
        assert!(matches!(null_space_basis(&a), Err(Error::RankDeficientConstraint { .. })));
    }

    #[test]
    fn reduced_step_on_half_norm() {
        let f = Quadratic::half_norm_squared(2);
        let step = reduced_newton_step(&f, &row(&[1.0, 1.0]), &[2.0], &[2.0, 0.0]).unwrap();
        assert!((step[0] + 1.0).abs() < 1e-14 && (step[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reduced_step_zero_at_optimum() {
        let f = Quadratic::half_norm_squared(2);
        let step = reduced_newton_step(&f, &row(&[1.0, 1.0]), &[2.0], &[1.0, 1.0]).unwrap();
        assert!(norm(&step) < 1e-15);
    }

    #[test]
    fn reduced_step_errors() {
        let f = Quadratic::half_norm_squared(2);
        assert!(matches!(
            reduced_newton_step(&f, &row(&[1.0, 1.0]), &[2.0], &[0.0, 0.0]),
            Err(Error::InfeasibleInput { .. })
        ));
        let flat = Quadratic::new(Matrix::zeros(2, 2), vec![0.0; 2], vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            reduced_newton_step(&flat, &row(&[1.0, 1.0]), &[2.0], &[1.0, 1.0]),
            Err(Error::SingularReducedHessian { .. })
        ));
    }
}
