use super::ldlt::Ldlt;
use super::matrix::{norm, Matrix};
use super::SINGULAR_RCOND;
use crate::error::{Error, Result};

/// Newton system at a point: Hessian `H` (n x n), constraint `A` (p x n) and gradient `g`.
#[derive(Debug, Clone)]
pub struct KktSystem {
    hessian: Matrix,
    constraint: Matrix,
    gradient: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KktSolution {
    pub step: Vec<f64>,
    pub dual: Vec<f64>,
}

impl KktSystem {
    pub fn new(hessian: Matrix, constraint: Matrix, gradient: Vec<f64>) -> Result<Self> {
        let n = gradient.len();
        if hessian.rows() != n || hessian.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "Hessian is {}x{}, gradient has length {n}",
                hessian.rows(),
                hessian.cols()
            )));
        }
        if constraint.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "constraint has {} columns, expected {n}",
                constraint.cols()
            )));
        }
        if constraint.rows() > n {
            return Err(Error::DimensionMismatch(format!(
                "more constraints than variables, got p={} n={n}",
                constraint.rows()
            )));
        }
        if !hessian.is_symmetric(1e-10) {
            return Err(Error::InvalidArgument("Hessian is not symmetric".into()));
        }
        if gradient.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidArgument("gradient is not finite".into()));
        }
        Ok(Self {
            hessian,
            constraint,
            gradient,
        })
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraint.rows()
    }

    /// The `(n+p) x (n+p)` block matrix `[[H, Aᵀ], [A, 0]]`.
    pub fn block_matrix(&self) -> Matrix {
        let (n, p) = (self.dim(), self.num_constraints());
        Matrix::from_fn(n + p, n + p, |i, j| match (i < n, j < n) {
            (true, true) => self.hessian[(i, j)],
            (true, false) => self.constraint[(j - n, i)],
            (false, true) => self.constraint[(i - n, j)],
            (false, false) => 0.0,
        })
    }

    /// Right-hand side `[−g; 0]`.
    pub fn rhs(&self) -> Vec<f64> {
        let mut r: Vec<f64> = self.gradient.iter().map(|g| -g).collect();
        r.resize(self.dim() + self.num_constraints(), 0.0);
        r
    }

    pub fn gradient(&self) -> &[f64] {
        &self.gradient
    }
}

/// Solves `[[H, Aᵀ], [A, 0]] [Δx; ν] = [−g; 0]`.
pub fn solve_kkt(sys: &KktSystem) -> Result<KktSolution> {
    let rhs = sys.rhs();
    let z = solve_block(&sys.block_matrix(), &rhs)?;
    let n = sys.dim();
    Ok(KktSolution {
        step: z[..n].to_vec(),
        dual: z[n..].to_vec(),
    })
}

/// Factor-and-solve with one step of iterative refinement.
pub(crate) fn solve_block(m: &Matrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let f = Ldlt::factor(m);
    if !(f.rcond() >= SINGULAR_RCOND) {
        return Err(Error::SingularKkt { rcond: f.rcond() });
    }
    let mut z = f.solve(rhs);
    let r: Vec<f64> = rhs.iter().zip(m.mul_vec(&z)).map(|(b, mz)| b - mz).collect();
    if norm(&r) > 0.0 {
        let dz = f.solve(&r);
        z.iter_mut().zip(&dz).for_each(|(zi, di)| *zi += di);
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularKkt { rcond: 0.0 });
    }
    Ok(z)
}
