//! Offline round-optimum solver used to measure dynamic regret.

use super::problem::RoundProblem;
use super::trajectory::RoundOptimum;
use crate::error::{Error, Result};
use crate::linalg::{norm, project_affine, Cholesky, Matrix};
use crate::linalg::{KktSystem, SINGULAR_RCOND};

/// Damped equality-constrained Newton with backtracking on the KKT residual
/// norm, followed by full Newton steps that polish coordinates whose scale
/// is too small to register in the residual norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimumSolver {
    pub tol: f64,
    pub max_iters: usize,
    pub shrink: f64,
    pub sufficient_decrease: f64,
    /// Scale `tol` by `1 + ‖∇f‖` at the projected starting point.
    pub relative: bool,
    /// Polishing stops once `‖Δx‖∞ ≤ step_tol·(1 + ‖x‖∞)`.
    pub step_tol: f64,
}

impl Default for OptimumSolver {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 200,
            shrink: 0.5,
            sufficient_decrease: 1e-4,
            relative: false,
            step_tol: 1e-12,
        }
    }
}

struct KktResidual {
    dual: Vec<f64>,
    primal: Vec<f64>,
}

impl KktResidual {
    fn at(round: &RoundProblem, x: &[f64], nu: &[f64]) -> Self {
        let c = round.constraint();
        let mut dual = round.objective().gradient(x);
        let atnu = c.a().tr_mul_vec(nu);
        dual.iter_mut().zip(&atnu).for_each(|(g, v)| *g += v);
        Self {
            dual,
            primal: c.residual(x),
        }
    }

    fn norm(&self) -> f64 {
        let s = self.dual.iter().chain(&self.primal).map(|v| v * v).sum::<f64>();
        if s.is_finite() {
            s.sqrt()
        } else {
            f64::INFINITY
        }
    }

    fn converged(&self, tol: f64) -> bool {
        norm(&self.dual) <= tol && norm(&self.primal) <= tol
    }
}

/// Least-squares multiplier `argmin_ν ‖∇f + Aᵀν‖`.
fn least_squares_dual(a: &Matrix, grad: &[f64]) -> Result<Vec<f64>> {
    let chol = Cholesky::factor(&a.gram_rows()).ok_or(Error::RankDeficientConstraint { rcond: 0.0 })?;
    if chol.rcond() < SINGULAR_RCOND {
        return Err(Error::RankDeficientConstraint { rcond: chol.rcond() });
    }
    let rhs: Vec<f64> = a.mul_vec(grad).iter().map(|v| -v).collect();
    Ok(chol.solve(&rhs))
}

/// Infeasible-start Newton direction: `[[H, Aᵀ], [A, 0]] [Δx; ν⁺] = −[∇f; A x − b]`.
fn newton_direction(round: &RoundProblem, x: &[f64], nu: &[f64], primal: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let f = round.objective();
    let sys = KktSystem::new(f.hessian(x), round.constraint().a().clone(), f.gradient(x))?;
    let mut rhs = sys.rhs();
    let n = x.len();
    rhs[n..].iter_mut().zip(primal).for_each(|(r, p)| *r = -p);
    let z = crate::linalg::kkt_solve_block(&sys.block_matrix(), &rhs)?;
    let (dx, nu_plus) = z.split_at(n);
    let dnu = nu_plus.iter().zip(nu).map(|(a, b)| a - b).collect();
    Ok((dx.to_vec(), dnu))
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

impl OptimumSolver {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub fn relative(tol: f64) -> Self {
        Self {
            tol,
            relative: true,
            ..Self::default()
        }
    }

    pub fn solve(&self, round: &RoundProblem, x_init: &[f64]) -> Result<RoundOptimum> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance {}", self.tol)));
        }
        if x_init.len() != round.dim() {
            return Err(Error::DimensionMismatch("initial point".into()));
        }
        if x_init.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("initial point must be finite".into()));
        }
        let c = round.constraint();
        let f = round.objective();
        let mut x = project_affine(x_init, c.a(), c.b())?;
        let mut nu = least_squares_dual(c.a(), &f.gradient(&x))?;
        let tol = if self.relative {
            self.tol * (1.0 + norm(&f.gradient(&x)))
        } else {
            self.tol
        };

        let mut res = KktResidual::at(round, &x, &nu);
        let mut iters = 0;
        while !res.converged(tol) {
            if iters == self.max_iters {
                return Err(Error::NoConvergence {
                    iterations: iters,
                    residual: res.norm(),
                });
            }
            iters += 1;
            let (dx, dnu) = newton_direction(round, &x, &nu, &res.primal)?;
            let r0 = res.norm();
            let mut s = 1.0;
            loop {
                let xs: Vec<f64> = x.iter().zip(&dx).map(|(xi, d)| xi + s * d).collect();
                let nus: Vec<f64> = nu.iter().zip(&dnu).map(|(v, d)| v + s * d).collect();
                let rs = KktResidual::at(round, &xs, &nus);
                if rs.norm() <= (1.0 - self.sufficient_decrease * s) * r0 {
                    x = xs;
                    nu = nus;
                    res = rs;
                    break;
                }
                s *= self.shrink;
                if s < 1e-12 {
                    return Err(Error::NoConvergence {
                        iterations: iters,
                        residual: r0,
                    });
                }
            }
        }

        // Polish with full steps until they become negligible. A step more
        // than twice the previous one signals overshoot and ends polishing.
        let mut last_step = f64::INFINITY;
        while iters < self.max_iters {
            iters += 1;
            let (dx, dnu) = newton_direction(round, &x, &nu, &res.primal)?;
            let step = inf_norm(&dx);
            if !(step <= 2.0 * last_step) {
                break;
            }
            let xs: Vec<f64> = x.iter().zip(&dx).map(|(xi, d)| xi + d).collect();
            let nus: Vec<f64> = nu.iter().zip(&dnu).map(|(v, d)| v + d).collect();
            let rs = KktResidual::at(round, &xs, &nus);
            if !rs.converged(tol) {
                break;
            }
            x = xs;
            nu = nus;
            res = rs;
            last_step = step;
            if step <= self.step_tol * (1.0 + inf_norm(&x)) {
                break;
            }
        }
        Ok(RoundOptimum {
            value: f.value(&x),
            x,
            nu,
        })
    }
}

/// KKT point of `round` to absolute tolerance `tol`, starting from `x_init`.
pub fn solve_round_optimum(round: &RoundProblem, x_init: &[f64], tol: f64) -> Result<RoundOptimum> {
    OptimumSolver::with_tol(tol).solve(round, x_init)
}
