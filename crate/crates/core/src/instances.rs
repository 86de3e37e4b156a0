//! Synthetic instance families whose optima and problem constants are known
//! in closed form. Used by the property tests, the acceptance suite and the
//! CLI's quadratic scenarios.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::Constants;
use crate::error::{Error, Result};
use crate::linalg::{axpy, norm, null_space_basis, HouseholderQr, Matrix};
use crate::objective::{Quadratic, QuarticRegularized};
use crate::online::{AffineEqualityConstraint, ProblemSequence, RoundOptimum, RoundProblem};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in `[-1, 1]`.
pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v = random_vector(rng, n);
        let len = norm(&v);
        if len > 1e-3 {
            return v.iter().map(|x| x / len).collect();
        }
    }
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..=1.0))
}

/// Random `p x n` matrix with full row rank and reciprocal condition
/// estimate at least `1e-3`.
pub fn random_full_rank<R: Rng + ?Sized>(rng: &mut R, p: usize, n: usize) -> Matrix {
    loop {
        let a = random_matrix(rng, p, n);
        if p == 0 || HouseholderQr::factor(&a.transpose()).rcond() > 1e-3 {
            return a;
        }
    }
}

pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    HouseholderQr::factor(&random_full_rank(rng, n, n)).q().clone()
}

/// `U diag(λ) Uᵀ` with `λ` uniform in `[lo, hi]`; the extremes are always
/// attained so the spectrum is exactly `[lo, hi]`.
pub fn random_spd<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Matrix {
    let u = random_orthogonal(rng, n);
    let eig: Vec<f64> = (0..n)
        .map(|i| match i {
            0 => lo,
            1 => hi,
            _ => rng.random_range(lo..=hi),
        })
        .collect();
    let m = Matrix::from_fn(n, n, |i, j| (0..n).map(|k| u[(i, k)] * eig[k] * u[(j, k)]).sum());
    // Symmetrize away rounding.
    Matrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
}

/// A random feasible configuration `(objective, constraint, x)` with a
/// strongly convex quadratic objective and `A x = b`.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub objective: Quadratic,
    pub constraint: AffineEqualityConstraint,
    pub x: Vec<f64>,
}

impl RandomInstance {
    pub fn generate<R: Rng + ?Sized>(rng: &mut R, n: usize, p: usize) -> Result<Self> {
        let q = random_spd(rng, n, 0.5, 5.0);
        let objective = Quadratic::new(q, random_vector(rng, n), random_vector(rng, n))?;
        let a = random_full_rank(rng, p, n);
        let x = random_vector(rng, n).iter().map(|v| 3.0 * v).collect::<Vec<_>>();
        let b = a.mul_vec(&x);
        Ok(Self {
            objective,
            constraint: AffineEqualityConstraint::new(a, b)?,
            x,
        })
    }

    pub fn round(&self) -> Result<RoundProblem> {
        RoundProblem::new(0, Arc::new(self.objective.clone()), self.constraint.clone())
    }
}

/// A synthetic sequence with its exact optima and constants.
#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    pub problems: ProblemSequence,
    pub optima: Vec<RoundOptimum>,
    pub constants: Constants,
    pub x0: Vec<f64>,
}

/// Quadratic rounds `f_t(x) = ½ (x − c_t)ᵀ Q (x − c_t)` with prescribed
/// optima. For each round a primal optimum `x*_t` and multiplier `ν*_t` are
/// drawn, then `c_t = x*_t + Q⁻¹ A_tᵀ ν*_t` and `b_t = A_t x*_t` make them the
/// exact KKT pair.
///
/// Constants: `h = λ_min(Q)`, `L = 0` (so `γ = β`), `a` the largest
/// Frobenius norm of any `A_t`, and `l = a ν̄ + ½ λ_max(Q) β`, which bounds
/// `|f_t(x) − f_t(x*_t)| / ‖x − x*_t‖` on the ball of radius `β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticFamily {
    pub n: usize,
    pub p: usize,
    /// Rounds are numbered `0..=horizon`.
    pub horizon: usize,
    pub eig_min: f64,
    pub eig_max: f64,
    /// Neighbourhood radius; also `γ` since the Hessian is constant.
    pub beta: f64,
    /// Per-round drift of the optimum, at most `beta`.
    pub v_bar: f64,
    /// Bound on `‖ν*_t‖`.
    pub nu_bar: f64,
    /// Size of the per-round perturbation of `A`; zero keeps `A` fixed.
    pub constraint_drift: f64,
    /// Whether `b_t` (and `A_t` when `constraint_drift > 0`) change.
    pub varying_constraints: bool,
    /// `‖x0 − x*_0‖`, at most `beta`.
    pub start_radius: f64,
}

impl Default for QuadraticFamily {
    fn default() -> Self {
        Self {
            n: 10,
            p: 3,
            horizon: 200,
            eig_min: 1.0,
            eig_max: 4.0,
            beta: 1.0,
            v_bar: 0.5,
            nu_bar: 1.0,
            constraint_drift: 0.0,
            varying_constraints: false,
            start_radius: 0.5,
        }
    }
}

impl QuadraticFamily {
    fn validate(&self) -> Result<()> {
        if self.p > self.n {
            return Err(Error::InvalidArgument("need p ≤ n".into()));
        }
        if !(self.eig_min > 0.0 && self.eig_max >= self.eig_min) {
            return Err(Error::InvalidArgument("eigenvalue range must be positive".into()));
        }
        if !(self.v_bar <= self.beta && self.start_radius <= self.beta) {
            return Err(Error::InvalidArgument("drift and start radius must not exceed beta".into()));
        }
        if !self.varying_constraints && self.constraint_drift > 0.0 {
            return Err(Error::InvalidArgument("constraint drift needs varying constraints".into()));
        }
        Ok(())
    }

    pub fn generate(&self, seed: u64) -> Result<SyntheticInstance> {
        self.validate()?;
        let mut rng = seeded_rng(seed);
        let (n, p) = (self.n, self.p);
        let q = random_spd(&mut rng, n, self.eig_min, self.eig_max);
        let q_inv = {
            let lu = crate::linalg::Lu::factor(&q);
            let cols: Vec<Vec<f64>> = (0..n)
                .map(|j| {
                    let mut e = vec![0.0; n];
                    e[j] = 1.0;
                    lu.solve(&e)
                })
                .collect();
            Matrix::from_fn(n, n, |i, j| cols[j][i])
        };
        let a_base = random_full_rank(&mut rng, p, n);

        let mut x_star = random_vector(&mut rng, n);
        let fixed_nu = random_unit_vector(&mut rng, p.max(1));
        let mut rounds = Vec::with_capacity(self.horizon + 1);
        let mut optima = Vec::with_capacity(self.horizon + 1);
        let mut a_max: f64 = 0.0;
        let mut fixed: Option<AffineEqualityConstraint> = None;

        for t in 0..=self.horizon {
            if t > 0 {
                let step = random_unit_vector(&mut rng, n);
                let len = self.v_bar * rng.random_range(0.5..=1.0);
                if self.varying_constraints {
                    axpy(len, &step, &mut x_star);
                } else {
                    // Drift inside the fixed feasible set.
                    let basis = null_space_basis(&a_base)?;
                    if basis.cols() > 0 {
                        let dir = basis.mul_vec(&random_unit_vector(&mut rng, basis.cols()));
                        axpy(len, &dir, &mut x_star);
                    }
                }
            }
            let constraint = match (&fixed, self.varying_constraints) {
                (Some(c), false) => c.clone(),
                _ => {
                    let a = if self.constraint_drift > 0.0 && t > 0 {
                        loop {
                            let e = random_matrix(&mut rng, p, n).scaled(self.constraint_drift);
                            let cand = Matrix::from_fn(p, n, |i, j| a_base[(i, j)] + e[(i, j)]);
                            if HouseholderQr::factor(&cand.transpose()).rcond() > 1e-3 {
                                break cand;
                            }
                        }
                    } else {
                        a_base.clone()
                    };
                    let b = a.mul_vec(&x_star);
                    let c = AffineEqualityConstraint::new(a, b)?;
                    if !self.varying_constraints {
                        fixed = Some(c.clone());
                    }
                    c
                }
            };
            a_max = a_max.max(constraint.a().frobenius_norm());

            let nu: Vec<f64> = if p == 0 {
                Vec::new()
            } else if self.varying_constraints {
                let dir = random_unit_vector(&mut rng, p);
                let len = self.nu_bar * rng.random_range(0.0..=1.0);
                dir.iter().map(|v| v * len).collect()
            } else {
                fixed_nu.iter().map(|v| v * self.nu_bar).collect()
            };
            // c_t = x* + Q⁻¹ Aᵀ ν  ⇒  ∇f(x*) = −Aᵀν.
            let shift = q_inv.mul_vec(&constraint.a().tr_mul_vec(&nu));
            let center: Vec<f64> = x_star.iter().zip(&shift).map(|(x, s)| x + s).collect();
            let f = Quadratic::new(q.clone(), center, vec![0.0; n])?;
            let value = crate::objective::Objective::value(&f, &x_star);
            optima.push(RoundOptimum {
                x: x_star.clone(),
                nu,
                value,
            });
            rounds.push(RoundProblem::new(t, Arc::new(f), constraint)?);
        }

        let problems = ProblemSequence::new(rounds)?;
        let l = a_max * self.nu_bar + 0.5 * self.eig_max * self.beta;
        let constants = Constants::new(self.eig_min, self.beta, 0.0, l, self.v_bar, a_max)?;
        let x0 = start_near(&mut rng, &optima[0].x, problems.rounds()[0].constraint(), self.start_radius)?;
        Ok(SyntheticInstance {
            problems,
            optima,
            constants,
            x0,
        })
    }
}

/// Feasible point at distance exactly `radius` from `x_star` (or `x_star`
/// itself when the feasible set is a single point).
fn start_near<R: Rng + ?Sized>(
    rng: &mut R,
    x_star: &[f64],
    constraint: &AffineEqualityConstraint,
    radius: f64,
) -> Result<Vec<f64>> {
    let basis = null_space_basis(constraint.a())?;
    if basis.cols() == 0 || radius == 0.0 {
        return Ok(x_star.to_vec());
    }
    let dir = basis.mul_vec(&random_unit_vector(rng, basis.cols()));
    let mut x = x_star.to_vec();
    axpy(radius, &dir, &mut x);
    Ok(x)
}

/// Single round `f(x) = ½ (x − x*)ᵀ Q (x − x*) − ν*ᵀ A x + (μ/4) Σ (x_i − x*_i)⁴`
/// subject to `A x = A x*`. Its KKT pair is `(x*, ν*)`, `∇²f(x*) = Q`, and on
/// the ball of radius `β` the Hessian satisfies
/// `‖∇²f(x) − ∇²f(x*)‖ ≤ 3μβ ‖x − x*‖`.
#[derive(Debug, Clone)]
pub struct QuarticInstance {
    pub round: RoundProblem,
    pub x_star: Vec<f64>,
    pub nu_star: Vec<f64>,
    pub constants: Constants,
}

impl QuarticInstance {
    pub fn generate<R: Rng + ?Sized>(rng: &mut R, n: usize, p: usize, mu: f64, beta: f64) -> Result<Self> {
        if p >= n {
            return Err(Error::InvalidArgument("need p < n for a non-trivial feasible set".into()));
        }
        let eig_min = rng.random_range(0.5..=2.0);
        let eig_max = eig_min * rng.random_range(1.0..=5.0);
        let q = random_spd(rng, n, eig_min, eig_max);
        let a = random_full_rank(rng, p, n);
        let x_star = random_vector(rng, n);
        let nu_star = random_vector(rng, p);
        let linear: Vec<f64> = a.tr_mul_vec(&nu_star).iter().map(|v| -v).collect();
        let quad = Quadratic::new(q, x_star.clone(), linear)?;
        let f = QuarticRegularized::new(quad, mu, x_star.clone())?;
        let constraint = AffineEqualityConstraint::new(a.clone(), a.mul_vec(&x_star))?;
        let round = RoundProblem::new(0, Arc::new(f), constraint)?;
        let constants = Constants::new(eig_min, beta, 3.0 * mu * beta, 0.0, 0.0, a.frobenius_norm())?;
        Ok(Self {
            round,
            x_star,
            nu_star,
            constants,
        })
    }

    /// Feasible start at distance `radius` from `x*`.
    pub fn start<R: Rng + ?Sized>(&self, rng: &mut R, radius: f64) -> Result<Vec<f64>> {
        start_near(rng, &self.x_star, self.round.constraint(), radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::distance;
    use crate::online::{compute_optima, OptimumSolver};

    fn eigen_extremes(m: &Matrix) -> (f64, f64) {
        let n = m.rows();
        let nm = nalgebra::DMatrix::from_fn(n, n, |i, j| m[(i, j)]);
        let e = nm.symmetric_eigen().eigenvalues;
        (e.min(), e.max())
    }

    #[test]
    fn spd_spectrum_is_exact() {
        let mut rng = seeded_rng(1);
        let q = random_spd(&mut rng, 6, 0.7, 3.2);
        let (lo, hi) = eigen_extremes(&q);
        assert!((lo - 0.7).abs() < 1e-12 && (hi - 3.2).abs() < 1e-12);
    }

    #[test]
    fn quadratic_family_optima_are_kkt_points() {
        for varying in [false, true] {
            let fam = QuadraticFamily {
                horizon: 20,
                varying_constraints: varying,
                constraint_drift: if varying { 0.1 } else { 0.0 },
                ..QuadraticFamily::default()
            };
            let inst = fam.generate(3).unwrap();
            for (round, opt) in inst.problems.iter().zip(&inst.optima) {
                let g = round.objective().gradient(&opt.x);
                let atn = round.constraint().a().tr_mul_vec(&opt.nu);
                let stat: Vec<f64> = g.iter().zip(&atn).map(|(a, b)| a + b).collect();
                assert!(norm(&stat) < 1e-10);
                assert!(round.constraint().residual_norm(&opt.x) < 1e-12);
                assert!(norm(&opt.nu) <= fam.nu_bar + 1e-12);
            }
            for w in inst.optima.windows(2) {
                assert!(distance(&w[0].x, &w[1].x) <= fam.v_bar + 1e-12);
            }
            // The numerical solver agrees with the constructed optima.
            let solved = compute_optima(&inst.problems, &inst.x0, &OptimumSolver::default()).unwrap();
            for (s, o) in solved.iter().zip(&inst.optima) {
                assert!(distance(&s.x, &o.x) < 1e-8);
            }
            assert!((distance(&inst.x0, &inst.optima[0].x) - fam.start_radius).abs() < 1e-12);
            assert!(inst.problems.rounds()[0].constraint().residual_norm(&inst.x0) < 1e-12);
            assert_eq!(inst.problems.first_constraint_change().is_some(), varying);
        }
    }

    #[test]
    fn quadratic_family_loss_lipschitz_holds_on_ball() {
        let fam = QuadraticFamily {
            horizon: 5,
            varying_constraints: true,
            constraint_drift: 0.2,
            ..QuadraticFamily::default()
        };
        let inst = fam.generate(9).unwrap();
        let l = inst.constants.loss_lipschitz();
        let mut rng = seeded_rng(99);
        for (round, opt) in inst.problems.iter().zip(&inst.optima) {
            for _ in 0..50 {
                let d = random_unit_vector(&mut rng, fam.n);
                let r = fam.beta * rng.random_range(0.0..=1.0);
                let x: Vec<f64> = opt.x.iter().zip(&d).map(|(a, b)| a + r * b).collect();
                let diff = (round.objective().value(&x) - opt.value).abs();
                assert!(diff <= l * r + 1e-12);
            }
            assert!(round.constraint().a().spectral_norm() <= inst.constants.a() + 1e-12);
        }
    }

    #[test]
    fn quartic_instance_kkt_and_lipschitz() {
        let mut rng = seeded_rng(4);
        let inst = QuarticInstance::generate(&mut rng, 6, 2, 0.8, 0.5).unwrap();
        let f = inst.round.objective();
        let g = f.gradient(&inst.x_star);
        let atn = inst.round.constraint().a().tr_mul_vec(&inst.nu_star);
        assert!(g.iter().zip(&atn).all(|(a, b)| (a + b).abs() < 1e-12));
        let h0 = f.hessian(&inst.x_star);
        let l = inst.constants.hessian_lipschitz();
        for _ in 0..50 {
            let r = 0.5 * rng.random_range(0.0..=1.0);
            let x = inst.start(&mut rng, r).unwrap();
            let h = f.hessian(&x);
            let diff = Matrix::from_fn(6, 6, |i, j| h[(i, j)] - h0[(i, j)]);
            let (lo, hi) = eigen_extremes(&diff);
            assert!(lo.abs().max(hi.abs()) <= l * r + 1e-12);
        }
    }
}
