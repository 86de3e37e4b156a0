use crate::linalg::Matrix;
use crate::objective::Objective;

/// Separable arc cost `Σ α_i·exp(β_i·s_ε(x_i))` with the smoothed absolute
/// value `s_ε(x) = √(x² + ε²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkCost {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    epsilon: f64,
}

impl NetworkCost {
    /// Panics if the parameter vectors differ in length or `epsilon ≤ 0`.
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, epsilon: f64) -> Self {
        assert_eq!(alpha.len(), beta.len(), "alpha and beta lengths differ");
        assert!(epsilon > 0.0, "epsilon must be positive");
        Self {
            alpha,
            beta,
            epsilon,
        }
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn smooth_abs(&self, x: f64) -> f64 {
        x.hypot(self.epsilon)
    }

    /// Upper bound on the third derivative of arc `i`'s term over the ball
    /// `|y − x| ≤ radius`, using `|s'| ≤ 1`, `s'' = ε²/s³`, `|s'''| ≤ 3ε²/s⁴`.
    pub fn third_derivative_bound(&self, i: usize, x: f64, radius: f64) -> f64 {
        let (a, b, e) = (self.alpha[i], self.beta[i], self.epsilon);
        let s_max = self.smooth_abs(x.abs() + radius);
        let s_min = self.smooth_abs((x.abs() - radius).max(0.0));
        let e2 = e * e;
        a * (b * s_max).exp() * (b.powi(3) + 3.0 * b * b * e2 / s_min.powi(3) + 3.0 * b * e2 / s_min.powi(4))
    }

    /// Second derivative of arc `i`'s term at `x`.
    pub fn arc_curvature(&self, i: usize, x: f64) -> f64 {
        let s = self.smooth_abs(x);
        let (a, b) = (self.alpha[i], self.beta[i]);
        let r = x / s;
        a * (b * s).exp() * (b * b * r * r + b * self.epsilon * self.epsilon / (s * s * s))
    }
}

impl Objective for NetworkCost {
    fn dim(&self) -> usize {
        self.alpha.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        x.iter()
            .enumerate()
            .map(|(i, &xi)| self.alpha[i] * (self.beta[i] * self.smooth_abs(xi)).exp())
            .sum()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, &xi)| {
                let s = self.smooth_abs(xi);
                self.alpha[i] * self.beta[i] * (self.beta[i] * s).exp() * xi / s
            })
            .collect()
    }

    fn hessian(&self, x: &[f64]) -> Matrix {
        let d: Vec<f64> = (0..x.len()).map(|i| self.arc_curvature(i, x[i])).collect();
        Matrix::diagonal(&d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::fd;

    #[test]
    fn gradient_vanishes_at_zero() {
        let f = NetworkCost::new(vec![3.0], vec![2.5], 1e-3);
        assert_eq!(f.gradient(&[0.0]), vec![0.0]);
        // value at zero is α·exp(β·ε)
        assert!((f.value(&[0.0]) - 3.0 * (2.5e-3f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let f = NetworkCost::new(vec![1.5, 2.0, 1.0], vec![2.0, 3.0, 2.2], 0.1);
        let x = [0.7, -1.1, 0.3];
        let g = f.gradient(&x);
        let g_fd = fd::gradient(&f, &x, 1e-6);
        for i in 0..3 {
            assert!((g[i] - g_fd[i]).abs() < 1e-6 * (1.0 + g[i].abs()));
        }
        let h = f.hessian(&x);
        for i in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += 1e-6;
            xm[i] -= 1e-6;
            let d = (f.gradient(&xp)[i] - f.gradient(&xm)[i]) / 2e-6;
            assert!((h[(i, i)] - d).abs() < 1e-5 * (1.0 + d.abs()));
            for j in 0..3 {
                if i != j {
                    assert_eq!(h[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn third_derivative_bound_dominates() {
        let f = NetworkCost::new(vec![1.3, 2.0], vec![2.5, 4.0], 1e-2);
        for i in 0..2 {
            for &x in &[-1.0, -0.01, 0.0, 0.02, 0.8] {
                let bound = f.third_derivative_bound(i, x, 0.3);
                for k in 0..=60 {
                    let y = x - 0.3 + 0.6 * k as f64 / 60.0;
                    let d3 = (f.arc_curvature(i, y + 1e-7) - f.arc_curvature(i, y - 1e-7)) / 2e-7;
                    assert!(d3.abs() <= bound * (1.0 + 1e-4), "i={i} x={x} y={y}");
                }
            }
        }
    }

    #[test]
    fn curvature_positive_everywhere() {
        let f = NetworkCost::new(vec![1.0], vec![2.0], 1e-3);
        for &x in &[-5.0, -1e-4, 0.0, 1e-4, 5.0] {
            assert!(f.arc_curvature(0, x) > 0.0);
        }
    }
}
