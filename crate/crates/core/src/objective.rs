//! Round loss functions exposing value, gradient and Hessian.

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

/// A twice-differentiable round loss `f_t : Rⁿ → R`.
pub trait Objective: Debug + Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    /// Symmetric `n x n` Hessian.
    fn hessian(&self, x: &[f64]) -> Matrix;
}

/// `f(x) = ½ (x − c)ᵀ Q (x − c) + gᵀ x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic {
    q: Matrix,
    center: Vec<f64>,
    linear: Vec<f64>,
}

impl Quadratic {
    pub fn new(q: Matrix, center: Vec<f64>, linear: Vec<f64>) -> Result<Self> {
        let n = center.len();
        if q.rows() != n || q.cols() != n || linear.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "quadratic with Q {}x{}, center {}, linear {}",
                q.rows(),
                q.cols(),
                n,
                linear.len()
            )));
        }
        if !q.is_symmetric(1e-12) {
            return Err(Error::InvalidArgument("Q must be symmetric".into()));
        }
        Ok(Self { q, center, linear })
    }

    /// `½ ‖x‖²`
    pub fn half_norm_squared(n: usize) -> Self {
        Self {
            q: Matrix::identity(n),
            center: vec![0.0; n],
            linear: vec![0.0; n],
        }
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let d: Vec<f64> = x.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        0.5 * dot(&d, &self.q.mul_vec(&d)) + dot(&self.linear, x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let d: Vec<f64> = x.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        self.q
            .mul_vec(&d)
            .iter()
            .zip(&self.linear)
            .map(|(a, b)| a + b)
            .collect()
    }

    fn hessian(&self, _x: &[f64]) -> Matrix {
        self.q.clone()
    }
}

/// Quadratic plus a separable quartic `(μ/4) Σ (x_i − a_i)⁴` anchored at `a`.
///
/// The Hessian is `Q + 3μ diag((x − a)²)`, so within a ball of radius `r`
/// around `a` it changes by at most `3μ r ‖x − a‖` in spectral norm.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarticRegularized {
    quadratic: Quadratic,
    mu: f64,
    anchor: Vec<f64>,
}

impl QuarticRegularized {
    pub fn new(quadratic: Quadratic, mu: f64, anchor: Vec<f64>) -> Result<Self> {
        if anchor.len() != quadratic.dim() {
            return Err(Error::DimensionMismatch("quartic anchor".into()));
        }
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(Error::InvalidArgument(format!("quartic weight {mu}")));
        }
        Ok(Self {
            quadratic,
            mu,
            anchor,
        })
    }
}

impl Objective for QuarticRegularized {
    fn dim(&self) -> usize {
        self.anchor.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let quartic: f64 = x
            .iter()
            .zip(&self.anchor)
            .map(|(xi, ai)| (xi - ai).powi(4))
            .sum();
        self.quadratic.value(x) + 0.25 * self.mu * quartic
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.quadratic.gradient(x);
        for ((gi, xi), ai) in g.iter_mut().zip(x).zip(&self.anchor) {
            *gi += self.mu * (xi - ai).powi(3);
        }
        g
    }

    fn hessian(&self, x: &[f64]) -> Matrix {
        let mut h = self.quadratic.hessian(x);
        for (i, (xi, ai)) in x.iter().zip(&self.anchor).enumerate() {
            h[(i, i)] += 3.0 * self.mu * (xi - ai).powi(2);
        }
        h
    }
}
