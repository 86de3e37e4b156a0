//! Householder QR with an explicitly accumulated square `Q`.

use super::matrix::{dot, norm, Matrix};

#[derive(Debug, Clone)]
pub struct HouseholderQr {
    /// Full `m x m` orthogonal factor.
    q: Matrix,
    /// Diagonal of `R`, length `min(m, n)`.
    r_diag: Vec<f64>,
}

impl HouseholderQr {
    pub fn factor(m: &Matrix) -> Self {
        let (rows, cols) = (m.rows(), m.cols());
        let mut r = m.clone();
        let mut q = Matrix::identity(rows);
        let steps = rows.min(cols);
        let mut r_diag = Vec::with_capacity(steps);

        for k in 0..steps {
            let x: Vec<f64> = (k..rows).map(|i| r[(i, k)]).collect();
            let alpha = norm(&x);
            if alpha == 0.0 {
                r_diag.push(0.0);
                continue;
            }
            let sign = if x[0] >= 0.0 { 1.0 } else { -1.0 };
            let mut v = x;
            v[0] += sign * alpha;
            let vnorm = norm(&v);
            v.iter_mut().for_each(|e| *e /= vnorm);

            // R <- (I - 2 v vᵀ) R on rows k..
            for j in k..cols {
                let col: Vec<f64> = (k..rows).map(|i| r[(i, j)]).collect();
                let s = 2.0 * dot(&v, &col);
                for (off, vi) in v.iter().enumerate() {
                    r[(k + off, j)] -= s * vi;
                }
            }
            // Q <- Q (I - 2 v vᵀ) on columns k..
            for i in 0..rows {
                let s = 2.0 * (0..v.len()).map(|off| q[(i, k + off)] * v[off]).sum::<f64>();
                for (off, vi) in v.iter().enumerate() {
                    q[(i, k + off)] -= s * vi;
                }
            }
            r_diag.push(r[(k, k)]);
        }
        Self { q, r_diag }
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn r_diag(&self) -> &[f64] {
        &self.r_diag
    }

    /// `min |r_ii| / max |r_ii|`.
    pub fn rcond(&self) -> f64 {
        if self.r_diag.is_empty() {
            return 1.0;
        }
        let (lo, hi) = self
            .r_diag
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d.abs()), hi.max(d.abs())));
        if hi == 0.0 {
            0.0
        } else {
            lo / hi
        }
    }
}
