use super::matrix::{dot, Matrix};

/// `M = L Lᵀ` for symmetric positive definite `M`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    lower: Matrix,
}

impl Cholesky {
    /// Returns `None` when a non-positive pivot appears.
    pub fn factor(m: &Matrix) -> Option<Self> {
        let n = m.rows();
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let s = m[(j, j)] - dot(&l.row(j)[..j], &l.row(j)[..j]);
            if !(s > 0.0) || !s.is_finite() {
                return None;
            }
            let d = s.sqrt();
            l[(j, j)] = d;
            for i in (j + 1)..n {
                let s = m[(i, j)] - dot(&l.row(i)[..j], &l.row(j)[..j]);
                l[(i, j)] = s / d;
            }
        }
        Some(Self { lower: l })
    }

    /// `(min l_ii / max l_ii)²`, an estimate of `1 / cond(M)`.
    pub fn rcond(&self) -> f64 {
        let n = self.lower.rows();
        if n == 0 {
            return 1.0;
        }
        let (lo, hi) = (0..n)
            .map(|i| self.lower[(i, i)])
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d), hi.max(d)));
        (lo / hi).powi(2)
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lower.rows();
        let l = &self.lower;
        let mut y = b.to_vec();
        for i in 0..n {
            y[i] = (y[i] - dot(&l.row(i)[..i], &y[..i])) / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in (i + 1)..n {
                s -= l[(j, i)] * y[j];
            }
            y[i] = s / l[(i, i)];
        }
        y
    }
}

/// LU with partial pivoting, for general square systems.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    rcond: f64,
}

impl Lu {
    pub fn factor(m: &Matrix) -> Self {
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = m.max_abs();
        let mut min_piv = f64::INFINITY;
        let mut max_piv = 0.0f64;
        for k in 0..n {
            let (p, pv) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |b, c| if c.1 > b.1 { c } else { b });
            lu.swap_rows(k, p);
            perm.swap(k, p);
            min_piv = min_piv.min(pv);
            max_piv = max_piv.max(pv);
            if pv == 0.0 {
                continue;
            }
            let d = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                for j in (k + 1)..n {
                    lu[(i, j)] -= f * lu[(k, j)];
                }
            }
        }
        let rcond = if n == 0 {
            1.0
        } else if scale == 0.0 {
            0.0
        } else {
            min_piv / max_piv.max(scale)
        };
        Self { lu, perm, rcond }
    }

    pub fn rcond(&self) -> f64 {
        self.rcond
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows();
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            y[i] -= dot(&self.lu.row(i)[..i], &y[..i]);
        }
        for i in (0..n).rev() {
            let s = dot(&self.lu.row(i)[i + 1..], &y[i + 1..]);
            y[i] = (y[i] - s) / self.lu[(i, i)];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(Cholesky::factor(&m).is_none());
    }

    #[test]
    fn cholesky_and_lu_agree() {
        let m = Matrix::from_rows(&[vec![4.0, 1.0, 0.5], vec![1.0, 3.0, 0.2], vec![0.5, 0.2, 2.0]])
            .unwrap();
        let b = [1.0, 2.0, 3.0];
        let x1 = Cholesky::factor(&m).unwrap().solve(&b);
        let x2 = Lu::factor(&m).solve(&b);
        for (a, c) in x1.iter().zip(&x2) {
            assert!((a - c).abs() < 1e-14);
        }
    }

    #[test]
    fn lu_flags_singular() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(Lu::factor(&m).rcond() < 1e-15);
    }
}
