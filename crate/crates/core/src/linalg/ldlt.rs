//! Symmetric indefinite `P M Pᵀ = L D Lᵀ` factorization with Bunch–Kaufman
//! pivoting, preceded by symmetric Ruiz equilibration.

use super::matrix::{dot, Matrix};

/// Bunch–Kaufman growth threshold `(1 + √17) / 8`.
const ALPHA: f64 = 0.640_388_203_202_208_4;
const RUIZ_SWEEPS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Pivot {
    One(f64),
    /// 2x2 block `[[d11, d21], [d21, d22]]` starting at this index.
    Two(f64, f64, f64),
}

/// Factorization of `S M S` where `S` is the diagonal equilibration.
#[derive(Debug, Clone)]
pub struct Ldlt {
    n: usize,
    scale: Vec<f64>,
    perm: Vec<usize>,
    lower: Matrix,
    pivots: Vec<Option<Pivot>>,
    rcond: f64,
}

/// Diagonal `s` such that every row of `diag(s) M diag(s)` has max-abs close to one.
fn ruiz_scaling(m: &Matrix) -> Vec<f64> {
    let n = m.rows();
    let mut s = vec![1.0; n];
    for _ in 0..RUIZ_SWEEPS {
        let mut done = true;
        let row_max: Vec<f64> = (0..n)
            .map(|i| (0..n).fold(0.0f64, |acc, j| acc.max((s[i] * m[(i, j)] * s[j]).abs())))
            .collect();
        for (si, &r) in s.iter_mut().zip(&row_max) {
            if r > 0.0 && r.is_finite() {
                if (r - 1.0).abs() > 1e-3 {
                    done = false;
                }
                *si /= r.sqrt();
            }
        }
        if done {
            break;
        }
    }
    s
}

fn block_eigen_abs(p: Pivot) -> (f64, f64) {
    match p {
        Pivot::One(d) => (d.abs(), d.abs()),
        Pivot::Two(a, b, c) => {
            let mean = 0.5 * (a + c);
            let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
            let (e1, e2) = ((mean - rad).abs(), (mean + rad).abs());
            (e1.min(e2), e1.max(e2))
        }
    }
}

impl Ldlt {
    /// Factorizes a symmetric matrix. Only the lower triangle is read.
    ///
    /// Never fails; a zero pivot yields `rcond() == 0`.
    pub fn factor(m: &Matrix) -> Self {
        assert_eq!(m.rows(), m.cols(), "LDLT needs a square matrix");
        let n = m.rows();
        let scale = ruiz_scaling(m);
        let mut a = Matrix::from_fn(n, n, |i, j| {
            let (r, c) = if i >= j { (i, j) } else { (j, i) };
            scale[r] * m[(r, c)] * scale[c]
        });
        let mut lower = Matrix::identity(n);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut pivots = vec![None; n];
        let mut singular = false;

        let swap = |a: &mut Matrix, lower: &mut Matrix, perm: &mut Vec<usize>, k: usize, i: usize, j: usize| {
            if i == j {
                return;
            }
            a.swap_rows(i, j);
            for r in 0..n {
                let t = a[(r, i)];
                a[(r, i)] = a[(r, j)];
                a[(r, j)] = t;
            }
            for c in 0..k {
                let t = lower[(i, c)];
                lower[(i, c)] = lower[(j, c)];
                lower[(j, c)] = t;
            }
            perm.swap(i, j);
        };

        let mut k = 0;
        while k < n {
            let absakk = a[(k, k)].abs();
            let (imax, colmax) = ((k + 1)..n)
                .map(|i| (i, a[(i, k)].abs()))
                .fold((k, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });

            if absakk.max(colmax) == 0.0 {
                // Column already eliminated; zero pivot.
                singular = true;
                pivots[k] = Some(Pivot::One(0.0));
                k += 1;
                continue;
            }

            let two_by_two = if absakk >= ALPHA * colmax {
                false
            } else {
                let rowmax = (k..n)
                    .filter(|&j| j != imax)
                    .fold(0.0f64, |acc, j| acc.max(a[(imax, j)].abs()));
                if absakk * rowmax >= ALPHA * colmax * colmax {
                    false
                } else if a[(imax, imax)].abs() >= ALPHA * rowmax {
                    swap(&mut a, &mut lower, &mut perm, k, k, imax);
                    false
                } else {
                    swap(&mut a, &mut lower, &mut perm, k, k + 1, imax);
                    true
                }
            };

            if !two_by_two {
                let d = a[(k, k)];
                pivots[k] = Some(Pivot::One(d));
                for i in (k + 1)..n {
                    lower[(i, k)] = a[(i, k)] / d;
                }
                for i in (k + 1)..n {
                    let lik = lower[(i, k)];
                    if lik == 0.0 {
                        continue;
                    }
                    for j in (k + 1)..=i {
                        a[(i, j)] -= lik * a[(j, k)];
                        a[(j, i)] = a[(i, j)];
                    }
                }
                k += 1;
            } else {
                let (d11, d21, d22) = (a[(k, k)], a[(k + 1, k)], a[(k + 1, k + 1)]);
                let det = d11 * d22 - d21 * d21;
                pivots[k] = Some(Pivot::Two(d11, d21, d22));
                for i in (k + 2)..n {
                    let (b1, b2) = (a[(i, k)], a[(i, k + 1)]);
                    lower[(i, k)] = (d22 * b1 - d21 * b2) / det;
                    lower[(i, k + 1)] = (d11 * b2 - d21 * b1) / det;
                }
                for i in (k + 2)..n {
                    let (l1, l2) = (lower[(i, k)], lower[(i, k + 1)]);
                    for j in (k + 2)..=i {
                        a[(i, j)] -= l1 * a[(j, k)] + l2 * a[(j, k + 1)];
                        a[(j, i)] = a[(i, j)];
                    }
                }
                k += 2;
            }
        }

        let (mut emin, mut emax) = (f64::INFINITY, 0.0f64);
        for p in pivots.iter().flatten() {
            let (lo, hi) = block_eigen_abs(*p);
            emin = emin.min(lo);
            emax = emax.max(hi);
        }
        let rcond = if singular || n == 0 || !emin.is_finite() {
            if n == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            emin / emax.max(1.0)
        };

        Self {
            n,
            scale,
            perm,
            lower,
            pivots,
            rcond,
        }
    }

    /// Reciprocal condition estimate of the equilibrated matrix from the `D` blocks.
    pub fn rcond(&self) -> f64 {
        self.rcond
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(rhs.len(), n);
        // y = P S rhs
        let mut y: Vec<f64> = self.perm.iter().map(|&p| self.scale[p] * rhs[p]).collect();
        for i in 0..n {
            let s = dot(&self.lower.row(i)[..i], &y[..i]);
            y[i] -= s;
        }
        let mut k = 0;
        while k < n {
            match self.pivots[k].expect("pivot recorded") {
                Pivot::One(d) => {
                    y[k] /= d;
                    k += 1;
                }
                Pivot::Two(a, b, c) => {
                    let det = a * c - b * b;
                    let (y1, y2) = (y[k], y[k + 1]);
                    y[k] = (c * y1 - b * y2) / det;
                    y[k + 1] = (a * y2 - b * y1) / det;
                    k += 2;
                }
            }
        }
        for i in (0..n).rev() {
            let mut s = 0.0;
            for j in (i + 1)..n {
                s += self.lower[(j, i)] * y[j];
            }
            y[i] -= s;
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = self.scale[p] * y[i];
        }
        x
    }

    /// Counts of (1x1, 2x2) pivot blocks.
    pub fn pivot_counts(&self) -> (usize, usize) {
        self.pivots.iter().flatten().fold((0, 0), |(o, t), p| match p {
            Pivot::One(_) => (o + 1, t),
            Pivot::Two(..) => (o, t + 1),
        })
    }
}
