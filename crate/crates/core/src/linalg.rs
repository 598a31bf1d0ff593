//! Small dense and banded Cholesky factorizations.
//!
//! Matrices are row-major `Vec<f64>`. Only the pieces the posterior and the
//! noise generator need are here: factor, forward solve, log-determinant,
//! and lower-triangular multiply.

use crate::error::{Error, Result};

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                data.push(f(a, b));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.n + b]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, v: f64) {
        self.data[a * self.n + b] = v;
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|a| (0..a).all(|b| self.get(a, b) == self.get(b, a)))
    }
}

/// Lower-triangular Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    /// Fails with the 1-based order of the first non-positive leading minor.
    pub fn factor(a: &Matrix) -> Result<Self> {
        let n = a.dim();
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = a.get(i, j);
                for p in 0..j {
                    s -= l[i * n + p] * l[j * n + p];
                }
                if i == j {
                    if !s.is_finite() || s <= 0.0 {
                        return Err(Error::NotPositiveDefinite { minor: i + 1 });
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(Self { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.l[a * self.n + b]
    }

    /// Solves `L y = b` in place.
    pub fn solve_lower_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s: f64 = row.iter().zip(&b[..i]).map(|(l, y)| l * y).sum();
            b[i] = (b[i] - s) / self.l[i * n + i];
        }
    }

    /// `log det A = 2 Σ log L_ii`.
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.n)
            .map(|i| self.l[i * self.n + i].ln())
            .sum::<f64>()
    }

    pub fn mul_lower(&self, z: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                self.l[i * n..=i * n + i]
                    .iter()
                    .zip(z)
                    .map(|(l, z)| l * z)
                    .sum()
            })
            .collect()
    }
}

/// Cholesky factor of a symmetric banded matrix with lower bandwidth `bw`.
///
/// The factor of a banded matrix has the same bandwidth, so row `i` stores
/// only columns `i - bw ..= i`. Cost is `O(n bw²)`.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    // row i, column j (i - bw <= j <= i) at rows[i * (bw + 1) + (j + bw - i)]
    rows: Vec<f64>,
}

impl BandedCholesky {
    /// Factors the `n × n` Toeplitz matrix with first column `acov`
    /// (entries past the end of `acov` are zero).
    pub fn toeplitz(acov: &[f64], n: usize) -> Result<Self> {
        let bw = acov.len().saturating_sub(1).min(n.saturating_sub(1));
        let w = bw + 1;
        let mut rows = vec![0.0; n * w];
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let mut s = acov[i - j];
                let plo = lo.max(j.saturating_sub(bw));
                for p in plo..j {
                    s -= rows[i * w + (p + bw - i)] * rows[j * w + (p + bw - j)];
                }
                if i == j {
                    if !s.is_finite() || s <= 0.0 {
                        return Err(Error::NotPositiveDefinite { minor: i + 1 });
                    }
                    rows[i * w + bw] = s.sqrt();
                } else {
                    rows[i * w + (j + bw - i)] = s / rows[j * w + bw];
                }
            }
        }
        Ok(Self { n, bw, rows })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        if b > a || a - b > self.bw {
            0.0
        } else {
            self.rows[a * (self.bw + 1) + (b + self.bw - a)]
        }
    }

    pub fn mul_lower(&self, z: &[f64]) -> Vec<f64> {
        let w = self.bw + 1;
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.bw);
                (lo..=i)
                    .map(|j| self.rows[i * w + (j + self.bw - i)] * z[j])
                    .sum()
            })
            .collect()
    }
}

/// `log Σ exp(v)`; `-inf` for an empty slice.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toeplitz(acov: &[f64], n: usize) -> Matrix {
        Matrix::from_fn(n, |a, b| acov.get(a.abs_diff(b)).copied().unwrap_or(0.0))
    }

    #[test]
    fn hand_two_by_two() {
        let c = Cholesky::factor(&toeplitz(&[1.0, 0.5], 2)).unwrap();
        assert_eq!(c.get(0, 0), 1.0);
        assert_eq!(c.get(1, 0), 0.5);
        assert!((c.get(1, 1) - 0.75f64.sqrt()).abs() < 1e-15);
        assert_eq!(c.mul_lower(&[1.0, 0.0]), vec![1.0, 0.5]);
    }

    #[test]
    fn reports_failing_minor() {
        // leading 2x2 minor 1 - 1.2^2 < 0
        let err = Cholesky::factor(&toeplitz(&[1.0, 1.2], 3)).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { minor: 2 }));
        let err = BandedCholesky::toeplitz(&[1.0, 1.2], 3).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { minor: 2 }));
    }

    #[test]
    fn banded_matches_dense() {
        let acov = [1.0, 0.6, 0.4, 0.2, 0.1];
        let n = 12;
        let dense = Cholesky::factor(&toeplitz(&acov, n)).unwrap();
        let banded = BandedCholesky::toeplitz(&acov, n).unwrap();
        for a in 0..n {
            for b in 0..n {
                assert!(
                    (dense.get(a, b) - banded.get(a, b)).abs() < 1e-13,
                    "({a},{b})"
                );
            }
        }
        let z: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
        for (x, y) in dense.mul_lower(&z).iter().zip(banded.mul_lower(&z)) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn banded_short_matrix() {
        // more lags than rows
        let b = BandedCholesky::toeplitz(&[1.0, 0.6, 0.4, 0.2, 0.1], 2).unwrap();
        assert_eq!(b.get(0, 0), 1.0);
        assert!((b.get(1, 0) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn solve_and_log_det() {
        let a = Matrix::from_fn(3, |i, j| {
            [[4.0, 2.0, 0.4], [2.0, 3.0, 0.5], [0.4, 0.5, 2.0]][i][j]
        });
        let c = Cholesky::factor(&a).unwrap();
        // det by cofactor expansion
        let det = 4.0 * (3.0 * 2.0 - 0.25) - 2.0 * (2.0 * 2.0 - 0.5 * 0.4)
            + 0.4 * (2.0 * 0.5 - 3.0 * 0.4);
        assert!((c.log_det() - f64::ln(det)).abs() < 1e-13);
        let mut y = vec![1.0, -2.0, 0.5];
        c.solve_lower_in_place(&mut y);
        let back = c.mul_lower(&y);
        for (u, v) in back.iter().zip([1.0, -2.0, 0.5]) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn log_sum_exp_handles_extremes() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert!((log_sum_exp(&[-1e4, -1e4]) - (-1e4 + 2f64.ln())).abs() < 1e-9);
        assert!((log_sum_exp(&[0.0, f64::NEG_INFINITY]) - 0.0).abs() < 1e-15);
    }
}
