//! Dense vectors and matrices sized for small systems, with an LU solver.
//!
//! Vectors are plain `&[f64]` slices; the helpers here provide the Euclidean
//! inner product and norm used throughout. Matrices are dense row-major with
//! an LU factorization (partial pivoting) that reports near-singularity
//! instead of dividing by a tiny pivot.

use crate::error::{Error, Result};

/// Relative pivot threshold: a pivot with magnitude at or below
/// `SINGULARITY_THRESHOLD * max column norm` declares the matrix singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e-14;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm.
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| s * x).collect()
}

/// `a + s * b`.
pub fn add_scaled(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data. NaN or infinite entries are
    /// construction errors.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if !all_finite(&data) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| dot(&self.data[i * self.cols..(i + 1) * self.cols], x))
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    /// Largest Euclidean column norm. Used as the scale for the pivot
    /// threshold.
    pub fn max_column_norm(&self) -> f64 {
        (0..self.cols)
            .map(|j| {
                (0..self.rows)
                    .map(|i| self.get(i, j).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Operator norm induced by the Euclidean norm, estimated by power
    /// iteration on `A^T A`. Diagnostic use only.
    pub fn induced_norm(&self) -> f64 {
        let n = self.cols;
        if n == 0 || self.rows == 0 {
            return 0.0;
        }
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        let mut sigma = 0.0;
        for _ in 0..50 {
            let av = self.mul_vec(&v);
            // w = A^T (A v)
            let mut w = vec![0.0; n];
            for i in 0..self.rows {
                for (j, wj) in w.iter_mut().enumerate() {
                    *wj += self.get(i, j) * av[i];
                }
            }
            let wn = norm(&w);
            if wn == 0.0 {
                return 0.0;
            }
            v = scale(&w, 1.0 / wn);
            sigma = norm(&self.mul_vec(&v));
        }
        sigma
    }

    /// Determinant via LU factorization without a singularity threshold;
    /// an exactly zero pivot yields 0.
    pub fn det(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "determinant needs a square matrix");
        let n = self.rows;
        let mut lu = self.data.clone();
        let mut sign = 1.0;
        for k in 0..n {
            let mut p = k;
            for i in (k + 1)..n {
                if lu[i * n + k].abs() > lu[p * n + k].abs() {
                    p = i;
                }
            }
            if lu[p * n + k] == 0.0 {
                return 0.0;
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                sign = -sign;
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let factor = lu[i * n + k] / pivot;
                for j in (k + 1)..n {
                    lu[i * n + j] -= factor * lu[k * n + j];
                }
            }
        }
        (0..n).map(|k| lu[k * n + k]).product::<f64>() * sign
    }
}

/// LU factorization with partial pivoting.
///
/// The factorization is the numerically sound way to apply `A^{-1}` without
/// forming the inverse. A pivot at or below `SINGULARITY_THRESHOLD` times the
/// largest initial column norm aborts with `SingularMatrix`.
#[derive(Debug, Clone)]
pub struct LuDecomposition {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl LuDecomposition {
    pub fn factor(a: &Matrix) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                actual: a.cols(),
            });
        }
        let n = a.rows();
        let threshold = SINGULARITY_THRESHOLD * a.max_column_norm();
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let mut p = k;
            for i in (k + 1)..n {
                if lu[i * n + k].abs() > lu[p * n + k].abs() {
                    p = i;
                }
            }
            let pivot = lu[p * n + k].abs();
            if pivot <= threshold {
                return Err(Error::SingularMatrix { pivot, threshold });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pk = lu[k * n + k];
            for i in (k + 1)..n {
                let factor = lu[i * n + k] / pk;
                lu[i * n + k] = factor;
                for j in (k + 1)..n {
                    lu[i * n + j] -= factor * lu[k * n + j];
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A y = b` by forward/back substitution on the stored factors.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: b.len(),
            });
        }
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for j in 0..i {
                y[i] -= self.lu[i * n + j] * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                y[i] -= self.lu[i * n + j] * y[j];
            }
            y[i] /= self.lu[i * n + i];
        }
        if !all_finite(&y) {
            return Err(Error::NonFinite);
        }
        Ok(y)
    }
}

/// Solves `A y = b` by LU factorization with partial pivoting.
pub fn solve_linear(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    LuDecomposition::factor(a)?.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_identity() {
        let a = Matrix::identity(2);
        let y = solve_linear(&a, &[3.0, 4.0]).unwrap();
        assert_eq!(y, vec![3.0, 4.0]);
    }

    #[test]
    fn solve_permutation() {
        let a = Matrix::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let y = solve_linear(&a, &[1.0, 2.0]).unwrap();
        assert_eq!(y, vec![2.0, 1.0]);
    }

    #[test]
    fn rank_deficient_is_singular() {
        let a = Matrix::new(2, 2, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        for b in [[0.0, 0.0], [1.0, 2.0], [-3.0, 5.5]] {
            match solve_linear(&a, &b) {
                Err(Error::SingularMatrix { .. }) => {}
                other => panic!("expected SingularMatrix, got {other:?}"),
            }
        }
    }

    #[test]
    fn zero_matrix_is_singular() {
        let a = Matrix::zeros(3, 3);
        assert!(matches!(
            solve_linear(&a, &[1.0, 1.0, 1.0]),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn non_finite_entries_rejected_at_construction() {
        assert!(matches!(
            Matrix::new(2, 2, vec![1.0, f64::NAN, 0.0, 1.0]),
            Err(Error::NonFinite)
        ));
        assert!(matches!(
            Matrix::new(1, 2, vec![f64::INFINITY, 0.0]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn solve_residual_is_tiny() {
        // Backward error of LU with partial pivoting on a well-conditioned
        // system sits near machine precision, far below the 1e-12 contract.
        let a = Matrix::new(3, 3, vec![4.0, -2.0, 1.0, 3.0, 6.0, -4.0, 2.0, 1.0, 8.0]).unwrap();
        let b = [1.0, -2.0, 3.5];
        let y = solve_linear(&a, &b).unwrap();
        let r = sub(&a.mul_vec(&y), &b);
        let rel = norm(&r) / (a.induced_norm() * norm(&y) + norm(&b));
        assert!(rel <= 1e-12, "relative residual {rel:e}");
    }

    #[test]
    fn determinant_2x2() {
        let a = Matrix::new(2, 2, vec![-4.0, 1.0, -2.0, -2.0]).unwrap();
        assert!((a.det() - 10.0).abs() < 1e-12);
        let s = Matrix::new(2, 2, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(s.det(), 0.0);
    }

    #[test]
    fn induced_norm_of_diagonal() {
        let a = Matrix::new(2, 2, vec![3.0, 0.0, 0.0, -7.0]).unwrap();
        assert!((a.induced_norm() - 7.0).abs() < 1e-9);
    }
}
