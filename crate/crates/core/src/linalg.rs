//! Symmetric positive-definite factorization with a reproducible diagonal
//! shrinkage ladder.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shrinkage intensities tried, in order, when a plain factorization fails.
pub const SHRINKAGE_LADDER: [f64; 3] = [1e-10, 1e-8, 1e-6];

/// A pivot counts as non-positive when it is below this fraction of the
/// matching diagonal entry. Exact rank deficiency leaves round-off sized
/// pivots that are positive but meaningless.
const RELATIVE_PIVOT_FLOOR: f64 = 1e-12;

/// Lower-triangular Cholesky factor `A = L Lᵀ`, stored row-major.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    /// Returns `None` on the first non-positive pivot.
    pub fn new(a: &DMatrix<f64>) -> Option<Self> {
        let n = a.nrows();
        debug_assert_eq!(n, a.ncols());
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let (ri, rj) = (&l[i * n..i * n + j], &l[j * n..j * n + j]);
                let dot: f64 = ri.iter().zip(rj).map(|(x, y)| x * y).sum();
                let s = a[(i, j)] - dot;
                if i == j {
                    let diag = a[(i, i)];
                    if !(s > RELATIVE_PIVOT_FLOOR * diag) || !s.is_finite() {
                        return None;
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Some(Self { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.l[i * self.n + i]
    }

    /// `Σ log2 L_ii²` over `range`, i.e. log2 of the product of pivots.
    pub fn log2_pivot_sum(&self, range: std::ops::Range<usize>) -> f64 {
        range.map(|i| 2.0 * self.diag(i).log2()).sum()
    }

    pub fn log2_det(&self) -> f64 {
        self.log2_pivot_sum(0..self.n)
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let s: f64 = (0..i).map(|k| self.l[i * n + k] * y[k]).sum();
            y[i] = (y[i] - s) / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| self.l[k * n + i] * y[k]).sum();
            y[i] = (y[i] - s) / self.l[i * n + i];
        }
        y
    }

    /// `bᵀ A⁻¹ b` via the forward substitution only.
    pub fn quad_form_inv(&self, b: &[f64]) -> f64 {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let s: f64 = (0..i).map(|k| self.l[i * n + k] * y[k]).sum();
            y[i] = (y[i] - s) / self.l[i * n + i];
        }
        y.iter().map(|v| v * v).sum()
    }
}

/// Factorization outcome, recording the shrinkage that made it succeed.
#[derive(Debug, Clone)]
pub struct ShrunkCholesky {
    pub factor: Cholesky,
    /// `None` when no shrinkage was needed.
    pub shrinkage: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FactorFailure {
    /// Some diagonal entry is zero: a constant coordinate.
    ZeroVariance,
    /// Every rung of the ladder failed.
    Indefinite,
}

/// Factors `a`, falling back to `(1 − λ) a + λ diag(a)` for the smallest `λ`
/// on `ladder` that restores positive definiteness.
pub fn factor_with_ladder(a: &DMatrix<f64>, ladder: &[f64]) -> std::result::Result<ShrunkCholesky, FactorFailure> {
    if a.diagonal().iter().any(|d| !(*d > 0.0)) {
        return Err(FactorFailure::ZeroVariance);
    }
    if let Some(factor) = Cholesky::new(a) {
        return Ok(ShrunkCholesky { factor, shrinkage: None });
    }
    for &lambda in ladder {
        let mut shrunk = a * (1.0 - lambda);
        for i in 0..a.nrows() {
            shrunk[(i, i)] = a[(i, i)];
        }
        if let Some(factor) = Cholesky::new(&shrunk) {
            return Ok(ShrunkCholesky { factor, shrinkage: Some(lambda) });
        }
    }
    Err(FactorFailure::Indefinite)
}

pub fn factor_with_shrinkage(a: &DMatrix<f64>) -> Result<ShrunkCholesky> {
    factor_with_ladder(a, &SHRINKAGE_LADDER).map_err(|f| match f {
        FactorFailure::ZeroVariance => Error::DegenerateSeries("a coordinate has zero variance".into()),
        FactorFailure::Indefinite => {
            Error::SingularCovariance("matrix stays indefinite after the largest shrinkage".into())
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn factor_and_solve() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0]);
        let c = Cholesky::new(&a).unwrap();
        let nal = a.clone().cholesky().unwrap();
        assert_relative_eq!(c.log2_det(), nal.determinant().log2(), max_relative = 1e-12);
        let b = [1.0, -2.0, 0.5];
        let x = c.solve(&b);
        let ax = &a * nalgebra::DVector::from_column_slice(&x);
        for i in 0..3 {
            assert_relative_eq!(ax[i], b[i], epsilon = 1e-12);
        }
        let q = c.quad_form_inv(&b);
        let direct: f64 = b.iter().zip(&x).map(|(u, v)| u * v).sum();
        assert_relative_eq!(q, direct, max_relative = 1e-12);
    }

    #[test]
    fn duplicated_coordinate_needs_shrinkage() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(Cholesky::new(&a).is_none());
        let f = factor_with_shrinkage(&a).unwrap();
        assert_eq!(f.shrinkage, Some(1e-10));
        // det((1−λ)A + λI) = 1 − (1−λ)² ≈ 2λ
        assert_relative_eq!(f.factor.log2_det(), (2e-10f64).log2(), max_relative = 1e-4);
    }

    #[test]
    fn zero_variance_is_degenerate() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(factor_with_shrinkage(&a), Err(Error::DegenerateSeries(_))));
    }

    #[test]
    fn strongly_indefinite_fails() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(factor_with_shrinkage(&a), Err(Error::SingularCovariance(_))));
    }
}
