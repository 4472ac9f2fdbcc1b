//! Hand-rolled Cholesky factorization.
//!
//! SPD matrices are always inverted through this factorization rather than a
//! general LU: the factored solves preserve the symmetry guarantees that the
//! operator machinery relies on, and a failed pivot doubles as the
//! positive-definiteness test.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Lower-triangular factor `L` with `A = L·Lᵀ`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    l: DMatrix<f64>,
}

/// Factor a symmetric positive definite matrix.
///
/// Fails with [`Error::NotPositiveDefinite`] on the first non-positive pivot.
pub fn cholesky(a: &DMatrix<f64>) -> Result<CholeskyFactor> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            what: "Cholesky input",
            expected: n,
            got: a.ncols(),
        });
    }
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                what: "matrix",
                vertex: None,
                column: j,
                pivot: d,
            });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(CholeskyFactor { l })
}

impl CholeskyFactor {
    pub fn l(&self) -> &DMatrix<f64> {
        &self.l
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// det(A) = prod(L_ii)^2
    pub fn det(&self) -> f64 {
        let mut d = 1.0;
        for i in 0..self.l.nrows() {
            d *= self.l[(i, i)];
        }
        d * d
    }

    /// Solve `L·Y = B` (forward substitution), B is n×k.
    pub fn forward_solve(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.l.nrows();
        let k = b.ncols();
        let mut y = b.clone();
        for col in 0..k {
            for i in 0..n {
                let mut s = y[(i, col)];
                for j in 0..i {
                    s -= self.l[(i, j)] * y[(j, col)];
                }
                y[(i, col)] = s / self.l[(i, i)];
            }
        }
        y
    }

    /// Solve `Lᵀ·X = B` (back substitution), B is n×k.
    pub fn back_solve_transpose(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.l.nrows();
        let k = b.ncols();
        let mut x = b.clone();
        for col in 0..k {
            for i in (0..n).rev() {
                let mut s = x[(i, col)];
                for j in (i + 1)..n {
                    s -= self.l[(j, i)] * x[(j, col)];
                }
                x[(i, col)] = s / self.l[(i, i)];
            }
        }
        x
    }

    /// Solve `A·X = B` through both triangular solves.
    pub fn solve(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.back_solve_transpose(&self.forward_solve(b))
    }

    /// A⁻¹ as a dense matrix.
    pub fn inverse(&self) -> DMatrix<f64> {
        let n = self.l.nrows();
        self.solve(&DMatrix::identity(n, n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_and_solves() {
        #[rustfmt::skip]
        let a = DMatrix::from_row_slice(3, 3, &[
            4.0, 2.0, 0.0,
            2.0, 5.0, 1.0,
            0.0, 1.0, 3.0,
        ]);
        let f = cholesky(&a).unwrap();
        let rebuilt = f.l() * f.l().transpose();
        assert!((&rebuilt - &a).norm() < 1e-14 * a.norm());

        let b = DMatrix::from_row_slice(3, 1, &[1.0, -2.0, 0.5]);
        let x = f.solve(&b);
        assert!((&a * &x - &b).norm() < 1e-13);
        assert!((f.det() - a.determinant()).abs() < 1e-12 * a.determinant().abs());
    }

    #[test]
    fn rejects_indefinite() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        match cholesky(&a) {
            Err(Error::NotPositiveDefinite { column, pivot, .. }) => {
                assert_eq!(column, 1);
                assert!(pivot <= 0.0);
            }
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }
}
