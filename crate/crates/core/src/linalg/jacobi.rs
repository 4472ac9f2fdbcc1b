//! Cyclic Jacobi eigensolver for small dense symmetric matrices.
//!
//! Deterministic by construction: fixed sweep order over pairs (p, q) with
//! p < q, no pivot selection, no threshold strategy beyond skipping entries
//! that are already exactly zero.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Convergence threshold: sweep until the off-diagonal Frobenius norm drops
/// below this factor times the Frobenius norm of the input.
pub const JACOBI_OFF_TOL: f64 = 1e-13;

const MAX_SWEEPS: usize = 128;

/// Eigendecomposition of a symmetric matrix.
///
/// Column `j` of `vectors` is a unit eigenvector for `values[j]`; the
/// columns form an orthonormal basis.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

fn off_diagonal_frobenius(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)] * m[(i, j)];
            }
        }
    }
    acc.sqrt()
}

fn rotate(m: &mut DMatrix<f64>, v: &mut DMatrix<f64>, p: usize, q: usize) {
    let apq = m[(p, q)];
    if apq == 0.0 {
        return;
    }
    let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
    let t = if theta.abs() > 1e12 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let tau = s / (1.0 + c);

    let n = m.nrows();
    let app = m[(p, p)];
    let aqq = m[(q, q)];
    m[(p, p)] = app - t * apq;
    m[(q, q)] = aqq + t * apq;
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let arp = m[(r, p)];
        let arq = m[(r, q)];
        let nrp = arp - s * (arq + tau * arp);
        let nrq = arq + s * (arp - tau * arq);
        m[(r, p)] = nrp;
        m[(p, r)] = nrp;
        m[(r, q)] = nrq;
        m[(q, r)] = nrq;
    }
    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp - s * (vrq + tau * vrp);
        v[(r, q)] = vrq + s * (vrp - tau * vrq);
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.
///
/// The caller is responsible for symmetry; only the dimensions are checked.
/// Eigenvalues come out in no particular order.
pub fn sym_eigen(a: &DMatrix<f64>) -> Result<SymEigen> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            what: "symmetric eigensolver input",
            expected: n,
            got: a.ncols(),
        });
    }
    let mut m = a.clone();
    let mut v = DMatrix::identity(n, n);
    let target = JACOBI_OFF_TOL * a.norm();
    for _sweep in 0..MAX_SWEEPS {
        if off_diagonal_frobenius(&m) <= target {
            let values = (0..n).map(|i| m[(i, i)]).collect();
            return Ok(SymEigen { values, vectors: v });
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    Err(Error::ConvergenceFailure {
        what: "cyclic Jacobi eigensolver",
    })
}

/// Like [`sym_eigen`] but with eigenvalues sorted descending and the
/// eigenvector columns permuted to match.
pub fn sym_eigen_sorted(a: &DMatrix<f64>) -> Result<SymEigen> {
    let e = sym_eigen(a)?;
    let n = e.values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| e.values[j].total_cmp(&e.values[i]));
    let values: Vec<f64> = idx.iter().map(|&i| e.values[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in idx.iter().enumerate() {
        vectors.set_column(dst, &e.vectors.column(src));
    }
    Ok(SymEigen { values, vectors })
}

/// Spectral norm (largest singular value) of an arbitrary matrix, via the
/// symmetric eigenproblem for Mᵀ·M.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let gram = m.transpose() * m;
    match sym_eigen(&gram) {
        Ok(e) => e
            .values
            .iter()
            .fold(0.0_f64, |acc, &x| acc.max(x.max(0.0)))
            .sqrt(),
        Err(_) => m.norm(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_is_fixed_point() {
        let a = DMatrix::<f64>::identity(4, 4);
        let e = sym_eigen(&a).unwrap();
        for v in &e.values {
            assert_relative_eq!(*v, 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn two_by_two_exact() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let e = sym_eigen_sorted(&a).unwrap();
        assert_relative_eq!(e.values[0], 3.0, max_relative = 1e-14);
        assert_relative_eq!(e.values[1], 1.0, max_relative = 1e-14);
        // eigenvector for 3 is (1,1)/sqrt(2) up to sign
        let v = e.vectors.column(0);
        assert_relative_eq!(v[0].abs(), (0.5_f64).sqrt(), max_relative = 1e-13);
        assert_relative_eq!(v[0], v[1], max_relative = 1e-12);
    }

    #[test]
    fn known_spectrum_4x4() {
        // Eigenvalues of this arrowhead-style matrix computed independently
        // from its characteristic polynomial roots.
        #[rustfmt::skip]
        let a = DMatrix::from_row_slice(4, 4, &[
            4.0, 1.0, 0.0, 0.0,
            1.0, 4.0, 1.0, 0.0,
            0.0, 1.0, 4.0, 1.0,
            0.0, 0.0, 1.0, 4.0,
        ]);
        // Tridiagonal Toeplitz: lambda_j = 4 + 2 cos(j pi / 5)
        let mut expected: Vec<f64> = (1..=4)
            .map(|j| 4.0 + 2.0 * (std::f64::consts::PI * j as f64 / 5.0).cos())
            .collect();
        expected.sort_by(|x, y| y.total_cmp(x));
        let e = sym_eigen_sorted(&a).unwrap();
        for (got, want) in e.values.iter().zip(expected.iter()) {
            assert_relative_eq!(got, want, max_relative = 1e-13);
        }
    }

    #[test]
    fn reconstructs_input() {
        #[rustfmt::skip]
        let a = DMatrix::from_row_slice(3, 3, &[
            1.0, -2.0,  0.5,
           -2.0,  0.0,  3.0,
            0.5,  3.0, -1.5,
        ]);
        let e = sym_eigen(&a).unwrap();
        let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(e.values.clone()));
        let rebuilt = &e.vectors * lam * e.vectors.transpose();
        assert!((&rebuilt - &a).norm() < 1e-12 * a.norm());
        let vtv = e.vectors.transpose() * &e.vectors;
        assert!((vtv - DMatrix::identity(3, 3)).norm() < 1e-13);
    }

    #[test]
    fn spectral_norm_of_diag() {
        let m = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, -7.0]);
        assert_relative_eq!(spectral_norm(&m), 7.0, max_relative = 1e-12);
    }
}
