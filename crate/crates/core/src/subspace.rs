//! Subspace comparisons: orthonormalization, principal angles, orthogonal
//! complements in a chosen inner product, and line angles in the plane.
//!
//! Principal-angle cosines are computed through the singular values of
//! Ūᵀ·V̄ for orthonormalized frames. Near span equality the cosine route
//! loses resolution (acos of a value near 1), so span-equality checks use
//! the sine route ‖(I − Ū·Ūᵀ)·V̄‖₂ instead.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, sym_eigen, sym_eigen_sorted, SymForm};

/// Columns below this norm ratio during Gram–Schmidt mean a rank-deficient
/// frame.
const MGS_RANK_TOL: f64 = 1e-12;

/// Euclidean modified Gram–Schmidt. Requires full column rank.
pub fn orthonormalize(frames: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    r_orthonormalize(frames, &SymForm::identity(frames.nrows()))
}

/// Modified Gram–Schmidt in the inner product defined by the SPD form `r`.
pub fn r_orthonormalize(frames: &DMatrix<f64>, r: &SymForm) -> Result<DMatrix<f64>> {
    let p = frames.ncols();
    let mut q = frames.clone();
    for j in 0..p {
        for k in 0..j {
            let qk = q.column(k).into_owned();
            let proj = (qk.transpose() * r.mat() * q.column(j))[(0, 0)];
            let col = q.column(j) - &qk * proj;
            q.set_column(j, &col);
        }
        let norm2 = (q.column(j).transpose() * r.mat() * q.column(j))[(0, 0)];
        let original2 = (frames.column(j).transpose() * r.mat() * frames.column(j))[(0, 0)];
        // negated so a NaN norm fails the rank check
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(norm2 > MGS_RANK_TOL * MGS_RANK_TOL * original2.max(1.0)) {
            return Err(Error::SingularMatrix {
                what: "frame",
                index: None,
                rel_det: 0.0,
            });
        }
        let col = q.column(j) / norm2.sqrt();
        q.set_column(j, &col);
    }
    Ok(q)
}

/// Smallest cosine among the principal angles between the column spans of
/// `u` and `v` (both of the same dimension p). Returns 1 for p = 0.
///
/// All principal angles are below π/2 exactly when this is positive.
pub fn min_cos_principal(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<f64> {
    let p = u.ncols();
    if v.ncols() != p {
        return Err(Error::DimensionMismatch {
            what: "principal angles",
            expected: p,
            got: v.ncols(),
        });
    }
    if p == 0 {
        return Ok(1.0);
    }
    let ub = orthonormalize(u)?;
    let vb = orthonormalize(v)?;
    let w = ub.transpose() * vb;
    let gram = w.transpose() * &w;
    let e = sym_eigen(&gram)?;
    let min = e.values.iter().fold(f64::INFINITY, |a, &x| a.min(x));
    Ok(min.max(0.0).sqrt())
}

/// Largest sine among the principal angles between the column spans: the
/// spectral norm of (I − Ū·Ūᵀ)·V̄. Zero exactly at span equality; this is
/// the numerically sharp test for near-equal spans.
pub fn max_sin_principal(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<f64> {
    let p = u.ncols();
    if v.ncols() != p {
        return Err(Error::DimensionMismatch {
            what: "principal angles",
            expected: p,
            got: v.ncols(),
        });
    }
    if p == 0 {
        return Ok(0.0);
    }
    let ub = orthonormalize(u)?;
    let vb = orthonormalize(v)?;
    let resid = &vb - &ub * (ub.transpose() * &vb);
    Ok(spectral_norm(&resid))
}

/// Basis of the r-orthogonal complement of the column span of `frames`:
/// an n×(n−p) matrix whose columns are r-orthonormal and r-orthogonal to
/// every column of `frames`.
pub fn r_orthogonal_complement(frames: &DMatrix<f64>, r: &SymForm) -> Result<DMatrix<f64>> {
    let n = frames.nrows();
    let p = frames.ncols();
    if r.dim() != n {
        return Err(Error::DimensionMismatch {
            what: "complement metric",
            expected: n,
            got: r.dim(),
        });
    }
    if p >= n {
        return Ok(DMatrix::zeros(n, 0));
    }
    // Null space of K = framesᵀ·r: the n−p smallest eigenvectors of Kᵀ·K.
    let k = frames.transpose() * r.mat();
    let gram = SymForm::symmetrized(k.transpose() * &k);
    let e = sym_eigen_sorted(gram.mat())?;
    let mut basis = DMatrix::zeros(n, n - p);
    for j in 0..(n - p) {
        basis.set_column(j, &e.vectors.column(n - 1 - j));
    }
    r_orthonormalize(&basis, r)
}

/// Angle of a line in the plane, in [0, π): the direction of a nonzero
/// 2-vector modulo sign.
pub fn line_angle(frame: &DMatrix<f64>) -> Result<f64> {
    if frame.nrows() != 2 || frame.ncols() != 1 {
        return Err(Error::DimensionMismatch {
            what: "line frame",
            expected: 2,
            got: frame.nrows().max(frame.ncols() * 2),
        });
    }
    let (x, y) = (frame[(0, 0)], frame[(1, 0)]);
    if x == 0.0 && y == 0.0 {
        return Err(Error::SingularMatrix {
            what: "line frame",
            index: None,
            rel_det: 0.0,
        });
    }
    let theta = y.atan2(x).rem_euclid(std::f64::consts::PI);
    // rem_euclid can return exactly π for tiny negative angles
    Ok(if theta >= std::f64::consts::PI {
        0.0
    } else {
        theta
    })
}

/// Signed representative of `x` modulo π lying in (−π/2, π/2].
pub fn minimal_half_turn(x: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let y = x.rem_euclid(pi);
    if y > pi / 2.0 {
        y - pi
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormalize_basic() {
        let f = DMatrix::from_column_slice(3, 2, &[1.0, 1.0, 0.0, 0.0, 1.0, 1.0]);
        let q = orthonormalize(&f).unwrap();
        let g = q.transpose() * &q;
        assert!((g - DMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn principal_angles_of_planes() {
        let u = DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0]);
        let v = DMatrix::from_column_slice(3, 1, &[0.0, 1.0, 0.0]);
        assert!(min_cos_principal(&u, &v).unwrap().abs() < 1e-12);
        assert!((max_sin_principal(&u, &v).unwrap() - 1.0).abs() < 1e-12);
        assert!((min_cos_principal(&u, &u).unwrap() - 1.0).abs() < 1e-12);
        assert!(max_sin_principal(&u, &u).unwrap() < 1e-12);
    }

    #[test]
    fn forty_five_degrees() {
        let u = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let v = DMatrix::from_column_slice(2, 1, &[1.0, 1.0]);
        let c = min_cos_principal(&u, &v).unwrap();
        assert!((c - (0.5_f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn complement_in_weighted_metric() {
        let r = SymForm::from_diagonal(&[1.0, 4.0]);
        let f = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let c = r_orthogonal_complement(&f, &r).unwrap();
        assert_eq!(c.ncols(), 1);
        // r-orthogonality: fᵀ·r·c = 0
        let ip = (f.transpose() * r.mat() * &c)[(0, 0)];
        assert!(ip.abs() < 1e-13);
        // r-unit length
        let len = (c.transpose() * r.mat() * &c)[(0, 0)];
        assert!((len - 1.0).abs() < 1e-13);
    }

    #[test]
    fn line_angles_wrap() {
        let f = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        assert!(line_angle(&f).unwrap().abs() < 1e-15);
        let f = DMatrix::from_column_slice(2, 1, &[-1.0, 0.0]);
        assert!(line_angle(&f).unwrap().abs() < 1e-12);
        let f = DMatrix::from_column_slice(2, 1, &[0.0, -3.0]);
        assert!((line_angle(&f).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn minimal_half_turn_range() {
        let pi = std::f64::consts::PI;
        assert!((minimal_half_turn(0.1) - 0.1).abs() < 1e-15);
        assert!((minimal_half_turn(pi - 0.1) + 0.1).abs() < 1e-13);
        assert!((minimal_half_turn(pi / 2.0) - pi / 2.0).abs() < 1e-15);
        assert!((minimal_half_turn(-0.2) + 0.2).abs() < 1e-13);
    }
}
