//! Fiberwise machinery on a single vector space: inertia, congruence
//! diagonalization, the operator L, SPD square roots, simultaneous
//! diagonalization, openness radii, and positive-determinant congruence
//! witnesses.

pub mod cholesky;
pub mod jacobi;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
pub use cholesky::{cholesky, CholeskyFactor};
pub use jacobi::{spectral_norm, sym_eigen, sym_eigen_sorted, SymEigen, JACOBI_OFF_TOL};

/// Default relative degeneracy tolerance: eigenvalues of magnitude below
/// `DEFAULT_TOL` times the spectral norm count as zero.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Matrices are accepted as symmetric when `max |M - Mᵀ|` does not exceed
/// this times `max(1, max |M|)`.
pub const SYM_TOL: f64 = 1e-12;

/// Relative Frobenius residual allowed for constructed identities
/// (congruence images, square roots, isometries).
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Relative determinant threshold below which a matrix counts as singular.
pub const DET_REL_TOL: f64 = 1e-12;

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, &x| acc.max(x.abs()))
}

/// Frobenius distance of `a` from `b`, relative to the size of `b`.
pub fn rel_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = b.norm();
    if scale > 0.0 {
        (a - b).norm() / scale
    } else {
        a.norm()
    }
}

/// `|det g|` relative to `‖g‖₂ⁿ`, a scale-invariant singularity measure.
pub fn relative_det(g: &DMatrix<f64>) -> f64 {
    let n = g.nrows();
    let norm = spectral_norm(g);
    if norm == 0.0 {
        return 0.0;
    }
    g.determinant().abs() / norm.powi(n as i32)
}

/// A quadratic form on one fiber: a symmetric n×n matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymForm {
    dim: usize,
    mat: DMatrix<f64>,
}

impl SymForm {
    /// Validates symmetry to within [`SYM_TOL`] and stores the symmetrized
    /// matrix (M+Mᵀ)/2.
    pub fn new(mat: DMatrix<f64>) -> Result<SymForm> {
        let n = mat.nrows();
        if n == 0 {
            return Err(Error::InvalidParameter {
                what: "form dimension",
                detail: "must be at least 1".into(),
            });
        }
        if mat.ncols() != n {
            return Err(Error::DimensionMismatch {
                what: "form matrix",
                expected: n,
                got: mat.ncols(),
            });
        }
        let dev = max_abs(&(&mat - mat.transpose()));
        if dev > SYM_TOL * max_abs(&mat).max(1.0) {
            return Err(Error::NotSymmetric {
                what: "form matrix",
                vertex: None,
                deviation: dev,
            });
        }
        Ok(Self::symmetrized(mat))
    }

    /// Symmetrize without checking: for matrices that are symmetric in exact
    /// arithmetic and only carry roundoff asymmetry.
    pub fn symmetrized(mat: DMatrix<f64>) -> SymForm {
        let dim = mat.nrows();
        let sym = (&mat + mat.transpose()) * 0.5;
        SymForm { dim, mat: sym }
    }

    pub fn identity(n: usize) -> SymForm {
        SymForm {
            dim: n,
            mat: DMatrix::identity(n, n),
        }
    }

    pub fn from_diagonal(d: &[f64]) -> SymForm {
        SymForm {
            dim: d.len(),
            mat: DMatrix::from_diagonal(&DVector::from_row_slice(d)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mat(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// q(v) = vᵀ M v
    pub fn eval(&self, v: &DVector<f64>) -> f64 {
        (v.transpose() * &self.mat * v)[(0, 0)]
    }

    /// b(u, v) = uᵀ M v
    pub fn bilinear(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        (u.transpose() * &self.mat * v)[(0, 0)]
    }
}

/// Counts of positive and negative eigenvalues of a non-degenerate form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Inertia {
    pub plus: usize,
    pub minus: usize,
}

impl Inertia {
    pub fn dim(&self) -> usize {
        self.plus + self.minus
    }

    pub fn is_positive_definite(&self) -> bool {
        self.minus == 0
    }
}

impl std::fmt::Display for Inertia {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.plus, self.minus)
    }
}

/// Invertible `g` and diagonal ±1 matrix `d` with `gᵀ·A·g = d`.
#[derive(Debug, Clone)]
pub struct CongruenceWitness {
    pub g: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

fn eigen_checked(form: &SymForm, tol: f64) -> Result<SymEigen> {
    if tol <= 0.0 {
        return Err(Error::InvalidParameter {
            what: "tolerance",
            detail: format!("must be positive, got {tol}"),
        });
    }
    let e = sym_eigen_sorted(form.mat())?;
    let max = e.values.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
    let min = e.values.iter().fold(f64::INFINITY, |a, &x| a.min(x.abs()));
    if max == 0.0 || min <= tol * max {
        return Err(Error::DegenerateForm {
            vertex: None,
            ratio: if max == 0.0 { 0.0 } else { min / max },
            tol,
        });
    }
    Ok(e)
}

/// Inertia (n₊, n₋) of a non-degenerate symmetric form.
///
/// Eigenvalues of magnitude at most `tol` times the spectral norm are
/// treated as degenerate and rejected.
pub fn inertia(form: &SymForm, tol: f64) -> Result<Inertia> {
    let e = eigen_checked(form, tol)?;
    let plus = e.values.iter().filter(|&&x| x > 0.0).count();
    Ok(Inertia {
        plus,
        minus: form.dim() - plus,
    })
}

/// Congruence diagonalization to the ±1 normal form: returns `(g, d)` with
/// `gᵀ·A·g = d`, the +1 block first. `g` has the eigenvector columns scaled
/// by 1/√|λ|.
pub fn congruence_diagonalize(form: &SymForm, tol: f64) -> Result<CongruenceWitness> {
    let e = eigen_checked(form, tol)?;
    let n = form.dim();
    let mut g = e.vectors.clone();
    let mut signs = Vec::with_capacity(n);
    for (j, &lam) in e.values.iter().enumerate() {
        let scale = 1.0 / lam.abs().sqrt();
        for i in 0..n {
            g[(i, j)] *= scale;
        }
        signs.push(if lam > 0.0 { 1.0 } else { -1.0 });
    }
    let d = DMatrix::from_diagonal(&DVector::from_vec(signs));
    Ok(CongruenceWitness { g, d })
}

/// Positive-determinant congruence representative: returns `g` when
/// `det g > 0`, else `h·g` with `h = diag(−1, 1, …, 1)`.
///
/// Because `h·δ·h = δ` for every diagonal `δ`, the returned matrix acts by
/// congruence on diagonal forms exactly as `g` does.
pub fn gl0_congruence_witness(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = g.nrows();
    if g.ncols() != n || n == 0 {
        return Err(Error::DimensionMismatch {
            what: "congruence matrix",
            expected: n.max(1),
            got: g.ncols(),
        });
    }
    let rel = relative_det(g);
    if rel <= DET_REL_TOL {
        return Err(Error::SingularMatrix {
            what: "congruence matrix",
            index: None,
            rel_det: rel,
        });
    }
    if g.determinant() > 0.0 {
        Ok(g.clone())
    } else {
        let mut flipped = g.clone();
        for j in 0..n {
            flipped[(0, j)] = -flipped[(0, j)];
        }
        Ok(flipped)
    }
}

/// The operator L = r⁻¹·q relating two forms on the same fiber; r must be
/// positive definite. The product r·L is symmetric (L is b_r-symmetric).
pub fn operator_l(r: &SymForm, q: &SymForm) -> Result<DMatrix<f64>> {
    if r.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            what: "operator L",
            expected: r.dim(),
            got: q.dim(),
        });
    }
    let chol = cholesky(r.mat()).map_err(|e| e.describing("reference form"))?;
    let l = chol.solve(q.mat());
    let weighted = r.mat() * &l;
    let dev = max_abs(&(&weighted - weighted.transpose()));
    if dev > 1e-10 * max_abs(&weighted).max(1.0) {
        return Err(Error::NotSymmetric {
            what: "r-weighted operator",
            vertex: None,
            deviation: dev,
        });
    }
    Ok(l)
}

/// Simultaneous diagonalization: returns `(B, λ)` with `Bᵀ·r·B = I` and
/// `Bᵀ·q·B = diag(λ)`, λ sorted descending.
///
/// Implemented as Cholesky `r = L·Lᵀ`, symmetric eigensolve of `L⁻¹·q·L⁻ᵀ`,
/// back-substitution. `q` may be degenerate here.
pub fn simultaneous_diagonalize(q: &SymForm, r: &SymForm) -> Result<(DMatrix<f64>, Vec<f64>)> {
    if r.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            what: "simultaneous diagonalization",
            expected: r.dim(),
            got: q.dim(),
        });
    }
    let chol = cholesky(r.mat()).map_err(|e| e.describing("reference form"))?;
    let z = chol.forward_solve(q.mat());
    let m = chol.forward_solve(&z.transpose()).transpose();
    let m = (&m + m.transpose()) * 0.5;
    let e = sym_eigen_sorted(&m)?;
    let b = chol.back_solve_transpose(&e.vectors);
    Ok((b, e.values))
}

/// The square root of a positive operator `m`, taken in the r-inner product:
/// requires `r·m` symmetric and the spectrum of `m` above `tol`.
///
/// Returns `S` with `S·S = m` and `r·S` symmetric.
pub fn spd_sqrt(m: &DMatrix<f64>, r: &SymForm, tol: f64) -> Result<DMatrix<f64>> {
    let n = r.dim();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch {
            what: "square root operand",
            expected: n,
            got: if m.nrows() != n { m.nrows() } else { m.ncols() },
        });
    }
    let weighted = r.mat() * m;
    let dev = max_abs(&(&weighted - weighted.transpose()));
    if dev > 1e-8 * max_abs(&weighted).max(1.0) {
        return Err(Error::NotSymmetric {
            what: "r-weighted operator",
            vertex: None,
            deviation: dev,
        });
    }
    let q_form = SymForm::symmetrized(weighted);
    let (b, lambda) = simultaneous_diagonalize(&q_form, r)?;
    if let Some(&bad) = lambda.iter().find(|&&x| x <= tol) {
        return Err(Error::NonPositiveSpectrum {
            vertex: None,
            eigenvalue: bad,
        });
    }
    // B diagonalizes m: m = B·Λ·B⁻¹ with B⁻¹ = Bᵀ·r, so √m = B·√Λ·Bᵀ·r.
    let sqrt_lam =
        DMatrix::from_diagonal(&DVector::from_iterator(n, lambda.iter().map(|&x| x.sqrt())));
    let s = &b * sqrt_lam * b.transpose() * r.mat();
    let resid = rel_frobenius(&(&s * &s), m);
    if resid > RESIDUAL_TOL {
        return Err(Error::ResidualTooLarge {
            what: "operator square root",
            vertex: None,
            residual: resid,
            tol: RESIDUAL_TOL,
        });
    }
    Ok(s)
}

/// Inertia-stability radius of `q` for the splitting spanned by the columns
/// of `v_plus` and `v_minus`: one half of `min(r₊, r₋)`, where `r₊` is the
/// smallest generalized eigenvalue of `(Pᵀ·q·P, Pᵀ·P)` on the plus summand
/// and `r₋` its analogue for `−q` on the minus summand.
///
/// Any symmetric perturbation of spectral norm below the returned radius
/// leaves the inertia unchanged.
pub fn openness_radius(q: &SymForm, v_plus: &DMatrix<f64>, v_minus: &DMatrix<f64>) -> Result<f64> {
    let n = q.dim();
    let p = v_plus.ncols();
    let m = v_minus.ncols();
    if v_plus.nrows() != n || v_minus.nrows() != n || p + m != n {
        return Err(Error::DimensionMismatch {
            what: "splitting frames",
            expected: n,
            got: p + m,
        });
    }
    let mut joint = DMatrix::zeros(n, n);
    for j in 0..p {
        joint.set_column(j, &v_plus.column(j));
    }
    for j in 0..m {
        joint.set_column(p + j, &v_minus.column(j));
    }
    let rel = relative_det(&joint);
    if rel <= DET_REL_TOL {
        return Err(Error::SingularMatrix {
            what: "splitting frame",
            index: None,
            rel_det: rel,
        });
    }

    let restricted_min = |basis: &DMatrix<f64>, sign: f64, summand: &'static str| -> Result<f64> {
        if basis.ncols() == 0 {
            return Ok(f64::INFINITY);
        }
        let gram = SymForm::symmetrized(basis.transpose() * basis);
        let restricted = SymForm::symmetrized(basis.transpose() * q.mat() * basis * sign);
        let (_, lambda) = simultaneous_diagonalize(&restricted, &gram)?;
        let min = lambda.iter().fold(f64::INFINITY, |a, &x| a.min(x));
        if min <= 0.0 {
            return Err(Error::NotDefiniteOnSummand {
                vertex: None,
                summand,
                value: min * sign,
            });
        }
        Ok(min)
    };

    let r_plus = restricted_min(v_plus, 1.0, "positive")?;
    let r_minus = restricted_min(v_minus, -1.0, "negative")?;
    Ok(0.5 * r_plus.min(r_minus))
}

/// Decimal text form of a real with 17 significant digits, lowercase
/// scientific notation. Round-trips exactly through parsing.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Row-major flattening of a matrix.
pub fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Text representation of a matrix: one line per row, entries separated by
/// single spaces, each formatted by [`format_real`].
pub fn format_matrix(m: &DMatrix<f64>) -> String {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| format_real(m[(i, j)]))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(rows: usize, data: &[f64]) -> SymForm {
        SymForm::new(DMatrix::from_row_slice(rows, rows, data)).unwrap()
    }

    #[test]
    fn inertia_of_diag() {
        let q = SymForm::from_diagonal(&[1.0, -1.0]);
        assert_eq!(
            inertia(&q, DEFAULT_TOL).unwrap(),
            Inertia { plus: 1, minus: 1 }
        );
    }

    #[test]
    fn inertia_rejects_explicit_zero() {
        let q = SymForm::from_diagonal(&[3.0, 2.0, 0.0]);
        assert!(matches!(
            inertia(&q, DEFAULT_TOL),
            Err(Error::DegenerateForm { .. })
        ));
    }

    #[test]
    fn congruence_diagonalize_scaling() {
        let q = SymForm::from_diagonal(&[4.0, -9.0]);
        let w = congruence_diagonalize(&q, DEFAULT_TOL).unwrap();
        let img = w.g.transpose() * q.mat() * &w.g;
        assert!(rel_frobenius(&img, &w.d) < 1e-12);
        assert_eq!(w.d[(0, 0)], 1.0);
        assert_eq!(w.d[(1, 1)], -1.0);
        // scaling forced: |g| columns are 1/2 and 1/3 times unit vectors
        assert!((w.g.column(0).norm() - 0.5).abs() < 1e-13);
        assert!((w.g.column(1).norm() - 1.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn gl0_witness_flips_sign() {
        let g = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        let w = gl0_congruence_witness(&g).unwrap();
        assert!(rel_frobenius(&w, &DMatrix::identity(2, 2)) < 1e-15);
        let id = DMatrix::<f64>::identity(3, 3);
        assert_eq!(gl0_congruence_witness(&id).unwrap(), id);
    }

    #[test]
    fn operator_l_diagonal() {
        let r = SymForm::from_diagonal(&[2.0, 2.0]);
        let q = SymForm::from_diagonal(&[2.0, -4.0]);
        let l = operator_l(&r, &q).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -2.0]);
        assert!(rel_frobenius(&l, &expect) < 1e-14);
    }

    #[test]
    fn operator_l_identity_reference() {
        let r = SymForm::identity(3);
        let q = form(3, &[1.0, 2.0, 0.0, 2.0, -1.0, 1.0, 0.0, 1.0, 0.5]);
        let l = operator_l(&r, &q).unwrap();
        assert!(rel_frobenius(&l, q.mat()) < 1e-14);
    }

    #[test]
    fn sqrt_diagonal() {
        let m = DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 9.0]);
        let s = spd_sqrt(&m, &SymForm::identity(2), DEFAULT_TOL).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]);
        assert!(rel_frobenius(&s, &expect) < 1e-12);
        let id = DMatrix::<f64>::identity(4, 4);
        let s = spd_sqrt(&id, &SymForm::identity(4), DEFAULT_TOL).unwrap();
        assert!(rel_frobenius(&s, &id) < 1e-13);
    }

    #[test]
    fn sqrt_rejects_negative_spectrum() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            spd_sqrt(&m, &SymForm::identity(2), DEFAULT_TOL),
            Err(Error::NonPositiveSpectrum { .. })
        ));
    }

    #[test]
    fn simultaneous_diagonalize_identity_pair() {
        let q = SymForm::identity(3);
        let (b, lam) = simultaneous_diagonalize(&q, &q).unwrap();
        for l in &lam {
            assert!((l - 1.0).abs() < 1e-13);
        }
        let btb = b.transpose() * &b;
        assert!(rel_frobenius(&btb, &DMatrix::identity(3, 3)) < 1e-12);
    }

    #[test]
    fn simultaneous_diagonalize_sorted() {
        let q = SymForm::from_diagonal(&[-2.0, 5.0]);
        let r = SymForm::identity(2);
        let (b, lam) = simultaneous_diagonalize(&q, &r).unwrap();
        assert!((lam[0] - 5.0).abs() < 1e-13);
        assert!((lam[1] + 2.0).abs() < 1e-13);
        let img = b.transpose() * q.mat() * &b;
        assert!((img[(0, 0)] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn openness_radius_diagonal_cases() {
        let e1 = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let e2 = DMatrix::from_column_slice(2, 1, &[0.0, 1.0]);
        let q = SymForm::from_diagonal(&[1.0, -1.0]);
        assert!((openness_radius(&q, &e1, &e2).unwrap() - 0.5).abs() < 1e-14);
        let q = SymForm::from_diagonal(&[4.0, -1.0]);
        assert!((openness_radius(&q, &e1, &e2).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn openness_radius_rejects_wrong_summand() {
        let e1 = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let e2 = DMatrix::from_column_slice(2, 1, &[0.0, 1.0]);
        let q = SymForm::from_diagonal(&[1.0, -1.0]);
        assert!(matches!(
            openness_radius(&q, &e2, &e1),
            Err(Error::NotDefiniteOnSummand { .. })
        ));
    }

    #[test]
    fn format_real_roundtrip() {
        for &x in &[1.0, -0.1, 1.0 / 3.0, 2.5e-17, std::f64::consts::PI] {
            let s = format_real(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            assert!(!s.contains('E'));
        }
    }
}
