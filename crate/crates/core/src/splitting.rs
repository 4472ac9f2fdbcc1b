//! Canonical q-splittings: the eigen-splitting of a form against a positive
//! reference field, its verifier, the canonical reference recovering a given
//! splitting, and discrete homotopy witnesses for reference-independence.

use nalgebra::DMatrix;

use crate::bundle::{
    interpolate_positive, FormField, SplittingField, SubbundleField, ADJACENCY_MIN_COS,
};
use crate::error::{Error, Result};
use crate::linalg::{simultaneous_diagonalize, sym_eigen, SymForm, DEFAULT_TOL};
use crate::subspace::{min_cos_principal, r_orthogonal_complement};

/// A canonical splitting together with its per-vertex spectral margins.
#[derive(Debug, Clone)]
pub struct QSplittingResult {
    pub splitting: SplittingField,
    /// Per-vertex minimum |eigenvalue| of the pencil (q, r): the distance of
    /// the splitting from degeneracy.
    pub eigen_gaps: Vec<f64>,
}

/// Definiteness report of a claimed splitting against a form.
#[derive(Debug, Clone)]
pub struct SplittingReport {
    /// Per-vertex smallest eigenvalue of q restricted to the plus frames
    /// (+∞ for an empty summand).
    pub min_plus: Vec<f64>,
    /// Per-vertex largest eigenvalue of q restricted to the minus frames
    /// (−∞ for an empty summand).
    pub max_minus: Vec<f64>,
    pub pass: bool,
}

fn check_same_bundle(a: &FormField, b: &FormField, what: &'static str) -> Result<()> {
    if a.bundle() == b.bundle() {
        Ok(())
    } else {
        Err(Error::BundleMismatch { what })
    }
}

/// The canonical q-splitting determined by a positive definite reference
/// field: per vertex, the span of the eigenvectors of the pencil (q, r)
/// with positive eigenvalue, against the span of the rest.
///
/// Frames come out r-orthonormal per vertex. The eigen gap (smallest
/// |eigenvalue|) is recorded per vertex; a gap below `tol` relative to the
/// largest |eigenvalue| is a degeneracy.
pub fn q_splitting(q: &FormField, r: &FormField) -> Result<QSplittingResult> {
    q_splitting_with_tol(q, r, DEFAULT_TOL)
}

pub fn q_splitting_with_tol(q: &FormField, r: &FormField, tol: f64) -> Result<QSplittingResult> {
    check_same_bundle(q, r, "q-splitting inputs")?;
    if !r.inertia().is_positive_definite() {
        return Err(Error::NotPositiveDefinite {
            what: "reference field",
            vertex: None,
            column: 0,
            pivot: f64::NAN,
        });
    }
    let n_vertices = q.bundle().n_vertices();
    let n = q.bundle().rank();
    let expected_plus = q.inertia().plus;

    let mut plus_frames = Vec::with_capacity(n_vertices);
    let mut minus_frames = Vec::with_capacity(n_vertices);
    let mut eigen_gaps = Vec::with_capacity(n_vertices);
    for i in 0..n_vertices {
        let (b, lambda) =
            simultaneous_diagonalize(q.form(i), r.form(i)).map_err(|e| e.at_vertex(i))?;
        let max_abs = lambda.iter().fold(0.0_f64, |a, &x| a.max(x.abs()));
        let min_abs = lambda.iter().fold(f64::INFINITY, |a, &x| a.min(x.abs()));
        if max_abs == 0.0 || min_abs <= tol * max_abs {
            return Err(Error::DegenerateForm {
                vertex: Some(i),
                ratio: if max_abs == 0.0 {
                    0.0
                } else {
                    min_abs / max_abs
                },
                tol,
            });
        }
        let p = lambda.iter().filter(|&&x| x > 0.0).count();
        if p != expected_plus {
            return Err(Error::InconsistentInertia {
                vertex: i,
                got: (p, n - p),
                expected: (expected_plus, n - expected_plus),
            });
        }
        // eigenvalues are sorted descending, so the positive block is the
        // leading p columns
        plus_frames.push(b.columns(0, p).into_owned());
        minus_frames.push(b.columns(p, n - p).into_owned());
        eigen_gaps.push(min_abs);
    }
    let plus = SubbundleField::new(q.bundle().clone(), expected_plus, plus_frames)?;
    let minus = SubbundleField::new(q.bundle().clone(), n - expected_plus, minus_frames)?;
    let splitting = SplittingField::new(plus, minus)?;
    Ok(QSplittingResult {
        splitting,
        eigen_gaps,
    })
}

/// Check definiteness of `q` restricted to both summands of `s`.
pub fn verify_q_splitting(q: &FormField, s: &SplittingField) -> Result<SplittingReport> {
    if q.bundle() != s.bundle() {
        return Err(Error::BundleMismatch {
            what: "splitting verification",
        });
    }
    let n_vertices = q.bundle().n_vertices();
    let mut min_plus = Vec::with_capacity(n_vertices);
    let mut max_minus = Vec::with_capacity(n_vertices);
    for i in 0..n_vertices {
        let bp = s.plus().frame(i);
        if bp.ncols() == 0 {
            min_plus.push(f64::INFINITY);
        } else {
            let restricted = SymForm::symmetrized(bp.transpose() * q.form(i).mat() * bp);
            let e = sym_eigen(restricted.mat()).map_err(|e| e.at_vertex(i))?;
            min_plus.push(e.values.iter().fold(f64::INFINITY, |a, &x| a.min(x)));
        }
        let bm = s.minus().frame(i);
        if bm.ncols() == 0 {
            max_minus.push(f64::NEG_INFINITY);
        } else {
            let restricted = SymForm::symmetrized(bm.transpose() * q.form(i).mat() * bm);
            let e = sym_eigen(restricted.mat()).map_err(|e| e.at_vertex(i))?;
            max_minus.push(e.values.iter().fold(f64::NEG_INFINITY, |a, &x| a.max(x)));
        }
    }
    let pass = min_plus.iter().all(|&x| x > 0.0) && max_minus.iter().all(|&x| x < 0.0);
    Ok(SplittingReport {
        min_plus,
        max_minus,
        pass,
    })
}

/// Error out with the first failing vertex unless `s` is a q-splitting.
pub(crate) fn require_q_splitting(q: &FormField, s: &SplittingField) -> Result<()> {
    let report = verify_q_splitting(q, s)?;
    if !report.pass {
        // negated so NaN eigenvalues count as failing vertices
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        let vertex = report
            .min_plus
            .iter()
            .zip(report.max_minus.iter())
            .position(|(&mn, &mx)| !(mn > 0.0) || !(mx < 0.0))
            .unwrap_or(0);
        return Err(Error::NotQSplitting {
            vertex,
            detail: format!(
                "restricted eigenvalues min_plus = {:.3e}, max_minus = {:.3e}",
                report.min_plus[vertex], report.max_minus[vertex]
            ),
        });
    }
    Ok(())
}

/// The canonical positive reference for a q-splitting: q on the plus
/// summand, −q on the minus summand, no cross terms in the splitting basis.
///
/// For a splitting with no q-cross terms (in particular every splitting
/// produced by [`q_splitting`] or [`crate::bundle::make_form_from_splitting`]),
/// `q_splitting(q, canonical_r(q, s))` reproduces `s` up to per-vertex span
/// equality.
pub fn canonical_r(q: &FormField, s: &SplittingField) -> Result<FormField> {
    require_q_splitting(q, s)?;
    let n_vertices = q.bundle().n_vertices();
    let p = s.plus().dim();
    let m = s.minus().dim();
    let mut forms = Vec::with_capacity(n_vertices);
    for i in 0..n_vertices {
        let a = s.joint_frame(i);
        let a_inv = a.clone().try_inverse().ok_or(Error::SingularMatrix {
            what: "splitting frame",
            index: Some(i),
            rel_det: 0.0,
        })?;
        let mut block = DMatrix::zeros(p + m, p + m);
        if p > 0 {
            let bp = s.plus().frame(i);
            let qp = bp.transpose() * q.form(i).mat() * bp;
            block.view_mut((0, 0), (p, p)).copy_from(&qp);
        }
        if m > 0 {
            let bm = s.minus().frame(i);
            let qm = bm.transpose() * q.form(i).mat() * bm;
            block.view_mut((p, p), (m, m)).copy_from(&(-qm));
        }
        let r = a_inv.transpose() * block * &a_inv;
        forms.push(SymForm::symmetrized(r));
    }
    FormField::new(q.bundle().clone(), forms)
}

/// Per-vertex r-orthogonal complement of a subbundle, as a subbundle field.
pub fn complement_field(s: &SubbundleField, r: &FormField) -> Result<SubbundleField> {
    if s.bundle() != r.bundle() {
        return Err(Error::BundleMismatch {
            what: "complement inputs",
        });
    }
    if !r.inertia().is_positive_definite() {
        return Err(Error::NotPositiveDefinite {
            what: "complement metric",
            vertex: None,
            column: 0,
            pivot: f64::NAN,
        });
    }
    let n = s.bundle().rank();
    let frames = (0..s.bundle().n_vertices())
        .map(|i| r_orthogonal_complement(s.frame(i), r.form(i)).map_err(|e| e.at_vertex(i)))
        .collect::<Result<Vec<_>>>()?;
    SubbundleField::new(s.bundle().clone(), n - s.dim(), frames)
}

/// Discrete witness that the canonical splitting class does not depend on
/// the reference: the splittings along the convex path t ↦ (1−t)r0 + t·r1,
/// validated for adjacency in the time direction.
pub fn homotopy_witness_r_independence(
    q: &FormField,
    r0: &FormField,
    r1: &FormField,
    steps: usize,
) -> Result<Vec<SplittingField>> {
    if steps < 2 {
        return Err(Error::InvalidParameter {
            what: "steps",
            detail: format!("need at least 2, got {steps}"),
        });
    }
    let mut out = Vec::with_capacity(steps);
    for j in 0..steps {
        let t = j as f64 / (steps - 1) as f64;
        let r_t = interpolate_positive(r0, r1, t)?;
        out.push(q_splitting(q, &r_t)?.splitting);
    }
    for j in 0..steps - 1 {
        check_time_adjacency(&out[j], &out[j + 1], j, steps)?;
    }
    Ok(out)
}

/// Principal-angle check between consecutive splittings of a discrete
/// homotopy; both summands must stay within π/2 at every vertex.
pub fn check_time_adjacency(
    a: &SplittingField,
    b: &SplittingField,
    step: usize,
    steps: usize,
) -> Result<()> {
    for i in 0..a.bundle().n_vertices() {
        for (summand, fa, fb) in [
            ("plus", a.plus().frame(i), b.plus().frame(i)),
            ("minus", a.minus().frame(i), b.minus().frame(i)),
        ] {
            let c = min_cos_principal(fa, fb)?;
            if c <= ADJACENCY_MIN_COS {
                return Err(Error::StepTooCoarse {
                    step,
                    vertex: i,
                    detail: format!("{summand}-summand principal-angle cosine {c:.3e}"),
                    suggested_steps: 2 * steps,
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{make_form_from_splitting, DiscreteBundle};
    use crate::linalg::rel_frobenius;

    fn diag_field(n_vertices: usize, d: &[f64]) -> FormField {
        let b = DiscreteBundle::trivial(n_vertices, d.len()).unwrap();
        FormField::new(b, vec![SymForm::from_diagonal(d); n_vertices]).unwrap()
    }

    #[test]
    fn splitting_of_form_against_itself_is_total() {
        let q = diag_field(4, &[2.0, 3.0]);
        let res = q_splitting(&q, &q).unwrap();
        assert_eq!(res.splitting.plus().dim(), 2);
        assert_eq!(res.splitting.minus().dim(), 0);
        for g in &res.eigen_gaps {
            assert!((g - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn splitting_of_diagonal_indefinite() {
        let q = diag_field(4, &[1.0, -1.0]);
        let r = FormField::identity(q.bundle().clone());
        let res = q_splitting(&q, &r).unwrap();
        for i in 0..4 {
            let f = res.splitting.plus().frame(i);
            assert!(f[(1, 0)].abs() < 1e-12);
            let g = res.splitting.minus().frame(i);
            assert!(g[(0, 0)].abs() < 1e-12);
        }
        let report = verify_q_splitting(&q, &res.splitting).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn verifier_rejects_wrong_splitting() {
        let q = diag_field(4, &[1.0, 1.0]);
        let r = FormField::identity(q.bundle().clone());
        let total = q_splitting(&q, &r).unwrap().splitting;
        assert!(verify_q_splitting(&q, &total).unwrap().pass);

        // claim a minus summand on a positive definite form
        let indefinite = diag_field(4, &[1.0, -1.0]);
        let s = q_splitting(&indefinite, &r).unwrap().splitting;
        let report = verify_q_splitting(&q, &s).unwrap();
        assert!(!report.pass);
        assert!(report.max_minus.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn canonical_r_of_positive_form_is_q() {
        let q = diag_field(4, &[2.0, 5.0]);
        let s = q_splitting(&q, &FormField::identity(q.bundle().clone()))
            .unwrap()
            .splitting;
        let r = canonical_r(&q, &s).unwrap();
        for i in 0..4 {
            assert!(rel_frobenius(r.form(i).mat(), q.form(i).mat()) < 1e-10);
        }
    }

    #[test]
    fn canonical_r_of_standard_indefinite_is_identity() {
        let q = diag_field(4, &[1.0, -1.0]);
        let s = q_splitting(&q, &FormField::identity(q.bundle().clone()))
            .unwrap()
            .splitting;
        let r = canonical_r(&q, &s).unwrap();
        for i in 0..4 {
            assert!(rel_frobenius(r.form(i).mat(), &DMatrix::identity(2, 2)) < 1e-10);
        }
    }

    #[test]
    fn canonical_r_round_trip_block_construction() {
        // a splitting with no q-cross terms, at an angle to the axes
        let b = DiscreteBundle::trivial(5, 2).unwrap();
        let v = DMatrix::from_column_slice(2, 1, &[1.0, 0.5]);
        let w = DMatrix::from_column_slice(2, 1, &[-0.5, 1.0]);
        let plus = SubbundleField::new(b.clone(), 1, vec![v; 5]).unwrap();
        let minus = SubbundleField::new(b, 1, vec![w; 5]).unwrap();
        let s = SplittingField::new(plus, minus).unwrap();
        let q = make_form_from_splitting(
            &s,
            &vec![SymForm::from_diagonal(&[3.0]); 5],
            &vec![SymForm::from_diagonal(&[-2.0]); 5],
        )
        .unwrap();
        let r = canonical_r(&q, &s).unwrap();
        let recovered = q_splitting(&q, &r).unwrap().splitting;
        assert!(recovered.plus().max_sin_to(s.plus()).unwrap() < 1e-8);
        assert!(recovered.minus().max_sin_to(s.minus()).unwrap() < 1e-8);
    }

    #[test]
    fn homotopy_witness_constant_for_equal_references() {
        let q = diag_field(4, &[1.0, -1.0]);
        let r = FormField::identity(q.bundle().clone());
        let list = homotopy_witness_r_independence(&q, &r, &r, 5).unwrap();
        assert_eq!(list.len(), 5);
        for s in &list[1..] {
            assert!(s.plus().max_sin_to(list[0].plus()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn adversarial_two_step_witness_is_too_coarse() {
        // q has both axes inside its positive cone; two canonical references
        // whose plus lines are exactly orthogonal make a 2-step homotopy
        // violate the time-adjacency condition.
        let b = DiscreteBundle::trivial(4, 2).unwrap();
        let qmat = SymForm::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])).unwrap();
        let q = FormField::new(b.clone(), vec![qmat; 4]).unwrap();

        let e1 = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let w0 = DMatrix::from_column_slice(2, 1, &[-2.0, 1.0]);
        let s0 = SplittingField::new(
            SubbundleField::new(b.clone(), 1, vec![e1; 4]).unwrap(),
            SubbundleField::new(b.clone(), 1, vec![w0; 4]).unwrap(),
        )
        .unwrap();
        let e2 = DMatrix::from_column_slice(2, 1, &[0.0, 1.0]);
        let w1 = DMatrix::from_column_slice(2, 1, &[1.0, -2.0]);
        let s1 = SplittingField::new(
            SubbundleField::new(b.clone(), 1, vec![e2; 4]).unwrap(),
            SubbundleField::new(b, 1, vec![w1; 4]).unwrap(),
        )
        .unwrap();
        let r0 = canonical_r(&q, &s0).unwrap();
        let r1 = canonical_r(&q, &s1).unwrap();

        match homotopy_witness_r_independence(&q, &r0, &r1, 2) {
            Err(Error::StepTooCoarse {
                suggested_steps, ..
            }) => assert_eq!(suggested_steps, 4),
            other => panic!("expected StepTooCoarse, got {other:?}"),
        }
        // and a finer grid succeeds
        assert!(homotopy_witness_r_independence(&q, &r0, &r1, 64).is_ok());
    }

    #[test]
    fn complement_of_axis_line() {
        let b = DiscreteBundle::trivial(4, 2).unwrap();
        let e1 = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let s = SubbundleField::new(b.clone(), 1, vec![e1; 4]).unwrap();
        let r = FormField::identity(b);
        let c = complement_field(&s, &r).unwrap();
        assert_eq!(c.dim(), 1);
        for f in c.frames() {
            assert!(f[(0, 0)].abs() < 1e-12);
        }
    }
}
