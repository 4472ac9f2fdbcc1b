//! Explicit gauge isometries between forms sharing a splitting, with
//! discrete path witnesses of membership in the identity component, and the
//! orbit-connection decision procedure built on the invariants.
//!
//! The positive definite engine is the square-root construction: the
//! endpoint φ = √L where L = q1⁻¹·q0, and the path t ↦ √L_{q_t q0} along
//! the convex interpolation q_t. Indefinite pairs are handled blockwise on
//! a common splitting.

use nalgebra::DMatrix;

use crate::bundle::{gauge_act, interpolate_positive, FormField, GaugeField, SplittingField};
use crate::error::{Error, Result};
use crate::invariants::{theta_homotopy, theta_iso, HomotopyClass, IsoClass};
use crate::linalg::{
    operator_l, rel_frobenius, spd_sqrt, spectral_norm, Inertia, SymForm, DEFAULT_TOL, RESIDUAL_TOL,
};
use crate::splitting::{q_splitting, require_q_splitting};
use crate::subspace::{line_angle, minimal_half_turn};

/// Entrywise tolerance for the identity start of a path witness.
pub const WITNESS_IDENTITY_TOL: f64 = 1e-14;

/// Largest admissible per-vertex operator-norm gap between consecutive path
/// entries.
pub const WITNESS_STEP_MAX: f64 = 0.5;

/// Smallest admissible |det| along a path witness.
pub const WITNESS_MIN_DET: f64 = 1e-10;

/// Span-equality threshold (largest principal-angle sine) under which two
/// splittings are treated as the same splitting.
pub const SPAN_EQUALITY_MAX_SIN: f64 = 1e-8;

/// A gauge transformation together with a discrete path from the identity:
/// the witness of membership in the identity component.
#[derive(Debug, Clone)]
pub struct Gau0Witness {
    endpoint: GaugeField,
    path: Vec<GaugeField>,
    min_det: f64,
}

impl Gau0Witness {
    /// Validate and package a discrete path. The path must start at the
    /// identity, move by less than [`WITNESS_STEP_MAX`] in operator norm per
    /// vertex per step, and stay uniformly invertible.
    pub fn from_path(path: Vec<GaugeField>) -> Result<Gau0Witness> {
        if path.len() < 2 {
            return Err(Error::InvalidParameter {
                what: "witness path",
                detail: format!("need at least 2 entries, got {}", path.len()),
            });
        }
        let bundle = path[0].bundle().clone();
        let n = bundle.rank();
        let id = DMatrix::<f64>::identity(n, n);
        for (i, m) in path[0].maps().iter().enumerate() {
            let dev = crate::linalg::max_abs(&(m - &id));
            if dev >= WITNESS_IDENTITY_TOL {
                return Err(Error::ResidualTooLarge {
                    what: "witness path start",
                    vertex: Some(i),
                    residual: dev,
                    tol: WITNESS_IDENTITY_TOL,
                });
            }
        }
        let steps = path.len();
        for j in 0..steps - 1 {
            if path[j + 1].bundle() != &bundle {
                return Err(Error::BundleMismatch {
                    what: "witness path entries",
                });
            }
            for i in 0..bundle.n_vertices() {
                let gap = spectral_norm(&(path[j + 1].map(i) - path[j].map(i)));
                if gap >= WITNESS_STEP_MAX {
                    return Err(Error::StepTooCoarse {
                        step: j,
                        vertex: i,
                        detail: format!("operator-norm gap {gap:.3e}"),
                        suggested_steps: 2 * steps,
                    });
                }
            }
        }
        let min_det = path
            .iter()
            .map(|g| g.min_abs_det())
            .fold(f64::INFINITY, f64::min);
        if min_det <= WITNESS_MIN_DET {
            return Err(Error::SingularMatrix {
                what: "witness path entry",
                index: None,
                rel_det: min_det,
            });
        }
        let endpoint = path[steps - 1].clone();
        Ok(Gau0Witness {
            endpoint,
            path,
            min_det,
        })
    }

    pub fn endpoint(&self) -> &GaugeField {
        &self.endpoint
    }

    pub fn path(&self) -> &[GaugeField] {
        &self.path
    }

    pub fn min_det(&self) -> f64 {
        self.min_det
    }

    /// Re-run the construction-time validity checks.
    pub fn validate(&self) -> Result<()> {
        let revalidated = Gau0Witness::from_path(self.path.clone())?;
        if revalidated.endpoint != self.endpoint {
            return Err(Error::InvalidParameter {
                what: "witness endpoint",
                detail: "does not match the last path entry".into(),
            });
        }
        Ok(())
    }
}

fn check_positive(q: &FormField, what: &'static str) -> Result<()> {
    if q.inertia().is_positive_definite() {
        Ok(())
    } else {
        Err(Error::NotPositiveDefinite {
            what,
            vertex: None,
            column: 0,
            pivot: f64::NAN,
        })
    }
}

fn endpoint_residual(q0: &FormField, q1: &FormField, phi: &GaugeField) -> Result<f64> {
    let image = gauge_act(q1, phi)?;
    let mut worst = 0.0_f64;
    for i in 0..q0.bundle().n_vertices() {
        worst = worst.max(rel_frobenius(image.form(i).mat(), q0.form(i).mat()));
    }
    Ok(worst)
}

fn verified(q0: &FormField, q1: &FormField, witness: Gau0Witness) -> Result<Gau0Witness> {
    let resid = endpoint_residual(q0, q1, witness.endpoint())?;
    if resid > RESIDUAL_TOL {
        return Err(Error::ResidualTooLarge {
            what: "isometry",
            vertex: None,
            residual: resid,
            tol: RESIDUAL_TOL,
        });
    }
    Ok(witness)
}

/// The gauge isometry between two positive definite fields: endpoint
/// φ_i = √(q1_i⁻¹·q0_i) with gauge_act(q1, φ) = q0, and the discrete path
/// of square roots along the convex interpolation as the Gau₀ witness.
pub fn isometry_positive(q0: &FormField, q1: &FormField, steps: usize) -> Result<Gau0Witness> {
    check_positive(q0, "first form field")?;
    check_positive(q1, "second form field")?;
    if steps < 2 {
        return Err(Error::InvalidParameter {
            what: "steps",
            detail: format!("need at least 2, got {steps}"),
        });
    }
    let n_vertices = q0.bundle().n_vertices();
    let mut path = Vec::with_capacity(steps);
    for j in 0..steps {
        let t = j as f64 / (steps - 1) as f64;
        let q_t = interpolate_positive(q0, q1, t)?;
        let mut maps = Vec::with_capacity(n_vertices);
        for i in 0..n_vertices {
            let l = operator_l(q_t.form(i), q0.form(i)).map_err(|e| e.at_vertex(i))?;
            let phi = spd_sqrt(&l, q_t.form(i), DEFAULT_TOL).map_err(|e| e.at_vertex(i))?;
            maps.push(phi);
        }
        path.push(GaugeField::new(q0.bundle().clone(), maps)?);
    }
    verified(q0, q1, Gau0Witness::from_path(path)?)
}

fn negated(q: &FormField) -> Result<FormField> {
    let forms = q
        .forms()
        .iter()
        .map(|f| SymForm::symmetrized(-f.mat()))
        .collect();
    FormField::new(q.bundle().clone(), forms)
}

/// The blockwise gauge isometry for two forms sharing the splitting `s`
/// (which must be a q-splitting for both, with no cross terms): the square
/// root engine runs on the plus restrictions and the negated minus
/// restrictions in frame coordinates, and the blocks are conjugated back to
/// the charts by the frame matrix A_i = [B⁺|B⁻].
pub fn isometry_general(
    q0: &FormField,
    q1: &FormField,
    s: &SplittingField,
    steps: usize,
) -> Result<Gau0Witness> {
    if q0.bundle() != q1.bundle() || q0.bundle() != s.bundle() {
        return Err(Error::BundleMismatch {
            what: "isometry inputs",
        });
    }
    if steps < 2 {
        return Err(Error::InvalidParameter {
            what: "steps",
            detail: format!("need at least 2, got {steps}"),
        });
    }
    require_q_splitting(q0, s)?;
    require_q_splitting(q1, s)?;

    let n_vertices = q0.bundle().n_vertices();
    let p = s.plus().dim();
    let m = s.minus().dim();

    // restrictions in frame coordinates, minus block negated to be positive
    let mut plus0 = Vec::with_capacity(n_vertices);
    let mut plus1 = Vec::with_capacity(n_vertices);
    let mut minus0 = Vec::with_capacity(n_vertices);
    let mut minus1 = Vec::with_capacity(n_vertices);
    for i in 0..n_vertices {
        let bp = s.plus().frame(i);
        let bm = s.minus().frame(i);
        plus0.push(SymForm::symmetrized(bp.transpose() * q0.form(i).mat() * bp));
        plus1.push(SymForm::symmetrized(bp.transpose() * q1.form(i).mat() * bp));
        minus0.push(SymForm::symmetrized(
            -(bm.transpose() * q0.form(i).mat() * bm),
        ));
        minus1.push(SymForm::symmetrized(
            -(bm.transpose() * q1.form(i).mat() * bm),
        ));
    }

    let mut path = Vec::with_capacity(steps);
    for j in 0..steps {
        let t = j as f64 / (steps - 1) as f64;
        let mut maps = Vec::with_capacity(n_vertices);
        for i in 0..n_vertices {
            let mut block = DMatrix::<f64>::zeros(p + m, p + m);
            if p > 0 {
                let interp = SymForm::symmetrized(plus0[i].mat() * (1.0 - t) + plus1[i].mat() * t);
                let l = operator_l(&interp, &plus0[i]).map_err(|e| e.at_vertex(i))?;
                let phi = spd_sqrt(&l, &interp, DEFAULT_TOL).map_err(|e| e.at_vertex(i))?;
                block.view_mut((0, 0), (p, p)).copy_from(&phi);
            }
            if m > 0 {
                let interp =
                    SymForm::symmetrized(minus0[i].mat() * (1.0 - t) + minus1[i].mat() * t);
                let l = operator_l(&interp, &minus0[i]).map_err(|e| e.at_vertex(i))?;
                let phi = spd_sqrt(&l, &interp, DEFAULT_TOL).map_err(|e| e.at_vertex(i))?;
                block.view_mut((p, p), (m, m)).copy_from(&phi);
            }
            let a = s.joint_frame(i);
            let a_inv = a.clone().try_inverse().ok_or(Error::SingularMatrix {
                what: "splitting frame",
                index: Some(i),
                rel_det: 0.0,
            })?;
            maps.push(&a * block * &a_inv);
        }
        path.push(GaugeField::new(q0.bundle().clone(), maps)?);
    }
    verified(q0, q1, Gau0Witness::from_path(path)?)
}

/// How [`orbit_connect`] is allowed to move forms around.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectMode {
    /// The whole gauge group: connected exactly when the isomorphism
    /// invariants agree.
    Full,
    /// The identity component only: connected exactly when the homotopy
    /// invariants agree, and the connection carries a path witness.
    Restricted,
}

/// A successful orbit connection.
#[derive(Debug, Clone)]
pub enum Connection {
    /// A gauge field c with gauge_act(q1, c) = q0.
    Full(GaugeField),
    /// A witnessed identity-component element with the same property.
    Restricted(Gau0Witness),
}

/// Why two forms are certified as lying on different orbits.
#[derive(Debug, Clone)]
pub struct Obstruction {
    pub inertia0: Inertia,
    pub inertia1: Inertia,
    pub iso0: IsoClass,
    pub iso1: IsoClass,
    pub homotopy0: HomotopyClass,
    pub homotopy1: HomotopyClass,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub enum OrbitOutcome {
    Connected(Connection),
    NotConnected(Box<Obstruction>),
}

fn rotation(a: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[a.cos(), -a.sin(), a.sin(), a.cos()])
}

/// Decide whether two form fields lie on the same gauge orbit (full mode)
/// or the same identity-component orbit (restricted mode), and construct
/// the connecting element when they do.
///
/// A `NotConnected` outcome is a certified negative: the complete
/// invariants of the two forms differ. Restricted-mode connections are
/// constructed for positive or negative definite pairs, pairs whose
/// canonical splittings agree as spans, and line-type splittings on the
/// trivial rank-2 bundle (aligned by a rotation field); other matching
/// configurations report `Unsupported`.
pub fn orbit_connect(
    q0: &FormField,
    q1: &FormField,
    mode: ConnectMode,
    steps: usize,
) -> Result<OrbitOutcome> {
    if q0.bundle() != q1.bundle() {
        return Err(Error::BundleMismatch {
            what: "orbit endpoints",
        });
    }
    let inertia0 = q0.inertia();
    let inertia1 = q1.inertia();
    let iso0 = theta_iso(q0)?;
    let iso1 = theta_iso(q1)?;
    let homotopy0 = theta_homotopy(q0)?;
    let homotopy1 = theta_homotopy(q1)?;
    let obstruction = |reason: String| -> OrbitOutcome {
        OrbitOutcome::NotConnected(Box::new(Obstruction {
            inertia0,
            inertia1,
            iso0,
            iso1,
            homotopy0,
            homotopy1,
            reason,
        }))
    };
    if inertia0 != inertia1 {
        return Ok(obstruction(format!(
            "inertia mismatch: {inertia0} vs {inertia1}"
        )));
    }
    match mode {
        ConnectMode::Full => {
            if iso0 != iso1 {
                return Ok(obstruction(format!(
                    "isomorphism class mismatch: {iso0} vs {iso1}"
                )));
            }
            let r = FormField::identity(q0.bundle().clone());
            let s0 = q_splitting(q0, &r)?.splitting;
            let s1 = q_splitting(q1, &r)?.splitting;
            let mut maps = Vec::with_capacity(q0.bundle().n_vertices());
            for i in 0..q0.bundle().n_vertices() {
                let a0 = s0.joint_frame(i);
                let mut a1 = s1.joint_frame(i);
                // frame column signs are free (only the spans matter), so
                // orient a1 to make the alignment preserve orientation
                if a0.determinant() * a1.determinant() < 0.0 {
                    let last = a1.ncols() - 1;
                    a1.column_mut(last).scale_mut(-1.0);
                }
                let a0_inv = a0.clone().try_inverse().ok_or(Error::SingularMatrix {
                    what: "splitting frame",
                    index: Some(i),
                    rel_det: 0.0,
                })?;
                maps.push(&a1 * a0_inv);
            }
            let f = GaugeField::new(q0.bundle().clone(), maps)?;
            let pulled = gauge_act(q1, &f)?;
            let g = isometry_general(q0, &pulled, &s0, steps)?;
            let composite = f.compose(g.endpoint())?;
            let resid = endpoint_residual(q0, q1, &composite)?;
            if resid > RESIDUAL_TOL {
                return Err(Error::ResidualTooLarge {
                    what: "orbit connector",
                    vertex: None,
                    residual: resid,
                    tol: RESIDUAL_TOL,
                });
            }
            Ok(OrbitOutcome::Connected(Connection::Full(composite)))
        }
        ConnectMode::Restricted => {
            if homotopy0 != homotopy1 {
                return Ok(obstruction(format!(
                    "homotopy class mismatch: {homotopy0} vs {homotopy1}"
                )));
            }
            // definite pairs: the square-root engine applies directly
            if inertia0.is_positive_definite() {
                let w = isometry_positive(q0, q1, steps)?;
                return Ok(OrbitOutcome::Connected(Connection::Restricted(w)));
            }
            if inertia0.plus == 0 {
                let n0 = negated(q0)?;
                let n1 = negated(q1)?;
                let w = isometry_positive(&n0, &n1, steps)?;
                return Ok(OrbitOutcome::Connected(Connection::Restricted(verified(
                    q0, q1, w,
                )?)));
            }
            let r = FormField::identity(q0.bundle().clone());
            let s0 = q_splitting(q0, &r)?.splitting;
            let s1 = q_splitting(q1, &r)?.splitting;
            // same splitting: no alignment needed
            if s0.plus().max_sin_to(s1.plus())? < SPAN_EQUALITY_MAX_SIN
                && s0.minus().max_sin_to(s1.minus())? < SPAN_EQUALITY_MAX_SIN
            {
                let w = isometry_general(q0, q1, &s0, steps)?;
                return Ok(OrbitOutcome::Connected(Connection::Restricted(w)));
            }
            // line splittings on the trivial rank-2 bundle: align by the
            // rotation field lifting the angle difference of the plus lines
            if q0.bundle().rank() == 2
                && inertia0 == (Inertia { plus: 1, minus: 1 })
                && q0.bundle().is_trivial()
            {
                let n_vertices = q0.bundle().n_vertices();
                let mut rho = Vec::with_capacity(n_vertices);
                let mut prev_diff = 0.0;
                let mut lifted = 0.0;
                for i in 0..n_vertices {
                    let t0 = line_angle(s0.plus().frame(i)).map_err(|e| e.at_vertex(i))?;
                    let t1 = line_angle(s1.plus().frame(i)).map_err(|e| e.at_vertex(i))?;
                    let diff = t1 - t0;
                    if i == 0 {
                        lifted = minimal_half_turn(diff);
                    } else {
                        lifted += minimal_half_turn(diff - prev_diff);
                    }
                    prev_diff = diff;
                    rho.push(lifted);
                }
                // loop closure is guaranteed by the equal windings
                let closure = minimal_half_turn(
                    (line_angle(s1.plus().frame(0))? - line_angle(s0.plus().frame(0))?) - prev_diff,
                );
                if (rho[0] - (rho[n_vertices - 1] + closure)).abs() > 1e-6 {
                    return Err(Error::ResidualTooLarge {
                        what: "rotation lift closure",
                        vertex: None,
                        residual: (rho[0] - (rho[n_vertices - 1] + closure)).abs(),
                        tol: 1e-6,
                    });
                }
                let mut align_path = Vec::with_capacity(steps);
                for j in 0..steps {
                    let t = j as f64 / (steps - 1) as f64;
                    let maps = rho.iter().map(|&a| rotation(t * a)).collect();
                    align_path.push(GaugeField::new(q0.bundle().clone(), maps)?);
                }
                let f = align_path[steps - 1].clone();
                let pulled = gauge_act(q1, &f)?;
                let g = isometry_general(q0, &pulled, &s0, steps)?;
                let mut path = align_path;
                for entry in g.path().iter().skip(1) {
                    path.push(f.compose(entry)?);
                }
                let w = Gau0Witness::from_path(path)?;
                return Ok(OrbitOutcome::Connected(Connection::Restricted(verified(
                    q0, q1, w,
                )?)));
            }
            Err(Error::Unsupported {
                detail: format!(
                    "restricted connection for inertia {inertia0} with non-aligned splittings \
                     on this bundle has no certified construction here"
                ),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{
        make_form_from_splitting, make_line_bundle_lk, DiscreteBundle, SubbundleField,
    };
    use crate::splitting::complement_field;

    fn uniform_field(n_vertices: usize, d: &[f64]) -> FormField {
        let b = DiscreteBundle::trivial(n_vertices, d.len()).unwrap();
        FormField::new(b, vec![SymForm::from_diagonal(d); n_vertices]).unwrap()
    }

    fn lk_form(n: usize, k: i64) -> FormField {
        let plus = make_line_bundle_lk(n, k).unwrap();
        let r = FormField::identity(plus.bundle().clone());
        let minus = complement_field(&plus, &r).unwrap();
        let s = SplittingField::new(plus, minus).unwrap();
        make_form_from_splitting(
            &s,
            &vec![SymForm::from_diagonal(&[1.0]); n],
            &vec![SymForm::from_diagonal(&[-1.0]); n],
        )
        .unwrap()
    }

    #[test]
    fn identity_isometry_for_equal_fields() {
        let q = uniform_field(4, &[2.0, 3.0]);
        let w = isometry_positive(&q, &q, 4).unwrap();
        for m in w.endpoint().maps() {
            assert!(rel_frobenius(m, &DMatrix::identity(2, 2)) < 1e-12);
        }
        assert!(w.min_det() > 0.9);
    }

    #[test]
    fn rank_one_sqrt_ratio() {
        let q0 = uniform_field(5, &[4.0]);
        let q1 = uniform_field(5, &[1.0]);
        let w = isometry_positive(&q0, &q1, 8).unwrap();
        for m in w.endpoint().maps() {
            assert!((m[(0, 0)] - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn positive_endpoints_are_mutually_inverse() {
        let q0 = uniform_field(4, &[2.0, 5.0]);
        let q1 = uniform_field(4, &[3.0, 1.0]);
        let w01 = isometry_positive(&q0, &q1, 16).unwrap();
        let w10 = isometry_positive(&q1, &q0, 16).unwrap();
        for (a, b) in w01
            .endpoint()
            .maps()
            .iter()
            .zip(w10.endpoint().maps().iter())
        {
            assert!(rel_frobenius(&(a * b), &DMatrix::identity(2, 2)) < 1e-8);
        }
    }

    #[test]
    fn coarse_path_is_rejected_with_suggestion() {
        let q0 = uniform_field(3, &[1.0]);
        let q1 = uniform_field(3, &[100.0]);
        match isometry_positive(&q0, &q1, 2) {
            Err(Error::StepTooCoarse {
                suggested_steps, ..
            }) => assert_eq!(suggested_steps, 4),
            other => panic!("expected StepTooCoarse, got {other:?}"),
        }
        assert!(isometry_positive(&q0, &q1, 64).is_ok());
    }

    #[test]
    fn general_isometry_blockwise_scaling() {
        let q0 = uniform_field(4, &[1.0, -1.0]);
        let q1 = uniform_field(4, &[9.0, -4.0]);
        let r = FormField::identity(q0.bundle().clone());
        let s = q_splitting(&q0, &r).unwrap().splitting;
        let w = isometry_general(&q0, &q1, &s, 16).unwrap();
        // gauge_act(q1, phi) = q0 forces phi = diag(1/3, 1/2)
        for m in w.endpoint().maps() {
            assert!((m[(0, 0)] - 1.0 / 3.0).abs() < 1e-10);
            assert!((m[(1, 1)] - 0.5).abs() < 1e-10);
            assert!(m[(0, 1)].abs() < 1e-12);
            assert!(m[(1, 0)].abs() < 1e-12);
        }
    }

    #[test]
    fn orbit_identity_case() {
        let q = lk_form(16, 0);
        match orbit_connect(&q, &q, ConnectMode::Restricted, 8).unwrap() {
            OrbitOutcome::Connected(Connection::Restricted(w)) => {
                for m in w.endpoint().maps() {
                    assert!(rel_frobenius(m, &DMatrix::identity(2, 2)) < 1e-9);
                }
            }
            other => panic!("expected restricted connection, got {other:?}"),
        }
    }

    #[test]
    fn orbit_separates_l0_l2_restricted_but_not_full() {
        let q0 = lk_form(32, 0);
        let q2 = lk_form(32, 2);
        match orbit_connect(&q0, &q2, ConnectMode::Restricted, 16).unwrap() {
            OrbitOutcome::NotConnected(obs) => {
                assert_eq!(obs.iso0, obs.iso1);
                assert_eq!(obs.homotopy0, HomotopyClass::Winding(0));
                assert_eq!(obs.homotopy1, HomotopyClass::Winding(2));
            }
            other => panic!("expected NotConnected, got {other:?}"),
        }
        match orbit_connect(&q0, &q2, ConnectMode::Full, 16).unwrap() {
            OrbitOutcome::Connected(Connection::Full(c)) => {
                let image = gauge_act(&q2, &c).unwrap();
                for i in 0..32 {
                    assert!(rel_frobenius(image.form(i).mat(), q0.form(i).mat()) < 1e-9);
                }
                // the aligning part is orthogonal: frames are orthonormal
                for m in c.maps() {
                    let g = m.transpose() * m;
                    // c = f·g with g blockwise positive; for these unit
                    // blocks g is the identity and c is the rotation f
                    assert!(rel_frobenius(&g, &DMatrix::identity(2, 2)) < 1e-9);
                    assert!(m.determinant() > 0.0, "connector must be a rotation");
                }
            }
            other => panic!("expected full connection, got {other:?}"),
        }
    }

    #[test]
    fn orbit_separates_l0_l1_fully() {
        let q0 = lk_form(32, 0);
        let q1 = lk_form(32, 1);
        match orbit_connect(&q0, &q1, ConnectMode::Full, 16).unwrap() {
            OrbitOutcome::NotConnected(obs) => {
                assert_ne!(obs.iso0, obs.iso1);
            }
            other => panic!("expected NotConnected, got {other:?}"),
        }
    }

    #[test]
    fn restricted_connects_equal_winding_line_forms() {
        // two different line splittings with the same winding: l2 built on
        // 32 vertices vs the same construction rotated by a constant angle
        let q2 = lk_form(32, 2);
        let plus = make_line_bundle_lk(32, 2).unwrap();
        let b = plus.bundle().clone();
        let rot = rotation(0.7);
        let rotated_frames: Vec<DMatrix<f64>> = plus.frames().iter().map(|f| &rot * f).collect();
        let plus_rot = SubbundleField::new(b.clone(), 1, rotated_frames).unwrap();
        let r = FormField::identity(b);
        let minus_rot = complement_field(&plus_rot, &r).unwrap();
        let s_rot = SplittingField::new(plus_rot, minus_rot).unwrap();
        let q2_rot = make_form_from_splitting(
            &s_rot,
            &vec![SymForm::from_diagonal(&[1.0]); 32],
            &vec![SymForm::from_diagonal(&[-1.0]); 32],
        )
        .unwrap();
        match orbit_connect(&q2, &q2_rot, ConnectMode::Restricted, 16).unwrap() {
            OrbitOutcome::Connected(Connection::Restricted(w)) => {
                w.validate().unwrap();
                let image = gauge_act(&q2_rot, w.endpoint()).unwrap();
                for i in 0..32 {
                    assert!(rel_frobenius(image.form(i).mat(), q2.form(i).mat()) < 1e-9);
                }
            }
            other => panic!("expected restricted connection, got {other:?}"),
        }
    }
}
