//! The two complete orbit invariants in computable form: the isomorphism
//! class of the canonical splitting as summand ranks plus first
//! Stiefel–Whitney signs, and the homotopy class as a winding number (line
//! fields on the trivial rank-2 bundle) or an orientability sign.

use crate::bundle::{interpolate_positive, FormField, SplittingField, SubbundleField};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, SymForm, DEFAULT_TOL};
use crate::splitting::{check_time_adjacency, complement_field, q_splitting_with_tol};
use crate::subspace::{line_angle, min_cos_principal, minimal_half_turn};

/// Isomorphism-class data of a splitting over the circle: each summand is
/// classified by its rank and the sign of its monodromy determinant (w₁).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IsoClass {
    pub rank_plus: usize,
    pub w1_plus: i32,
    pub rank_minus: usize,
    pub w1_minus: i32,
}

impl std::fmt::Display for IsoClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "(rank+ {}, w1+ {:+}, rank- {}, w1- {:+})",
            self.rank_plus, self.w1_plus, self.rank_minus, self.w1_minus
        )
    }
}

/// Homotopy-class data of the positive summand: an integer winding number
/// where that is defined (line fields on the trivial rank-2 bundle), the
/// orientability sign otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HomotopyClass {
    Winding(i64),
    Orientability(i32),
}

impl std::fmt::Display for HomotopyClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HomotopyClass::Winding(k) => write!(f, "winding {k}"),
            HomotopyClass::Orientability(s) => write!(f, "orientability {s:+}"),
        }
    }
}

/// Half-turn count of a line field on the trivial rank-2 bundle: the sum of
/// the signed minimal angle steps around the cycle, divided by π.
///
/// The sum is an exact multiple of π for any closed line field; a deviation
/// beyond 1e-6 half-turns is reported as an error.
pub fn winding_halfturns(s: &SubbundleField) -> Result<i64> {
    if s.bundle().rank() != 2 || s.dim() != 1 {
        return Err(Error::Unsupported {
            detail: format!(
                "winding needs a line field on a rank-2 bundle, got dim {} in rank {}",
                s.dim(),
                s.bundle().rank()
            ),
        });
    }
    if !s.bundle().is_trivial() {
        return Err(Error::Unsupported {
            detail: "winding needs trivial transitions".into(),
        });
    }
    let n = s.bundle().n_vertices();
    let angles: Vec<f64> = (0..n)
        .map(|i| line_angle(s.frame(i)).map_err(|e| e.at_vertex(i)))
        .collect::<Result<Vec<_>>>()?;
    let mut total = 0.0;
    for i in 0..n {
        total += minimal_half_turn(angles[(i + 1) % n] - angles[i]);
    }
    let w = total / std::f64::consts::PI;
    let rounded = w.round();
    if (w - rounded).abs() >= 1e-6 {
        return Err(Error::ResidualTooLarge {
            what: "winding half-turn count",
            vertex: None,
            residual: (w - rounded).abs(),
            tol: 1e-6,
        });
    }
    Ok(rounded as i64)
}

/// First Stiefel–Whitney sign of a subbundle over the cycle: transport the
/// vertex-0 frame once around (transition, then orthogonal projection onto
/// the next span, expressed in its frame) and take the sign of the
/// determinant of the return map.
pub fn monodromy_w1(s: &SubbundleField) -> Result<i32> {
    let p = s.dim();
    if p == 0 {
        return Ok(1);
    }
    let n = s.bundle().n_vertices();
    let mut ret = nalgebra::DMatrix::<f64>::identity(p, p);
    for i in 0..n {
        let j = (i + 1) % n;
        let transported = s.bundle().transition(i) * s.frame(i);
        let next = s.frame(j);
        let gram = SymForm::symmetrized(next.transpose() * next);
        let chol = cholesky(gram.mat()).map_err(|e| e.at_vertex(j))?;
        let m = chol.solve(&(next.transpose() * &transported));
        if m.determinant().abs() <= 1e-12 {
            let min_cos = min_cos_principal(&transported, next)?;
            return Err(Error::AdjacencyViolation { edge: i, min_cos });
        }
        ret = m * ret;
    }
    Ok(if ret.determinant() > 0.0 { 1 } else { -1 })
}

/// The isomorphism-class invariant of a form: ranks and w₁ signs of both
/// summands of its canonical splitting (identity reference).
pub fn theta_iso(q: &FormField) -> Result<IsoClass> {
    theta_iso_with_tol(q, DEFAULT_TOL)
}

pub fn theta_iso_with_tol(q: &FormField, tol: f64) -> Result<IsoClass> {
    let r = FormField::identity(q.bundle().clone());
    let split = q_splitting_with_tol(q, &r, tol)?.splitting;
    Ok(IsoClass {
        rank_plus: split.plus().dim(),
        w1_plus: monodromy_w1(split.plus())?,
        rank_minus: split.minus().dim(),
        w1_minus: monodromy_w1(split.minus())?,
    })
}

/// The class of a single subbundle in the finest invariant available to it:
/// winding for line fields on the trivial rank-2 bundle, w₁ otherwise.
pub fn subbundle_class(s: &SubbundleField) -> Result<HomotopyClass> {
    if s.bundle().rank() == 2 && s.dim() == 1 && s.bundle().is_trivial() {
        Ok(HomotopyClass::Winding(winding_halfturns(s)?))
    } else {
        Ok(HomotopyClass::Orientability(monodromy_w1(s)?))
    }
}

/// The homotopy-class invariant of a form: the class of the positive
/// summand of its canonical splitting (identity reference).
pub fn theta_homotopy(q: &FormField) -> Result<HomotopyClass> {
    theta_homotopy_with_tol(q, DEFAULT_TOL)
}

pub fn theta_homotopy_with_tol(q: &FormField, tol: f64) -> Result<HomotopyClass> {
    let r = FormField::identity(q.bundle().clone());
    let split = q_splitting_with_tol(q, &r, tol)?.splitting;
    subbundle_class(split.plus())
}

/// Report of [`complement_homotopy_determination`].
#[derive(Debug, Clone)]
pub struct ComplementReport {
    /// Class of the r0-orthogonal complement of the fixed subbundle.
    pub class0: HomotopyClass,
    /// Class of the r1-orthogonal complement.
    pub class1: HomotopyClass,
    pub equal: bool,
    /// Splittings (s0, complement_t) along the reference interpolation.
    pub witness: Vec<SplittingField>,
}

/// The complement of a fixed subbundle with respect to two positive
/// reference fields determines the same homotopy data: computes both
/// complements, their classes, and the discrete homotopy between the two
/// splittings along t ↦ (1−t)r0 + t·r1.
pub fn complement_homotopy_determination(
    s0: &SubbundleField,
    r0: &FormField,
    r1: &FormField,
    steps: usize,
) -> Result<ComplementReport> {
    if steps < 2 {
        return Err(Error::InvalidParameter {
            what: "steps",
            detail: format!("need at least 2, got {steps}"),
        });
    }
    let mut witness = Vec::with_capacity(steps);
    for j in 0..steps {
        let t = j as f64 / (steps - 1) as f64;
        let r_t = interpolate_positive(r0, r1, t)?;
        let comp = complement_field(s0, &r_t)?;
        witness.push(SplittingField::new(s0.clone(), comp)?);
    }
    for j in 0..steps - 1 {
        check_time_adjacency(&witness[j], &witness[j + 1], j, steps)?;
    }
    let class0 = subbundle_class(witness[0].minus())?;
    let class1 = subbundle_class(witness[steps - 1].minus())?;
    Ok(ComplementReport {
        class0,
        class1,
        equal: class0 == class1,
        witness,
    })
}
