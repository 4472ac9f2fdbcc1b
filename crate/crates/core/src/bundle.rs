//! Discrete model of rank-n real vector bundles over a circle: a cycle of
//! charts with one invertible transition matrix per directed edge, plus the
//! per-vertex fields living on such a bundle (quadratic forms, gauge
//! transformations, subbundles, splittings) and the gauge action.
//!
//! Forms and frames are stored in each vertex's own chart; transitions enter
//! only when neighbouring vertices are compared. Continuity of a subbundle
//! across an edge is replaced by the quantitative adjacency condition: all
//! principal angles between the transported span and the next span stay
//! below π/2.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, cholesky, sym_eigen, Inertia, SymForm, DEFAULT_TOL};
use crate::subspace::min_cos_principal;

/// Smallest admissible principal-angle cosine across an edge; positive means
/// strictly below π/2.
pub const ADJACENCY_MIN_COS: f64 = 1e-9;

/// Frames must have smallest singular value above this ratio of the largest.
pub const FRAME_RANK_RATIO: f64 = 1e-10;

/// Absolute determinant threshold for transitions and gauge maps.
pub const INVERTIBILITY_MIN_DET: f64 = 1e-12;

/// Discretized circle: N vertices, edges i → i+1 mod N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleBase {
    n_vertices: usize,
}

impl CycleBase {
    pub fn new(n_vertices: usize) -> Result<CycleBase> {
        if n_vertices < 3 {
            return Err(Error::SamplingTooCoarse {
                n_vertices,
                required: 2,
            });
        }
        Ok(CycleBase { n_vertices })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }
}

/// A Čech-cocycle surrogate: `transitions[i]` changes coordinates from
/// vertex i's chart to vertex (i+1)'s chart on their shared edge.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBundle {
    base: CycleBase,
    rank: usize,
    transitions: Vec<DMatrix<f64>>,
}

impl DiscreteBundle {
    pub fn new(
        base: CycleBase,
        rank: usize,
        transitions: Vec<DMatrix<f64>>,
    ) -> Result<Arc<DiscreteBundle>> {
        if rank == 0 {
            return Err(Error::InvalidParameter {
                what: "bundle rank",
                detail: "must be at least 1".into(),
            });
        }
        let n_vertices = base.n_vertices();
        if transitions.len() != n_vertices {
            return Err(Error::DimensionMismatch {
                what: "transition count",
                expected: n_vertices,
                got: transitions.len(),
            });
        }
        for (i, t) in transitions.iter().enumerate() {
            if t.nrows() != rank || t.ncols() != rank {
                return Err(Error::DimensionMismatch {
                    what: "transition matrix",
                    expected: rank,
                    got: t.nrows().max(t.ncols()),
                });
            }
            let det = t.determinant().abs();
            if det <= INVERTIBILITY_MIN_DET {
                return Err(Error::SingularMatrix {
                    what: "transition",
                    index: Some(i),
                    rel_det: det,
                });
            }
        }
        Ok(Arc::new(DiscreteBundle {
            base,
            rank,
            transitions,
        }))
    }

    /// The trivial bundle: all transitions are the identity.
    pub fn trivial(n_vertices: usize, rank: usize) -> Result<Arc<DiscreteBundle>> {
        let base = CycleBase::new(n_vertices)?;
        let transitions = vec![DMatrix::identity(rank, rank); n_vertices];
        DiscreteBundle::new(base, rank, transitions)
    }

    pub fn base(&self) -> &CycleBase {
        &self.base
    }

    pub fn n_vertices(&self) -> usize {
        self.base.n_vertices()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn transitions(&self) -> &[DMatrix<f64>] {
        &self.transitions
    }

    pub fn transition(&self, edge: usize) -> &DMatrix<f64> {
        &self.transitions[edge % self.n_vertices()]
    }

    /// True when every transition is entrywise within 1e-12 of the identity.
    pub fn is_trivial(&self) -> bool {
        let id = DMatrix::identity(self.rank, self.rank);
        self.transitions
            .iter()
            .all(|t| linalg::max_abs(&(t - &id)) < 1e-12)
    }
}

fn check_same_bundle(
    a: &Arc<DiscreteBundle>,
    b: &Arc<DiscreteBundle>,
    what: &'static str,
) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::BundleMismatch { what })
    }
}

/// One non-degenerate quadratic form per vertex, all of the same inertia.
#[derive(Debug, Clone, PartialEq)]
pub struct FormField {
    bundle: Arc<DiscreteBundle>,
    forms: Vec<SymForm>,
    inertia: Inertia,
}

impl FormField {
    pub fn new(bundle: Arc<DiscreteBundle>, forms: Vec<SymForm>) -> Result<FormField> {
        FormField::new_with_tol(bundle, forms, DEFAULT_TOL)
    }

    pub fn new_with_tol(
        bundle: Arc<DiscreteBundle>,
        forms: Vec<SymForm>,
        tol: f64,
    ) -> Result<FormField> {
        if forms.len() != bundle.n_vertices() {
            return Err(Error::DimensionMismatch {
                what: "form count",
                expected: bundle.n_vertices(),
                got: forms.len(),
            });
        }
        for (i, f) in forms.iter().enumerate() {
            if f.dim() != bundle.rank() {
                return Err(Error::DimensionMismatch {
                    what: "form dimension",
                    expected: bundle.rank(),
                    got: f.dim(),
                });
            }
            let _ = linalg::inertia(f, tol).map_err(|e| e.at_vertex(i))?;
        }
        let common = forms_inertia(&forms, tol)?;
        Ok(FormField {
            bundle,
            forms,
            inertia: common,
        })
    }

    /// The all-identity positive definite field.
    pub fn identity(bundle: Arc<DiscreteBundle>) -> FormField {
        let n = bundle.rank();
        let forms = vec![SymForm::identity(n); bundle.n_vertices()];
        let inertia = Inertia { plus: n, minus: 0 };
        FormField {
            bundle,
            forms,
            inertia,
        }
    }

    pub fn bundle(&self) -> &Arc<DiscreteBundle> {
        &self.bundle
    }

    pub fn forms(&self) -> &[SymForm] {
        &self.forms
    }

    pub fn form(&self, vertex: usize) -> &SymForm {
        &self.forms[vertex]
    }

    /// Inertia recorded at construction time.
    pub fn inertia(&self) -> Inertia {
        self.inertia
    }
}

fn forms_inertia(forms: &[SymForm], tol: f64) -> Result<Inertia> {
    let first = linalg::inertia(&forms[0], tol).map_err(|e| e.at_vertex(0))?;
    for (i, f) in forms.iter().enumerate().skip(1) {
        let here = linalg::inertia(f, tol).map_err(|e| e.at_vertex(i))?;
        if here != first {
            return Err(Error::InconsistentInertia {
                vertex: i,
                got: (here.plus, here.minus),
                expected: (first.plus, first.minus),
            });
        }
    }
    Ok(first)
}

/// The common inertia of a form field, recomputed per vertex.
pub fn field_inertia(q: &FormField) -> Result<Inertia> {
    field_inertia_with_tol(q, DEFAULT_TOL)
}

pub fn field_inertia_with_tol(q: &FormField, tol: f64) -> Result<Inertia> {
    forms_inertia(q.forms(), tol)
}

/// A discretized gauge transformation: one invertible matrix per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField {
    bundle: Arc<DiscreteBundle>,
    maps: Vec<DMatrix<f64>>,
}

impl GaugeField {
    pub fn new(bundle: Arc<DiscreteBundle>, maps: Vec<DMatrix<f64>>) -> Result<GaugeField> {
        if maps.len() != bundle.n_vertices() {
            return Err(Error::DimensionMismatch {
                what: "gauge map count",
                expected: bundle.n_vertices(),
                got: maps.len(),
            });
        }
        for (i, m) in maps.iter().enumerate() {
            if m.nrows() != bundle.rank() || m.ncols() != bundle.rank() {
                return Err(Error::DimensionMismatch {
                    what: "gauge map",
                    expected: bundle.rank(),
                    got: m.nrows().max(m.ncols()),
                });
            }
            let det = m.determinant().abs();
            if det <= INVERTIBILITY_MIN_DET {
                return Err(Error::SingularMatrix {
                    what: "gauge map",
                    index: Some(i),
                    rel_det: det,
                });
            }
        }
        Ok(GaugeField { bundle, maps })
    }

    pub fn identity(bundle: Arc<DiscreteBundle>) -> GaugeField {
        let n = bundle.rank();
        let maps = vec![DMatrix::identity(n, n); bundle.n_vertices()];
        GaugeField { bundle, maps }
    }

    pub fn bundle(&self) -> &Arc<DiscreteBundle> {
        &self.bundle
    }

    pub fn maps(&self) -> &[DMatrix<f64>] {
        &self.maps
    }

    pub fn map(&self, vertex: usize) -> &DMatrix<f64> {
        &self.maps[vertex]
    }

    /// Vertexwise inverse.
    pub fn inverse(&self) -> Result<GaugeField> {
        let mut maps = Vec::with_capacity(self.maps.len());
        for (i, m) in self.maps.iter().enumerate() {
            let inv = m.clone().try_inverse().ok_or(Error::SingularMatrix {
                what: "gauge map",
                index: Some(i),
                rel_det: 0.0,
            })?;
            maps.push(inv);
        }
        GaugeField::new(self.bundle.clone(), maps)
    }

    /// Composite in action order: acting by `self` then `other` equals
    /// acting once by `self ∘ other`, with matrices `self_i · other_i`.
    pub fn compose(&self, other: &GaugeField) -> Result<GaugeField> {
        check_same_bundle(&self.bundle, &other.bundle, "gauge composition")?;
        let maps = self
            .maps
            .iter()
            .zip(other.maps.iter())
            .map(|(a, b)| a * b)
            .collect();
        GaugeField::new(self.bundle.clone(), maps)
    }

    /// Smallest |det φ_i| over the field.
    pub fn min_abs_det(&self) -> f64 {
        self.maps
            .iter()
            .map(|m| m.determinant().abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// The gauge action on forms, (φq)(v) = q(φv): per vertex φᵀ·Q·φ.
/// Contravariant; pairs with [`gauge_act_subbundle`] through φ⁻¹.
pub fn gauge_act(q: &FormField, phi: &GaugeField) -> Result<FormField> {
    check_same_bundle(q.bundle(), phi.bundle(), "gauge action on forms")?;
    let forms = q
        .forms()
        .iter()
        .zip(phi.maps().iter())
        .map(|(f, m)| SymForm::symmetrized(m.transpose() * f.mat() * m))
        .collect();
    FormField::new(q.bundle().clone(), forms)
}

/// A p-dimensional subbundle: per-vertex full-rank frame matrices whose
/// spans satisfy the adjacency condition across every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbundleField {
    bundle: Arc<DiscreteBundle>,
    dim: usize,
    frames: Vec<DMatrix<f64>>,
}

impl SubbundleField {
    pub fn new(
        bundle: Arc<DiscreteBundle>,
        dim: usize,
        frames: Vec<DMatrix<f64>>,
    ) -> Result<SubbundleField> {
        let n = bundle.rank();
        let n_vertices = bundle.n_vertices();
        if dim > n {
            return Err(Error::DimensionMismatch {
                what: "subbundle dimension",
                expected: n,
                got: dim,
            });
        }
        if frames.len() != n_vertices {
            return Err(Error::DimensionMismatch {
                what: "frame count",
                expected: n_vertices,
                got: frames.len(),
            });
        }
        for (i, b) in frames.iter().enumerate() {
            if b.nrows() != n || b.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    what: "frame matrix",
                    expected: n,
                    got: b.nrows(),
                });
            }
            if dim > 0 {
                let gram = SymForm::symmetrized(b.transpose() * b);
                let e = sym_eigen(gram.mat())?;
                let max = e.values.iter().fold(0.0_f64, |a, &x| a.max(x));
                let min = e.values.iter().fold(f64::INFINITY, |a, &x| a.min(x));
                // negated so a NaN eigenvalue fails the rank check
                #[allow(clippy::neg_cmp_op_on_partial_ord)]
                if !(min > FRAME_RANK_RATIO * FRAME_RANK_RATIO * max) {
                    return Err(Error::SingularMatrix {
                        what: "subbundle frame",
                        index: Some(i),
                        rel_det: if max > 0.0 { (min / max).sqrt() } else { 0.0 },
                    });
                }
            }
        }
        let field = SubbundleField {
            bundle,
            dim,
            frames,
        };
        field.check_adjacency()?;
        Ok(field)
    }

    fn check_adjacency(&self) -> Result<()> {
        let n_vertices = self.bundle.n_vertices();
        for i in 0..n_vertices {
            let j = (i + 1) % n_vertices;
            let transported = self.bundle.transition(i) * &self.frames[i];
            let min_cos = min_cos_principal(&transported, &self.frames[j])?;
            if min_cos <= ADJACENCY_MIN_COS {
                return Err(Error::AdjacencyViolation { edge: i, min_cos });
            }
        }
        Ok(())
    }

    pub fn bundle(&self) -> &Arc<DiscreteBundle> {
        &self.bundle
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn frames(&self) -> &[DMatrix<f64>] {
        &self.frames
    }

    pub fn frame(&self, vertex: usize) -> &DMatrix<f64> {
        &self.frames[vertex]
    }

    /// Largest principal-angle sine between this field's span and another's,
    /// maximized over vertices. Near zero means the fields agree as spans.
    pub fn max_sin_to(&self, other: &SubbundleField) -> Result<f64> {
        check_same_bundle(&self.bundle, &other.bundle, "span comparison")?;
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                what: "span comparison",
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut worst = 0.0_f64;
        for (a, b) in self.frames.iter().zip(other.frames.iter()) {
            worst = worst.max(crate::subspace::max_sin_principal(a, b)?);
        }
        Ok(worst)
    }
}

/// The gauge action on subbundles: frames map covariantly, B ↦ φ·B.
pub fn gauge_act_subbundle(s: &SubbundleField, phi: &GaugeField) -> Result<SubbundleField> {
    check_same_bundle(s.bundle(), phi.bundle(), "gauge action on subbundle")?;
    let frames = s
        .frames()
        .iter()
        .zip(phi.maps().iter())
        .map(|(b, m)| m * b)
        .collect();
    SubbundleField::new(s.bundle().clone(), s.dim(), frames)
}

/// An ordered direct-sum decomposition into two subbundles.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingField {
    plus: SubbundleField,
    minus: SubbundleField,
}

impl SplittingField {
    pub fn new(plus: SubbundleField, minus: SubbundleField) -> Result<SplittingField> {
        check_same_bundle(plus.bundle(), minus.bundle(), "splitting summands")?;
        let n = plus.bundle().rank();
        if plus.dim() + minus.dim() != n {
            return Err(Error::DimensionMismatch {
                what: "splitting dimensions",
                expected: n,
                got: plus.dim() + minus.dim(),
            });
        }
        let s = SplittingField { plus, minus };
        for i in 0..s.plus.bundle().n_vertices() {
            let joint = s.joint_frame(i);
            let rel = linalg::relative_det(&joint);
            if rel <= linalg::DET_REL_TOL {
                return Err(Error::SingularMatrix {
                    what: "splitting frame",
                    index: Some(i),
                    rel_det: rel,
                });
            }
        }
        Ok(s)
    }

    pub fn bundle(&self) -> &Arc<DiscreteBundle> {
        self.plus.bundle()
    }

    pub fn plus(&self) -> &SubbundleField {
        &self.plus
    }

    pub fn minus(&self) -> &SubbundleField {
        &self.minus
    }

    /// The n×n matrix [B⁺ | B⁻] at one vertex.
    pub fn joint_frame(&self, vertex: usize) -> DMatrix<f64> {
        let n = self.bundle().rank();
        let p = self.plus.dim();
        let mut a = DMatrix::zeros(n, n);
        for j in 0..p {
            a.set_column(j, &self.plus.frame(vertex).column(j));
        }
        for j in 0..self.minus.dim() {
            a.set_column(p + j, &self.minus.frame(vertex).column(j));
        }
        a
    }
}

/// Convex interpolation of positive definite fields: per-vertex
/// (1−t)·r0 + t·r1, positive definite for every t in [0, 1].
pub fn interpolate_positive(r0: &FormField, r1: &FormField, t: f64) -> Result<FormField> {
    check_same_bundle(r0.bundle(), r1.bundle(), "interpolation endpoints")?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter {
            what: "interpolation parameter",
            detail: format!("t = {t} outside [0, 1]"),
        });
    }
    for (what, field) in [
        ("first interpolation endpoint", r0),
        ("second interpolation endpoint", r1),
    ] {
        if !field.inertia().is_positive_definite() {
            return Err(Error::NotPositiveDefinite {
                what,
                vertex: None,
                column: 0,
                pivot: f64::NAN,
            });
        }
    }
    let forms = r0
        .forms()
        .iter()
        .zip(r1.forms().iter())
        .map(|(a, b)| SymForm::symmetrized(a.mat() * (1.0 - t) + b.mat() * t))
        .collect();
    FormField::new(r0.bundle().clone(), forms)
}

/// The Example-3.4 line field l_k on the trivial rank-2 bundle: at vertex i
/// with α_i = 2πi/N, the line spanned by (cos kα_i/2, sin kα_i/2). Its
/// Gauss map performs k half-turns around the circle.
///
/// The per-edge step in the space of lines is kπ/N; the adjacency condition
/// needs it below π/2, hence N > 2|k|.
pub fn make_line_bundle_lk(n_vertices: usize, k: i64) -> Result<SubbundleField> {
    let needed = 2 * k.unsigned_abs() as usize;
    if n_vertices <= needed {
        return Err(Error::SamplingTooCoarse {
            n_vertices,
            required: needed,
        });
    }
    let bundle = DiscreteBundle::trivial(n_vertices, 2)?;
    let frames = (0..n_vertices)
        .map(|i| {
            let alpha = 2.0 * std::f64::consts::PI * i as f64 / n_vertices as f64;
            let half = k as f64 * alpha / 2.0;
            DMatrix::from_column_slice(2, 1, &[half.cos(), half.sin()])
        })
        .collect();
    SubbundleField::new(bundle, 1, frames)
}

/// Assemble the form field that is `qplus` on the plus summand, `qminus` on
/// the minus summand, and has no cross terms in the splitting basis:
/// Q_i = A_i⁻ᵀ·blockdiag(qplus_i, qminus_i)·A_i⁻¹ with A_i = [B⁺|B⁻].
///
/// `qplus[i]` must be positive definite (p×p, in plus-frame coordinates),
/// `qminus[i]` negative definite. A summand of dimension zero takes an empty
/// slice instead. The result has inertia (p, n−p) and `s` is one of its
/// q-splittings, orthogonal for the assembled form.
pub fn make_form_from_splitting(
    s: &SplittingField,
    qplus: &[SymForm],
    qminus: &[SymForm],
) -> Result<FormField> {
    let n_vertices = s.bundle().n_vertices();
    let p = s.plus().dim();
    let m = s.minus().dim();
    for (dim, slice, summand) in [(p, qplus, "positive"), (m, qminus, "negative")] {
        if dim > 0 && slice.len() != n_vertices {
            return Err(Error::DimensionMismatch {
                what: "summand form count",
                expected: n_vertices,
                got: slice.len(),
            });
        }
        for (i, f) in slice.iter().enumerate().take(n_vertices) {
            if dim == 0 {
                break;
            }
            if f.dim() != dim {
                return Err(Error::DimensionMismatch {
                    what: "summand form dimension",
                    expected: dim,
                    got: f.dim(),
                });
            }
            let definite = if summand == "positive" {
                f.mat().clone()
            } else {
                -f.mat()
            };
            cholesky(&definite).map_err(|e| {
                let pivot = match &e {
                    Error::NotPositiveDefinite { pivot, .. } => *pivot,
                    _ => f64::NAN,
                };
                Error::NotDefiniteOnSummand {
                    vertex: Some(i),
                    summand,
                    value: pivot,
                }
            })?;
        }
    }
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
            block.view_mut((0, 0), (p, p)).copy_from(qplus[i].mat());
        }
        if m > 0 {
            block.view_mut((p, p), (m, m)).copy_from(qminus[i].mat());
        }
        let q = a_inv.transpose() * block * &a_inv;
        forms.push(SymForm::symmetrized(q));
    }
    FormField::new(s.bundle().clone(), forms)
}
