//! Deterministic sampling of matrices, forms, and fields for tests and
//! benchmarks. Everything is driven by an explicit ChaCha8 generator so
//! that a seed pins the whole instance.
//!
//! Field samplers produce loops that are smooth in the base angle, so the
//! derived subbundles satisfy the adjacency condition at reasonable
//! resolutions.

use std::f64::consts::TAU;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bundle::{
    make_form_from_splitting, DiscreteBundle, FormField, GaugeField, SplittingField, SubbundleField,
};
use crate::error::Result;
use crate::isometry::Gau0Witness;
use crate::linalg::SymForm;

/// The project-wide seeded generator.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with independent uniform entries in [−1, 1].
pub fn matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// Vector with independent uniform entries in [−1, 1].
pub fn vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

/// Random symmetric matrix (entries of order 1), possibly degenerate.
pub fn symmetric(rng: &mut ChaCha8Rng, n: usize) -> SymForm {
    SymForm::symmetrized(matrix(rng, n, n))
}

/// Haar-ish orthogonal matrix via QR with a fixed sign convention.
pub fn orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let qr = matrix(rng, n, n).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

fn spread(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.5..2.0)).collect()
}

/// Invertible matrix with singular values in [0.5, 2].
pub fn well_conditioned_invertible(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let u = orthogonal(rng, n);
    let v = orthogonal(rng, n);
    let s = DMatrix::from_diagonal(&DVector::from_vec(spread(rng, n)));
    u * s * v.transpose()
}

/// Symmetric positive definite with eigenvalues in [0.5, 2].
pub fn spd(rng: &mut ChaCha8Rng, n: usize) -> SymForm {
    let q = orthogonal(rng, n);
    let d = DMatrix::from_diagonal(&DVector::from_vec(spread(rng, n)));
    SymForm::symmetrized(&q * d * q.transpose())
}

/// Symmetric with `plus` eigenvalues in [0.5, 2] and the rest in [−2, −0.5].
pub fn symmetric_with_inertia(rng: &mut ChaCha8Rng, n: usize, plus: usize) -> SymForm {
    assert!(plus <= n, "inertia exceeds dimension");
    let q = orthogonal(rng, n);
    let vals: Vec<f64> = spread(rng, n)
        .into_iter()
        .enumerate()
        .map(|(i, v)| if i < plus { v } else { -v })
        .collect();
    let d = DMatrix::from_diagonal(&DVector::from_vec(vals));
    SymForm::symmetrized(&q * d * q.transpose())
}

/// Symmetric non-degenerate with uniformly random inertia.
pub fn symmetric_nondegenerate(rng: &mut ChaCha8Rng, n: usize) -> SymForm {
    let plus = rng.random_range(0..=n);
    symmetric_with_inertia(rng, n, plus)
}

/// A loop of invertible matrices, smooth in the base angle: G(α) =
/// Q·(I + s(B cos α + C sin α)) with the perturbation kept below norm 0.3.
fn smooth_invertible_loop(rng: &mut ChaCha8Rng, bundle: &Arc<DiscreteBundle>) -> Vec<DMatrix<f64>> {
    let n = bundle.rank();
    let n_vertices = bundle.n_vertices();
    let q = well_conditioned_invertible(rng, n);
    let b = matrix(rng, n, n);
    let c = matrix(rng, n, n);
    let scale = 0.15 / n as f64;
    (0..n_vertices)
        .map(|i| {
            let a = TAU * i as f64 / n_vertices as f64;
            let p = (&b * a.cos() + &c * a.sin()) * scale;
            &q * (DMatrix::identity(n, n) + p)
        })
        .collect()
}

/// A gauge field that is smooth in the base angle (but generally far from
/// the identity, so it carries no path witness).
pub fn smooth_gauge_loop(rng: &mut ChaCha8Rng, bundle: &Arc<DiscreteBundle>) -> Result<GaugeField> {
    let maps = smooth_invertible_loop(rng, bundle);
    GaugeField::new(bundle.clone(), maps)
}

/// Independent per-vertex invertible gauge maps (no smoothness).
pub fn gauge_field(rng: &mut ChaCha8Rng, bundle: &Arc<DiscreteBundle>) -> Result<GaugeField> {
    let n = bundle.rank();
    let maps = (0..bundle.n_vertices())
        .map(|_| well_conditioned_invertible(rng, n))
        .collect();
    GaugeField::new(bundle.clone(), maps)
}

/// An identity-component gauge element with its witness: the straight-line
/// path from the identity to I + Δ with ‖Δ‖ ≤ 0.4 per vertex.
pub fn gau0_witnessed(
    rng: &mut ChaCha8Rng,
    bundle: &Arc<DiscreteBundle>,
    steps: usize,
) -> Result<Gau0Witness> {
    let n = bundle.rank();
    let deltas: Vec<DMatrix<f64>> = (0..bundle.n_vertices())
        .map(|_| {
            let m = matrix(rng, n, n);
            let norm = crate::linalg::spectral_norm(&m).max(1e-300);
            m * (0.4 / norm)
        })
        .collect();
    let mut path = Vec::with_capacity(steps);
    for j in 0..steps {
        let t = j as f64 / (steps - 1) as f64;
        let maps = deltas
            .iter()
            .map(|d| DMatrix::identity(n, n) + d * t)
            .collect();
        path.push(GaugeField::new(bundle.clone(), maps)?);
    }
    Gau0Witness::from_path(path)
}

/// Smooth SPD reference field: r(α) = G(α)ᵗG(α) + I/4.
pub fn spd_field(rng: &mut ChaCha8Rng, bundle: &Arc<DiscreteBundle>) -> Result<FormField> {
    let n = bundle.rank();
    let loops = smooth_invertible_loop(rng, bundle);
    let forms = loops
        .iter()
        .map(|g| SymForm::symmetrized(g.transpose() * g + DMatrix::identity(n, n) * 0.25))
        .collect();
    FormField::new(bundle.clone(), forms)
}

/// Smooth splitting of a trivial-type bundle: the coordinate splitting
/// moved by a smooth invertible loop.
pub fn splitting_field(
    rng: &mut ChaCha8Rng,
    bundle: &Arc<DiscreteBundle>,
    p: usize,
) -> Result<SplittingField> {
    let n = bundle.rank();
    assert!(p <= n, "plus dimension exceeds rank");
    let loops = smooth_invertible_loop(rng, bundle);
    let plus_frames = loops.iter().map(|g| g.columns(0, p).into_owned()).collect();
    let minus_frames = loops
        .iter()
        .map(|g| g.columns(p, n - p).into_owned())
        .collect();
    let plus = SubbundleField::new(bundle.clone(), p, plus_frames)?;
    let minus = SubbundleField::new(bundle.clone(), n - p, minus_frames)?;
    SplittingField::new(plus, minus)
}

/// A form field definite on each summand of `s`, with independent random
/// blocks per vertex (eigenvalues in ±[0.5, 2] blockwise).
pub fn form_field_on_splitting(rng: &mut ChaCha8Rng, s: &SplittingField) -> Result<FormField> {
    let n_vertices = s.bundle().n_vertices();
    let p = s.plus().dim();
    let m = s.minus().dim();
    let qplus: Vec<SymForm> = (0..n_vertices).map(|_| spd(rng, p)).collect();
    let qminus: Vec<SymForm> = (0..n_vertices)
        .map(|_| SymForm::symmetrized(-spd(rng, m).mat()))
        .collect();
    make_form_from_splitting(s, &qplus, &qminus)
}

fn smooth_definite_blocks(
    rng: &mut ChaCha8Rng,
    dim: usize,
    n_vertices: usize,
    sign: f64,
) -> Vec<SymForm> {
    // base eigenvalues in [0.5, 2], perturbation below norm 0.4: definite
    // at every angle
    let base = spd(rng, dim);
    let scale = if dim == 0 { 0.0 } else { 0.2 / dim as f64 };
    let b = matrix(rng, dim, dim);
    let c = matrix(rng, dim, dim);
    (0..n_vertices)
        .map(|i| {
            let a = TAU * i as f64 / n_vertices as f64;
            let p = (&b * a.cos() + &c * a.sin()) * scale;
            SymForm::symmetrized((base.mat() + &p + p.transpose()) * sign)
        })
        .collect()
}

/// Like [`form_field_on_splitting`] but with blocks that vary smoothly in
/// the base angle, so the eigen-splitting of the result (w.r.t. any smooth
/// reference) satisfies the adjacency condition at reasonable resolutions.
pub fn smooth_form_field_on_splitting(
    rng: &mut ChaCha8Rng,
    s: &SplittingField,
) -> Result<FormField> {
    let n_vertices = s.bundle().n_vertices();
    let qplus = smooth_definite_blocks(rng, s.plus().dim(), n_vertices, 1.0);
    let qminus = smooth_definite_blocks(rng, s.minus().dim(), n_vertices, -1.0);
    make_form_from_splitting(s, &qplus, &qminus)
}
