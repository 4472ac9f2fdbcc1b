//! Error taxonomy shared by all modules.
//!
//! Every failure that originates at a particular chart or edge of the
//! discretized base carries that index, so callers (and the CLI) can name
//! the offending location instead of reporting a bare numeric failure.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

fn at(vertex: &Option<usize>) -> String {
    match vertex {
        Some(v) => format!(" at vertex {v}"),
        None => String::new(),
    }
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The form has an eigenvalue too close to zero relative to its largest.
    #[error("degenerate quadratic form{}: min |eigenvalue| / max |eigenvalue| = {ratio:.3e} <= tolerance {tol:.3e}", at(.vertex))]
    DegenerateForm {
        vertex: Option<usize>,
        ratio: f64,
        tol: f64,
    },

    /// A matrix that must be invertible is numerically singular.
    #[error("singular {what}{}: relative |det| = {rel_det:.3e} below threshold", at(.index))]
    SingularMatrix {
        what: &'static str,
        index: Option<usize>,
        rel_det: f64,
    },

    /// Cholesky pivot failure: the matrix is not positive definite.
    #[error("{what}{} is not positive definite: pivot {pivot:.3e} at column {column}", at(.vertex))]
    NotPositiveDefinite {
        what: &'static str,
        vertex: Option<usize>,
        column: usize,
        pivot: f64,
    },

    /// An operator whose square root was requested has spectrum <= tol.
    #[error("operator{} has non-positive eigenvalue {eigenvalue:.3e}; square root requires positive spectrum", at(.vertex))]
    NonPositiveSpectrum {
        vertex: Option<usize>,
        eigenvalue: f64,
    },

    /// Input violates a symmetry tolerance.
    #[error("{what}{} is not symmetric: max |M - M^T| = {deviation:.3e} exceeds tolerance", at(.vertex))]
    NotSymmetric {
        what: &'static str,
        vertex: Option<usize>,
        deviation: f64,
    },

    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// Two fields that must live over the same discrete bundle do not.
    #[error("bundle mismatch: {what}")]
    BundleMismatch { what: &'static str },

    /// A per-vertex inertia disagrees with the inertia at vertex 0.
    #[error("inconsistent inertia at vertex {vertex}: ({}, {}) differs from ({}, {})", .got.0, .got.1, .expected.0, .expected.1)]
    InconsistentInertia {
        vertex: usize,
        got: (usize, usize),
        expected: (usize, usize),
    },

    /// Transported neighbour frames fail the principal-angle condition.
    #[error("adjacency violation on edge {edge}: smallest principal-angle cosine {min_cos:.3e} (base is under-sampled)")]
    AdjacencyViolation { edge: usize, min_cos: f64 },

    /// The requested discretization cannot represent the object.
    #[error("sampling too coarse: {n_vertices} vertices, need more than {required}")]
    SamplingTooCoarse { n_vertices: usize, required: usize },

    /// A discrete path witness jumps too far between consecutive steps.
    #[error("step {step} too coarse at vertex {vertex} ({detail}); retry with at least {suggested_steps} steps")]
    StepTooCoarse {
        step: usize,
        vertex: usize,
        detail: String,
        suggested_steps: usize,
    },

    /// A claimed splitting is not definite on its summands for the given form.
    #[error("not a q-splitting at vertex {vertex}: {detail}")]
    NotQSplitting { vertex: usize, detail: String },

    /// A subspace on which the form must be definite is not.
    #[error("form is not definite on the {summand} summand{}: extremal restricted eigenvalue {value:.3e}", at(.vertex))]
    NotDefiniteOnSummand {
        vertex: Option<usize>,
        summand: &'static str,
        value: f64,
    },

    /// A constructed object failed its own verification residual.
    #[error("{what}{} residual {residual:.3e} exceeds tolerance {tol:.3e}", at(.vertex))]
    ResidualTooLarge {
        what: &'static str,
        vertex: Option<usize>,
        residual: f64,
        tol: f64,
    },

    /// The configuration is out of scope for the implemented construction.
    #[error("unsupported configuration: {detail}")]
    Unsupported { detail: String },

    #[error("{what} failed to converge")]
    ConvergenceFailure { what: &'static str },

    #[error("invalid parameter {what}: {detail}")]
    InvalidParameter { what: &'static str, detail: String },
}

impl Error {
    /// Attach a vertex index to errors raised by fiberwise kernels.
    pub fn at_vertex(self, v: usize) -> Error {
        match self {
            Error::DegenerateForm { ratio, tol, .. } => Error::DegenerateForm {
                vertex: Some(v),
                ratio,
                tol,
            },
            Error::SingularMatrix { what, rel_det, .. } => Error::SingularMatrix {
                what,
                index: Some(v),
                rel_det,
            },
            Error::NotPositiveDefinite {
                what,
                column,
                pivot,
                ..
            } => Error::NotPositiveDefinite {
                what,
                vertex: Some(v),
                column,
                pivot,
            },
            Error::NonPositiveSpectrum { eigenvalue, .. } => Error::NonPositiveSpectrum {
                vertex: Some(v),
                eigenvalue,
            },
            Error::NotSymmetric {
                what, deviation, ..
            } => Error::NotSymmetric {
                what,
                vertex: Some(v),
                deviation,
            },
            Error::NotDefiniteOnSummand { summand, value, .. } => Error::NotDefiniteOnSummand {
                vertex: Some(v),
                summand,
                value,
            },
            Error::ResidualTooLarge {
                what,
                residual,
                tol,
                ..
            } => Error::ResidualTooLarge {
                what,
                vertex: Some(v),
                residual,
                tol,
            },
            other => other,
        }
    }

    /// Rename the offending object in errors raised by generic kernels.
    pub fn describing(self, what: &'static str) -> Error {
        match self {
            Error::SingularMatrix { index, rel_det, .. } => Error::SingularMatrix {
                what,
                index,
                rel_det,
            },
            Error::NotPositiveDefinite {
                vertex,
                column,
                pivot,
                ..
            } => Error::NotPositiveDefinite {
                what,
                vertex,
                column,
                pivot,
            },
            Error::NotSymmetric {
                vertex, deviation, ..
            } => Error::NotSymmetric {
                what,
                vertex,
                deviation,
            },
            other => other,
        }
    }
}
