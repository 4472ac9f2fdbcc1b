//! Constructive Sylvester theory for quadratic forms on discretized circle
//! bundles.
//!
//! The crate has three layers:
//!
//! * pointwise linear algebra ([`linalg`], [`subspace`]): inertia,
//!   congruence diagonalization, the positive square root of the form
//!   quotient operator, openness radii, principal angles;
//! * discrete bundles over the circle ([`bundle`], [`splitting`]): form,
//!   gauge, and subbundle fields on a cycle of charts, canonical
//!   q-splittings from a positive reference, homotopy witnesses;
//! * classification ([`invariants`], [`isometry`]): the two complete orbit
//!   invariants (isomorphism class via ranks and first Stiefel-Whitney
//!   signs, homotopy class via winding or orientability) and explicit
//!   gauge isometries with identity-component path witnesses.
//!
//! [`doc`] defines the JSON interchange format and [`sample`] the seeded
//! generators used by tests and benchmarks.

pub mod bundle;
pub mod doc;
pub mod error;
pub mod invariants;
pub mod isometry;
pub mod linalg;
pub mod sample;
pub mod splitting;
pub mod subspace;

pub use bundle::{
    field_inertia, field_inertia_with_tol, gauge_act, gauge_act_subbundle, interpolate_positive,
    make_form_from_splitting, make_line_bundle_lk, CycleBase, DiscreteBundle, FormField,
    GaugeField, SplittingField, SubbundleField,
};
pub use doc::{DocError, Document, SCHEMA};
pub use error::{Error, Result};
pub use invariants::{
    complement_homotopy_determination, monodromy_w1, theta_homotopy, theta_homotopy_with_tol,
    theta_iso, theta_iso_with_tol, winding_halfturns, ComplementReport, HomotopyClass, IsoClass,
};
pub use isometry::{
    isometry_general, isometry_positive, orbit_connect, ConnectMode, Connection, Gau0Witness,
    Obstruction, OrbitOutcome,
};
pub use linalg::{
    congruence_diagonalize, gl0_congruence_witness, inertia, openness_radius, operator_l,
    simultaneous_diagonalize, spd_sqrt, CongruenceWitness, Inertia, SymForm, DEFAULT_TOL,
    RESIDUAL_TOL,
};
pub use splitting::{
    canonical_r, complement_field, homotopy_witness_r_independence, q_splitting,
    q_splitting_with_tol, verify_q_splitting, QSplittingResult, SplittingReport,
};
