//! Numerical differential geometry for weighted Riemannian manifolds and
//! Riemannian submersions given in connection form.
//!
//! The crate provides, bottom up:
//!
//! - [`chart`] / [`field`]: coordinate boxes with per-axis periodicity and
//!   closed-form metric, scalar and density fields over them;
//! - [`fd`] / [`curvature`]: central finite-difference stencils and the
//!   tensor calculus built on them (Christoffel symbols, Riemann, Ricci,
//!   scalar curvature, gradients, Hessians, Laplacians);
//! - [`weighted`]: smooth metric-measure spaces and the modified scalar
//!   curvatures `R_inf` and `R_q`, with global means over periodic charts;
//! - [`submersion`]: Kaluza-Klein presentations of Riemannian submersions,
//!   adapted frames, the O'Neill invariants and fiberwise integration;
//! - [`identity`] / [`flow`]: residual-based verifiers for the curvature
//!   identities, inequalities and the fiber-volume Lie derivative;
//! - [`catalog`]: closed-form examples with oracle values;
//! - [`quad`] / [`sample`]: deterministic quadrature and seeded sampling.
//!
//! All operations are pure functions of immutable inputs; evaluations may
//! run in parallel and accumulate deterministically.

pub mod catalog;
pub mod chart;
pub mod curvature;
pub mod error;
pub mod fd;
pub mod field;
pub mod flow;
pub mod identity;
pub mod quad;
pub mod report;
pub mod sample;
pub mod submersion;
pub mod weighted;

pub use chart::ChartDomain;
pub use curvature::{christoffel, curvature_at, gradient, hessian, laplacian, CurvatureAtPoint};
pub use error::{Error, Result};
pub use fd::{DifferentiationConfig, StencilOrder};
pub use field::{DensityField, MetricField, ScalarField};
pub use report::{
    IdentityId, IdentityReport, MainEqualityReport, MeasureCheck, ModifiedScalarReport,
    SubmersionPointReport, SweepRow, SweepTable, Theorem22Report,
};
pub use submersion::{AdaptedFrame, KKSubmersion};
pub use weighted::WeightedManifold;
