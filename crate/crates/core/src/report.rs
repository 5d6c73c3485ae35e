//! Report types shared by the verification operations and the CLI.

use nalgebra::{DMatrix, DVector};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

pub(crate) fn serialize_matrix<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for i in 0..m.nrows() {
        let row: Vec<f64> = (0..m.ncols()).map(|j| m[(i, j)]).collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

pub(crate) fn serialize_vector<S: Serializer>(v: &DVector<f64>, s: S) -> Result<S::Ok, S::Error> {
    let vals: Vec<f64> = v.iter().copied().collect();
    vals.serialize(s)
}

/// Which verified relation a report refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityId {
    /// Scalar-curvature splitting of a submersion into base, fiber and
    /// O'Neill terms.
    Oneill,
    /// Laplacian splitting into horizontal and fiber parts.
    LaplacianSplit,
    /// Horizontal/vertical Pythagoras for gradient norms.
    GradientPythagoras,
    /// First derivative of the pushforward density vs its fiber integral.
    BaseDerivativeFirst,
    /// Base Laplacian of the pushforward density vs its fiber integral.
    BaseDerivativeLaplacian,
    /// Base gradient-norm identity for the pushforward density.
    BaseDerivativeGradientNorm,
    /// Fiberwise constancy criterion certifying measure-preserving
    /// fiber transport.
    MeasureHypothesis,
    /// Fiber-integral equality for the weighted base scalar curvature.
    MainEquality,
    /// Lower bound on the base modified scalar curvature with q = dim F.
    Theorem22,
    /// Pointwise |T|^2 - |N|^2 / q >= 0.
    CauchySchwarz,
    /// Flow derivative of the fiber volume form vs the mean curvature.
    LieFiberVolume,
}

impl IdentityId {
    pub fn as_str(&self) -> &'static str {
        match self {
            IdentityId::Oneill => "oneill",
            IdentityId::LaplacianSplit => "laplacian-split",
            IdentityId::GradientPythagoras => "gradient-pythagoras",
            IdentityId::BaseDerivativeFirst => "base-derivative-first",
            IdentityId::BaseDerivativeLaplacian => "base-derivative-laplacian",
            IdentityId::BaseDerivativeGradientNorm => "base-derivative-gradient-norm",
            IdentityId::MeasureHypothesis => "measure-hypothesis",
            IdentityId::MainEquality => "main-equality",
            IdentityId::Theorem22 => "theorem2-2",
            IdentityId::CauchySchwarz => "cauchy-schwarz",
            IdentityId::LieFiberVolume => "lie-fiber-volume",
        }
    }
}

impl std::fmt::Display for IdentityId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Residuals of one identity over a sample set.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub identity_id: IdentityId,
    pub sample_points: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub max_abs_residual: f64,
    pub passed: bool,
    pub tolerance: f64,
    pub notes: String,
}

impl IdentityReport {
    /// Builds a report; `passed` is derived from the residuals so the
    /// `passed <=> max_abs_residual <= tolerance` invariant holds by
    /// construction.
    pub fn from_residuals(
        identity_id: IdentityId,
        sample_points: Vec<Vec<f64>>,
        residuals: Vec<f64>,
        tolerance: f64,
        notes: impl Into<String>,
    ) -> Self {
        let max_abs_residual = residuals.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
        Self {
            identity_id,
            sample_points,
            residuals,
            max_abs_residual,
            passed: max_abs_residual <= tolerance,
            tolerance,
            notes: notes.into(),
        }
    }
}

/// Pointwise O'Neill data of a submersion.
#[derive(Clone, Debug, Serialize)]
pub struct SubmersionPointReport {
    pub r_m: f64,
    pub r_b: f64,
    pub r_f: f64,
    pub a_norm2: f64,
    pub t_norm2: f64,
    pub n_norm2: f64,
    pub check_delta_n: f64,
    #[serde(serialize_with = "serialize_vector")]
    pub n_vector: DVector<f64>,
    pub residual_3_1: f64,
}

/// Fiberwise-constancy diagnostics at one base point.
#[derive(Clone, Debug, Serialize)]
pub struct MeasureCheck {
    pub base_point: Vec<f64>,
    /// Standard deviation over the fiber grid of
    /// `(e_a phi)/phi - (e_a, N)`, per horizontal frame direction.
    pub per_direction: Vec<f64>,
    pub max_fiber_variance: f64,
}

/// Fiber-integral equality for the weighted base scalar curvature at one
/// base point.
#[derive(Clone, Debug, Serialize)]
pub struct MainEqualityReport {
    pub base_point: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// `residual / max(1, |lhs|)`.
    pub residual: f64,
    /// Weighted fiber average of `|A|^2 + |T|^2` (the inequality slack).
    pub slack: f64,
    pub passed: bool,
    pub tolerance: f64,
}

/// Result of the q = dim F inequality check at sampled base points.
#[derive(Clone, Debug, Serialize)]
pub struct Theorem22Report {
    /// One-sided violations `max(0, lhs - rhs)` per base point.
    pub report: IdentityReport,
    /// `rhs - lhs` per base point (nonnegative when the bound holds).
    pub slack: Vec<f64>,
    /// Pointwise Cauchy-Schwarz check over fiber samples.
    pub cauchy_schwarz: IdentityReport,
}

/// One row of a collapse sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub r_m_min: f64,
    pub r_m_max: f64,
    pub r_b: f64,
    pub r_b_q: f64,
    pub margin: f64,
    pub max_residual: f64,
    pub flagged: bool,
}

/// Collapse-family sweep output, rows sorted by parameter descending.
#[derive(Clone, Debug, Serialize)]
pub struct SweepTable {
    pub family: String,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub const CSV_HEADER: &'static [&'static str] = &[
        "epsilon",
        "r_m_min",
        "r_m_max",
        "r_b",
        "r_b_q",
        "margin",
        "max_residual",
        "flagged",
    ];
}

/// Modified scalar curvatures of a weighted manifold at a point.
#[derive(Clone, Debug, Serialize)]
pub struct ModifiedScalarReport {
    pub point: Vec<f64>,
    pub scalar: f64,
    pub r_inf: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}
