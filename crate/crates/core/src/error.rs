//! Error type shared by all numerical operations.

use thiserror::Error;

fn fmt_point(p: &[f64]) -> String {
    let coords: Vec<String> = p.iter().map(|c| format!("{c:.6}")).collect();
    format!("({})", coords.join(", "))
}

/// Errors raised while constructing charts and fields or evaluating
/// geometric quantities on them.
#[derive(Debug, Error)]
pub enum Error {
    /// Metric evaluation returned a matrix that is not positive definite.
    #[error("metric is not positive definite at {}", fmt_point(.point))]
    DegenerateMetric { point: Vec<f64> },

    /// Metric evaluation returned a matrix whose asymmetry exceeds 1e-12.
    #[error("metric is asymmetric beyond tolerance at {}", fmt_point(.point))]
    AsymmetricMetric { point: Vec<f64> },

    /// Metric evaluation returned a matrix of the wrong shape.
    #[error("metric returned a {rows}x{cols} matrix on a chart of dimension {dim}")]
    MetricShape {
        rows: usize,
        cols: usize,
        dim: usize,
    },

    /// Density evaluated to a non-positive value.
    #[error("density is not positive at {} (value {value})", fmt_point(.point))]
    NonPositiveDensity { point: Vec<f64>, value: f64 },

    /// A stencil would reach past a non-periodic chart boundary.
    #[error("point {} is within one stencil width of the non-periodic boundary on axis {axis}", fmt_point(.point))]
    Boundary { point: Vec<f64>, axis: usize },

    /// Chart construction was given inconsistent data.
    #[error("invalid chart: {0}")]
    InvalidChart(String),

    /// A parameter was outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The operation is only defined on a restricted class of charts.
    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),

    /// An identity's hypothesis was checked and found to fail, so the
    /// verification refuses to run rather than report a spurious residual.
    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),

    /// Integrating a flow left the chart before the requested time.
    #[error("flow left the chart on axis {axis} at t={time}; reduce the time step")]
    FlowLeftChart { axis: usize, time: f64 },

    /// An internal consistency check failed (indicates a bad input field
    /// or a configuration too coarse for the requested quantity).
    #[error("internal consistency check failed: {0}")]
    ConsistencyCheck(String),

    /// Catalog lookup failed.
    #[error("unknown catalog example `{0}`")]
    UnknownExample(String),
}

pub type Result<T> = std::result::Result<T, Error>;
