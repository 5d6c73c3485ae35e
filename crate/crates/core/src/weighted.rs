//! Smooth metric-measure spaces `(M, phi dvol)` and their modified scalar
//! curvatures, plus global means over fully periodic charts.

use crate::curvature::{gradient, laplacian, scalar_curvature};
use crate::error::{Error, Result};
use crate::fd::DifferentiationConfig;
use crate::field::{DensityField, MetricField};
use crate::quad::PeriodicGrid;
use crate::report::ModifiedScalarReport;

/// A Riemannian metric together with a positive weight for the measure.
#[derive(Clone)]
pub struct WeightedManifold {
    pub metric: MetricField,
    pub phi: DensityField,
}

impl WeightedManifold {
    pub fn new(metric: MetricField, phi: DensityField) -> Self {
        Self { metric, phi }
    }

    /// Weight identically one: the plain Riemannian measure.
    pub fn unweighted(metric: MetricField) -> Self {
        let phi = DensityField::constant_one(metric.domain().clone());
        Self { metric, phi }
    }
}

/// Positivity check over the full stencil footprint around `x`, so a
/// weight dipping nonpositive anywhere the differentiation will sample it
/// fails with the offending point named instead of polluting the result.
fn ensure_positive_on_stencil(
    w: &WeightedManifold,
    x: &[f64],
    cfg: &DifferentiationConfig,
) -> Result<()> {
    let chart = w.metric.domain();
    let reach = cfg.stencil_order.reach() as i32;
    let dim = chart.dim();
    for i in 0..dim {
        let hi = cfg.step_abs(chart, i);
        for ki in -reach..=reach {
            let xi = chart.shift(x, i, ki as f64 * hi);
            w.phi.at(&xi)?;
            for j in (i + 1)..dim {
                let hj = cfg.step_abs(chart, j);
                for kj in -reach..=reach {
                    w.phi.at(&chart.shift(&xi, j, kj as f64 * hj))?;
                }
            }
        }
    }
    Ok(())
}

/// `R - 2 lap(phi)/phi + |grad phi|^2 / phi^2`.
pub fn modified_scalar_inf(
    w: &WeightedManifold,
    x: &[f64],
    cfg: &DifferentiationConfig,
) -> Result<f64> {
    ensure_positive_on_stencil(w, x, cfg)?;
    let phi = w.phi.at(x)?;
    let r = scalar_curvature(&w.metric, x, cfg)?;
    let lap = laplacian(&w.metric, w.phi.as_scalar(), x, cfg)?;
    let grad = gradient(&w.metric, w.phi.as_scalar(), x, cfg)?;
    Ok(r - 2.0 * lap / phi + grad.norm_sq / (phi * phi))
}

/// `R - 2 lap(phi)/phi + (1 - 1/q) |grad phi|^2 / phi^2` for finite `q > 0`.
pub fn modified_scalar_q(
    w: &WeightedManifold,
    q: f64,
    x: &[f64],
    cfg: &DifferentiationConfig,
) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "q must be positive, got {q}"
        )));
    }
    ensure_positive_on_stencil(w, x, cfg)?;
    let phi = w.phi.at(x)?;
    let r = scalar_curvature(&w.metric, x, cfg)?;
    let lap = laplacian(&w.metric, w.phi.as_scalar(), x, cfg)?;
    let grad = gradient(&w.metric, w.phi.as_scalar(), x, cfg)?;
    Ok(r - 2.0 * lap / phi + (1.0 - 1.0 / q) * grad.norm_sq / (phi * phi))
}

/// The same quantity written in terms of `ln phi`:
/// `R - 2 lap(ln phi) - (1 + 1/q) |grad ln phi|^2`.
/// Agrees with [`modified_scalar_q`] pointwise up to stencil error.
pub fn log_form_scalar_q(
    w: &WeightedManifold,
    q: f64,
    x: &[f64],
    cfg: &DifferentiationConfig,
) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "q must be positive, got {q}"
        )));
    }
    ensure_positive_on_stencil(w, x, cfg)?; // guard before taking logs
    let log_phi = w.phi.log_field();
    let r = scalar_curvature(&w.metric, x, cfg)?;
    let lap = laplacian(&w.metric, &log_phi, x, cfg)?;
    let grad = gradient(&w.metric, &log_phi, x, cfg)?;
    Ok(r - 2.0 * lap - (1.0 + 1.0 / q) * grad.norm_sq)
}

/// Bundle of `R`, `R_inf` and optionally `R_q` at a point.  `q = None`
/// means the infinite-parameter curvature only.
pub fn modified_scalar_report(
    w: &WeightedManifold,
    q: Option<f64>,
    x: &[f64],
    cfg: &DifferentiationConfig,
) -> Result<ModifiedScalarReport> {
    let scalar = scalar_curvature(&w.metric, x, cfg)?;
    let r_inf = modified_scalar_inf(w, x, cfg)?;
    let r_q = match q {
        Some(q) => Some(modified_scalar_q(w, q, x, cfg)?),
        None => None,
    };
    Ok(ModifiedScalarReport {
        point: x.to_vec(),
        scalar,
        r_inf,
        r_q,
        q,
    })
}

/// Integral of a pointwise function against `dvol = sqrt(det g) dx` and the
/// total volume, over a fully periodic chart.
#[derive(Clone, Copy, Debug)]
pub struct IntegralResult {
    pub integral: f64,
    pub volume: f64,
}

/// Tensor-product periodic trapezoidal quadrature of `field * sqrt(det g)`.
pub fn integrate_scalar<F>(
    w: &WeightedManifold,
    mut field: F,
    grid: &[usize],
) -> Result<IntegralResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let chart = w.metric.domain();
    let grid = PeriodicGrid::new(chart, grid)?;
    let mut num = crate::quad::NeumaierSum::new();
    let mut vol = crate::quad::NeumaierSum::new();
    for i in 0..grid.node_count() {
        let x = grid.node(i);
        let dv = w.metric.sqrt_det_at(&x)?;
        num.add(field(&x)? * dv);
        vol.add(dv);
    }
    Ok(IntegralResult {
        integral: num.total() * grid.cell_volume(),
        volume: vol.total() * grid.cell_volume(),
    })
}

/// Means of `R_q` and `R` against the Riemannian volume.
#[derive(Clone, Copy, Debug)]
pub struct MeanScalarChain {
    pub mean_rq: f64,
    pub mean_r: f64,
}

/// Computes `mean(R_q)` and `mean(R)` over a fully periodic chart.  Their
/// difference is `-(1 + 1/q) mean(|grad ln phi|^2)` plus a divergence term
/// integrating to zero, so `mean_rq <= mean_r` up to quadrature and
/// stencil error.
pub fn mean_scalar_chain(
    w: &WeightedManifold,
    q: f64,
    grid: &[usize],
    cfg: &DifferentiationConfig,
) -> Result<MeanScalarChain> {
    let rq = integrate_scalar(w, |x| modified_scalar_q(w, q, x, cfg), grid)?;
    let r = integrate_scalar(w, |x| scalar_curvature(&w.metric, x, cfg), grid)?;
    Ok(MeanScalarChain {
        mean_rq: rq.integral / rq.volume,
        mean_r: r.integral / r.volume,
    })
}
