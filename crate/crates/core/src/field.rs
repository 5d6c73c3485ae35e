//! Smooth callable fields over a chart: metrics, scalars, densities.

use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::chart::ChartDomain;
use crate::error::{Error, Result};

/// Asymmetry beyond this is treated as a user error rather than silently
/// symmetrized away.
const SYMMETRY_TOL: f64 = 1e-12;

pub type MetricFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A Riemannian metric given as a closed-form callable over a chart.
///
/// Evaluations symmetrize the returned matrix and check positive
/// definiteness via a Cholesky factorization, so every stencil sample of a
/// degenerate metric fails with the offending point named.
#[derive(Clone)]
pub struct MetricField {
    domain: ChartDomain,
    eval: MetricFn,
}

impl MetricField {
    pub fn new<F>(domain: ChartDomain, eval: F) -> Self
    where
        F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        Self {
            domain,
            eval: Arc::new(eval),
        }
    }

    pub fn from_arc(domain: ChartDomain, eval: MetricFn) -> Self {
        Self { domain, eval }
    }

    /// Constant-coefficient metric.
    pub fn constant(domain: ChartDomain, g: DMatrix<f64>) -> Self {
        Self::new(domain, move |_| g.clone())
    }

    /// Identity (Euclidean) metric on the chart.
    pub fn euclidean(domain: ChartDomain) -> Self {
        let dim = domain.dim();
        Self::constant(domain, DMatrix::identity(dim, dim))
    }

    pub fn domain(&self) -> &ChartDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Evaluates, symmetrizes and PD-checks the metric at `x`.
    pub fn at(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.at_with_cholesky(x)?.0)
    }

    /// As [`MetricField::at`], returning the Cholesky factor as well.
    pub fn at_with_cholesky(&self, x: &[f64]) -> Result<(DMatrix<f64>, Cholesky<f64, Dyn>)> {
        let raw = (self.eval)(x);
        let dim = self.domain.dim();
        if raw.nrows() != dim || raw.ncols() != dim {
            return Err(Error::MetricShape {
                rows: raw.nrows(),
                cols: raw.ncols(),
                dim,
            });
        }
        let mut max_entry = 0.0_f64;
        let mut max_asym = 0.0_f64;
        for i in 0..dim {
            for j in 0..dim {
                max_entry = max_entry.max(raw[(i, j)].abs());
                max_asym = max_asym.max((raw[(i, j)] - raw[(j, i)]).abs());
            }
        }
        if max_asym > SYMMETRY_TOL * max_entry.max(1.0) {
            return Err(Error::AsymmetricMetric { point: x.to_vec() });
        }
        let sym = 0.5 * (&raw + raw.transpose());
        let chol =
            Cholesky::new(sym.clone()).ok_or(Error::DegenerateMetric { point: x.to_vec() })?;
        Ok((sym, chol))
    }

    /// Inverse metric at `x`.
    pub fn inverse_at(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let (_, chol) = self.at_with_cholesky(x)?;
        Ok(chol.inverse())
    }

    /// `sqrt(det g)` at `x`, from the Cholesky diagonal.
    pub fn sqrt_det_at(&self, x: &[f64]) -> Result<f64> {
        let (_, chol) = self.at_with_cholesky(x)?;
        Ok(chol.l_dirty().diagonal().iter().product())
    }
}

/// A real-valued field over a chart.
#[derive(Clone)]
pub struct ScalarField {
    domain: ChartDomain,
    eval: ScalarFn,
}

impl ScalarField {
    pub fn new<F>(domain: ChartDomain, eval: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            domain,
            eval: Arc::new(eval),
        }
    }

    pub fn from_arc(domain: ChartDomain, eval: ScalarFn) -> Self {
        Self { domain, eval }
    }

    pub fn constant(domain: ChartDomain, value: f64) -> Self {
        Self::new(domain, move |_| value)
    }

    pub fn domain(&self) -> &ChartDomain {
        &self.domain
    }

    pub fn at(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }
}

/// A strictly positive scalar field (a smooth weight for the measure
/// `phi dvol`).  Positivity is checked at every sampled point.
#[derive(Clone)]
pub struct DensityField {
    inner: ScalarField,
}

impl DensityField {
    pub fn new<F>(domain: ChartDomain, eval: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            inner: ScalarField::new(domain, eval),
        }
    }

    pub fn from_scalar(inner: ScalarField) -> Self {
        Self { inner }
    }

    pub fn constant_one(domain: ChartDomain) -> Self {
        Self::new(domain, |_| 1.0)
    }

    pub fn domain(&self) -> &ChartDomain {
        self.inner.domain()
    }

    pub fn at(&self, x: &[f64]) -> Result<f64> {
        let v = self.inner.at(x);
        if !(v > 0.0) {
            return Err(Error::NonPositiveDensity {
                point: x.to_vec(),
                value: v,
            });
        }
        Ok(v)
    }

    /// A scalar view (evaluations unchecked).
    pub fn as_scalar(&self) -> &ScalarField {
        &self.inner
    }

    /// `ln phi` as a scalar field on the same chart.
    pub fn log_field(&self) -> ScalarField {
        let eval = self.inner.eval.clone();
        ScalarField::from_arc(
            self.inner.domain.clone(),
            Arc::new(move |x: &[f64]| eval(x).ln()),
        )
    }
}

/// Largest deviation of `f(x + period e_axis) - f(x)` over the sample set,
/// for every periodic axis.  Diagnostic for the periodic-axis consistency
/// invariant of fields registered on a chart.
pub fn periodicity_residual_scalar(field: &ScalarField, samples: &[Vec<f64>]) -> f64 {
    let chart = field.domain();
    let mut worst = 0.0_f64;
    for x in samples {
        for axis in 0..chart.dim() {
            if !chart.periodic()[axis] {
                continue;
            }
            let shifted = chart.shift(x, axis, chart.axis_length(axis));
            worst = worst.max((field.at(&shifted) - field.at(x)).abs());
        }
    }
    worst
}

/// Metric counterpart of [`periodicity_residual_scalar`].
pub fn periodicity_residual_metric(field: &MetricField, samples: &[Vec<f64>]) -> Result<f64> {
    let chart = field.domain().clone();
    let mut worst = 0.0_f64;
    for x in samples {
        for axis in 0..chart.dim() {
            if !chart.periodic()[axis] {
                continue;
            }
            let shifted = chart.shift(x, axis, chart.axis_length(axis));
            let diff = field.at(&shifted)? - field.at(x)?;
            worst = worst.max(diff.amax());
        }
    }
    Ok(worst)
}
