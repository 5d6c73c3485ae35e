//! Central finite-difference stencils over chart coordinates.
//!
//! All derivative operators here are central: points whose stencils would
//! reach past a non-periodic boundary are rejected by the calling
//! operation instead of being one-sided-differenced, so the truncation
//! order is uniform over every accepted sample.

use serde::{Deserialize, Serialize};

use crate::chart::ChartDomain;
use crate::error::{Error, Result};

/// Order of the central stencils.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StencilOrder {
    Two,
    Four,
}

impl StencilOrder {
    pub fn from_u32(order: u32) -> Result<Self> {
        match order {
            2 => Ok(StencilOrder::Two),
            4 => Ok(StencilOrder::Four),
            other => Err(Error::InvalidParameter(format!(
                "stencil order must be 2 or 4, got {other}"
            ))),
        }
    }

    /// Maximum offset (in units of the step) used by any stencil of this order.
    pub fn reach(self) -> usize {
        match self {
            StencilOrder::Two => 1,
            StencilOrder::Four => 2,
        }
    }

    pub fn as_u32(self) -> u32 {
        match self {
            StencilOrder::Two => 2,
            StencilOrder::Four => 4,
        }
    }
}

/// Relative step sizes and stencil order for all finite differencing.
///
/// `step` differences directly supplied fields (metrics, scalars,
/// connections); `nested_step` differences derived quantities that are
/// themselves finite-difference results, such as Christoffel symbols and
/// the mean-curvature field.  Both are relative to the axis length.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DifferentiationConfig {
    pub step: f64,
    pub stencil_order: StencilOrder,
    pub nested_step: f64,
}

impl Default for DifferentiationConfig {
    fn default() -> Self {
        Self {
            step: 1e-4,
            stencil_order: StencilOrder::Four,
            nested_step: 1e-3,
        }
    }
}

impl DifferentiationConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("step", self.step), ("nested_step", self.nested_step)] {
            if !(v > 0.0 && v <= 0.1) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in (0, 0.1] relative to the axis length, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Absolute step along `axis` of `chart`.
    pub fn step_abs(&self, chart: &ChartDomain, axis: usize) -> f64 {
        self.step * chart.axis_length(axis)
    }

    pub fn nested_step_abs(&self, chart: &ChartDomain, axis: usize) -> f64 {
        self.nested_step * chart.axis_length(axis)
    }

    /// Per-axis clearance needed from non-periodic boundaries when the
    /// evaluation nests `nest_levels` layers of derived differencing on
    /// top of one direct layer.
    pub fn margin(&self, chart: &ChartDomain, nest_levels: usize) -> Vec<f64> {
        let reach = self.stencil_order.reach() as f64;
        (0..chart.dim())
            .map(|axis| {
                let h = self.step_abs(chart, axis);
                let hn = self.nested_step_abs(chart, axis);
                reach * (h + nest_levels as f64 * hn)
            })
            .collect()
    }
}

/// Offsets and integer weights for the first derivative, with the common
/// denominator applied once at the end.  Integer weights make the stencil
/// annihilate constant fields exactly.
pub(crate) fn d1_stencil(order: StencilOrder) -> (&'static [(i32, f64)], f64) {
    match order {
        StencilOrder::Two => (&[(-1, -1.0), (1, 1.0)], 2.0),
        StencilOrder::Four => (&[(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)], 12.0),
    }
}

/// Second-derivative counterpart of [`d1_stencil`].
fn d2_stencil(order: StencilOrder) -> (&'static [(i32, f64)], f64) {
    match order {
        StencilOrder::Two => (&[(-1, 1.0), (0, -2.0), (1, 1.0)], 1.0),
        StencilOrder::Four => (
            &[(-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0)],
            12.0,
        ),
    }
}

/// Anything stencils can accumulate: scalars, vectors, matrices.
pub trait LinearValue: Clone {
    fn scale(&self, factor: f64) -> Self;
    fn add_assign_value(&mut self, other: &Self);
    fn sub_value(&self, other: &Self) -> Self;
}

impl LinearValue for f64 {
    fn scale(&self, factor: f64) -> Self {
        self * factor
    }
    fn add_assign_value(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_value(&self, other: &Self) -> Self {
        self - other
    }
}

impl LinearValue for nalgebra::DMatrix<f64> {
    fn scale(&self, factor: f64) -> Self {
        self * factor
    }
    fn add_assign_value(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_value(&self, other: &Self) -> Self {
        self - other
    }
}

impl LinearValue for nalgebra::DVector<f64> {
    fn scale(&self, factor: f64) -> Self {
        self * factor
    }
    fn add_assign_value(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_value(&self, other: &Self) -> Self {
        self - other
    }
}

/// Weighted sum of `sample(offset) - sample(0)` over the stencil points,
/// scaled by `scale`.  Subtracting the center value is algebraically
/// neutral (the weights sum to zero) and makes the stencil annihilate
/// locally constant fields exactly instead of up to roundoff amplified by
/// the step division.
fn stencil_apply<T, F>(pts: &'static [(i32, f64)], scale: f64, mut sample: F) -> Result<T>
where
    T: LinearValue,
    F: FnMut(i32) -> Result<T>,
{
    let center = sample(0)?;
    let mut acc: Option<T> = None;
    for &(offset, weight) in pts {
        if offset == 0 {
            continue; // (center - center) contributes nothing
        }
        let v = sample(offset)?.sub_value(&center).scale(weight);
        match &mut acc {
            None => acc = Some(v),
            Some(a) => a.add_assign_value(&v),
        }
    }
    Ok(acc.expect("stencil has off-center points").scale(scale))
}

/// First partial along `axis` with explicit absolute step `h`.
pub fn partial_with_step<T, F>(
    chart: &ChartDomain,
    x: &[f64],
    axis: usize,
    h: f64,
    order: StencilOrder,
    mut f: F,
) -> Result<T>
where
    T: LinearValue,
    F: FnMut(&[f64]) -> Result<T>,
{
    let (pts, denom) = d1_stencil(order);
    stencil_apply(pts, 1.0 / (denom * h), |offset| {
        f(&chart.shift(x, axis, offset as f64 * h))
    })
}

/// First partial along `axis` using the direct step of `cfg`.
pub fn partial<T, F>(
    chart: &ChartDomain,
    x: &[f64],
    axis: usize,
    cfg: &DifferentiationConfig,
    f: F,
) -> Result<T>
where
    T: LinearValue,
    F: FnMut(&[f64]) -> Result<T>,
{
    partial_with_step(
        chart,
        x,
        axis,
        cfg.step_abs(chart, axis),
        cfg.stencil_order,
        f,
    )
}

/// First partial along `axis` using the nested step of `cfg` (for derived
/// quantities).
pub fn partial_nested<T, F>(
    chart: &ChartDomain,
    x: &[f64],
    axis: usize,
    cfg: &DifferentiationConfig,
    f: F,
) -> Result<T>
where
    T: LinearValue,
    F: FnMut(&[f64]) -> Result<T>,
{
    partial_with_step(
        chart,
        x,
        axis,
        cfg.nested_step_abs(chart, axis),
        cfg.stencil_order,
        f,
    )
}

/// Second partial, same axis twice.
pub fn partial2_same<T, F>(
    chart: &ChartDomain,
    x: &[f64],
    axis: usize,
    cfg: &DifferentiationConfig,
    mut f: F,
) -> Result<T>
where
    T: LinearValue,
    F: FnMut(&[f64]) -> Result<T>,
{
    let h = cfg.step_abs(chart, axis);
    let (pts, denom) = d2_stencil(cfg.stencil_order);
    stencil_apply(pts, 1.0 / (denom * h * h), |offset| {
        f(&chart.shift(x, axis, offset as f64 * h))
    })
}

/// Mixed second partial `d_i d_j` (i != j) as the composition of the two
/// first-derivative stencils.
pub fn partial2_mixed<T, F>(
    chart: &ChartDomain,
    x: &[f64],
    axis_i: usize,
    axis_j: usize,
    cfg: &DifferentiationConfig,
    mut f: F,
) -> Result<T>
where
    T: LinearValue,
    F: FnMut(&[f64]) -> Result<T>,
{
    debug_assert_ne!(axis_i, axis_j);
    let hi = cfg.step_abs(chart, axis_i);
    let hj = cfg.step_abs(chart, axis_j);
    let (pts, denom) = d1_stencil(cfg.stencil_order);
    stencil_apply(pts, 1.0 / (denom * hi), |oi| {
        let xi = chart.shift(x, axis_i, oi as f64 * hi);
        stencil_apply(pts, 1.0 / (denom * hj), |oj| {
            f(&chart.shift(&xi, axis_j, oj as f64 * hj))
        })
    })
}

/// Full symmetric matrix of second partials of a scalar-valued sampler.
pub fn second_partials<F>(
    chart: &ChartDomain,
    x: &[f64],
    cfg: &DifferentiationConfig,
    mut f: F,
) -> Result<nalgebra::DMatrix<f64>>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let dim = chart.dim();
    let mut out = nalgebra::DMatrix::zeros(dim, dim);
    for i in 0..dim {
        out[(i, i)] = partial2_same(chart, x, i, cfg, &mut f)?;
        for j in (i + 1)..dim {
            let v = partial2_mixed(chart, x, i, j, cfg, &mut f)?;
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}
