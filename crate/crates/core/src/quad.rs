//! Periodic trapezoidal quadrature on tensor-product grids.
//!
//! On a fully periodic box the trapezoidal rule degenerates to the uniform
//! rectangle rule, which is spectrally accurate for smooth periodic
//! integrands.  Summation is compensated (Neumaier) in a fixed index
//! order, so results are bit-reproducible regardless of how node
//! evaluations were scheduled.

use crate::chart::ChartDomain;
use crate::error::{Error, Result};

/// Compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Deterministic compensated sum of a slice.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut acc = NeumaierSum::new();
    for &v in values {
        acc.add(v);
    }
    acc.total()
}

/// Uniform tensor-product grid over a fully periodic chart.
#[derive(Clone, Debug)]
pub struct PeriodicGrid {
    nodes_per_axis: Vec<usize>,
    origin: Vec<f64>,
    spacing: Vec<f64>,
    cell_volume: f64,
}

impl PeriodicGrid {
    pub fn new(chart: &ChartDomain, nodes_per_axis: &[usize]) -> Result<Self> {
        if !chart.is_fully_periodic() {
            return Err(Error::UnsupportedDomain(
                "global quadrature requires every chart axis to be periodic".into(),
            ));
        }
        if nodes_per_axis.len() != chart.dim() {
            return Err(Error::InvalidParameter(format!(
                "grid specifies {} axes on a chart of dimension {}",
                nodes_per_axis.len(),
                chart.dim()
            )));
        }
        if nodes_per_axis.iter().any(|&n| n < 2) {
            return Err(Error::InvalidParameter(
                "quadrature needs at least 2 nodes per axis".into(),
            ));
        }
        let origin: Vec<f64> = chart.bounds().iter().map(|&(lo, _)| lo).collect();
        let spacing: Vec<f64> = nodes_per_axis
            .iter()
            .enumerate()
            .map(|(axis, &n)| chart.axis_length(axis) / n as f64)
            .collect();
        let cell_volume = spacing.iter().product();
        Ok(Self {
            nodes_per_axis: nodes_per_axis.to_vec(),
            origin,
            spacing,
            cell_volume,
        })
    }

    /// Uniform node count on every axis.
    pub fn uniform(chart: &ChartDomain, nodes: usize) -> Result<Self> {
        Self::new(chart, &vec![nodes; chart.dim()])
    }

    pub fn node_count(&self) -> usize {
        self.nodes_per_axis.iter().product()
    }

    pub fn nodes_per_axis(&self) -> &[usize] {
        &self.nodes_per_axis
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    /// Node coordinates in lexicographic index order.
    pub fn node(&self, mut flat: usize) -> Vec<f64> {
        let dim = self.nodes_per_axis.len();
        let mut x = vec![0.0; dim];
        for axis in (0..dim).rev() {
            let n = self.nodes_per_axis[axis];
            let k = flat % n;
            flat /= n;
            x[axis] = self.origin[axis] + k as f64 * self.spacing[axis];
        }
        x
    }

    pub fn nodes(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.node_count()).map(|i| self.node(i))
    }

    /// Integrates `f` over the box: `cell_volume * sum f(node)`.
    pub fn integrate<F>(&self, mut f: F) -> Result<f64>
    where
        F: FnMut(&[f64]) -> Result<f64>,
    {
        let mut acc = NeumaierSum::new();
        for i in 0..self.node_count() {
            acc.add(f(&self.node(i))?);
        }
        Ok(acc.total() * self.cell_volume)
    }
}
