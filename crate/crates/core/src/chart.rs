//! Coordinate boxes with per-axis periodicity.

use serde::Serialize;

use crate::error::{Error, Result};

/// A coordinate box in `R^dim` with per-axis periodicity flags.
///
/// A periodic axis identifies its endpoints; fields registered on the chart
/// are expected to be invariant under translation by the axis period, so
/// stencil points may be evaluated past the nominal bounds.  Non-periodic
/// axes are hard boundaries: operations reject points whose stencils would
/// reach past them.
#[derive(Clone, Debug, Serialize)]
pub struct ChartDomain {
    bounds: Vec<(f64, f64)>,
    periodic: Vec<bool>,
}

impl ChartDomain {
    pub fn new(bounds: Vec<(f64, f64)>, periodic: Vec<bool>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidChart("dimension must be at least 1".into()));
        }
        if bounds.len() != periodic.len() {
            return Err(Error::InvalidChart(format!(
                "{} bounds but {} periodicity flags",
                bounds.len(),
                periodic.len()
            )));
        }
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            if !(hi - lo).is_finite() || hi - lo <= 0.0 {
                return Err(Error::InvalidChart(format!(
                    "axis {i} has non-positive length [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { bounds, periodic })
    }

    /// Box `[0, 1]^dim` with every axis periodic (the unit torus cover).
    pub fn unit_torus(dim: usize) -> Self {
        Self::new(vec![(0.0, 1.0); dim], vec![true; dim]).expect("positive box")
    }

    /// Box `[0, 2pi]^dim` with every axis periodic.
    pub fn torus_2pi(dim: usize) -> Self {
        let tau = 2.0 * std::f64::consts::PI;
        Self::new(vec![(0.0, tau); dim], vec![true; dim]).expect("positive box")
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn periodic(&self) -> &[bool] {
        &self.periodic
    }

    pub fn axis_length(&self, axis: usize) -> f64 {
        let (lo, hi) = self.bounds[axis];
        hi - lo
    }

    pub fn is_fully_periodic(&self) -> bool {
        self.periodic.iter().all(|&p| p)
    }

    /// Concatenates two charts into the product chart (self first).
    pub fn product(&self, other: &ChartDomain) -> ChartDomain {
        let mut bounds = self.bounds.clone();
        bounds.extend_from_slice(&other.bounds);
        let mut periodic = self.periodic.clone();
        periodic.extend_from_slice(&other.periodic);
        ChartDomain { bounds, periodic }
    }

    /// Returns `x` shifted by `delta` along `axis`.  No wrapping is applied:
    /// fields on periodic axes are periodic functions, so out-of-box
    /// evaluation is well defined.
    pub fn shift(&self, x: &[f64], axis: usize, delta: f64) -> Vec<f64> {
        let mut y = x.to_vec();
        y[axis] += delta;
        y
    }

    /// Wraps periodic coordinates into their fundamental interval.
    pub fn wrap(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for (i, c) in y.iter_mut().enumerate() {
            if self.periodic[i] {
                let (lo, _) = self.bounds[i];
                let len = self.axis_length(i);
                *c = lo + (*c - lo).rem_euclid(len);
            }
        }
        y
    }

    /// Checks that every coordinate lies in the box and that non-periodic
    /// axes keep at least `margin[axis]` of clearance from both endpoints.
    /// Periodic axes are never rejected.
    pub fn ensure_interior(&self, x: &[f64], margin: &[f64]) -> Result<()> {
        debug_assert_eq!(x.len(), self.dim());
        for axis in 0..self.dim() {
            if self.periodic[axis] {
                continue;
            }
            let (lo, hi) = self.bounds[axis];
            if x[axis] - margin[axis] < lo || x[axis] + margin[axis] > hi {
                return Err(Error::Boundary {
                    point: x.to_vec(),
                    axis,
                });
            }
        }
        Ok(())
    }
}
