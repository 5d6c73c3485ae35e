//! Coordinate tensor calculus from finite differences: Christoffel
//! symbols, the Riemann/Ricci/scalar curvatures, gradients, Hessians and
//! Laplacians of scalar fields.
//!
//! Sign conventions: the round unit sphere has scalar curvature +2 and the
//! Laplacian is the metric trace of the Hessian, so on Euclidean space
//! `laplacian(|x|^2 / 2) = dim`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::chart::ChartDomain;
use crate::error::Result;
use crate::fd::{self, DifferentiationConfig};
use crate::field::{MetricField, ScalarField};

/// Rank-3 array indexed `[a][b][c]`, `dim^3` entries.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tensor3 {
    dim: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.dim + b) * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        self.data[(a * self.dim + b) * self.dim + c] = v;
    }
}

/// Rank-4 array indexed `[a][b][c][d]`, `dim^4` entries.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tensor4 {
    dim: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[((a * self.dim + b) * self.dim + c) * self.dim + d]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, d: usize, v: f64) {
        self.data[((a * self.dim + b) * self.dim + c) * self.dim + d] = v;
    }
}

/// Pointwise curvature data of a metric.
///
/// `riemann_lowered` stores `R_{ijkl} = g_{ia} R^a_{jkl}` with
/// `R^a_{jkl} = d_k Gamma^a_{lj} - d_l Gamma^a_{kj} + Gamma Gamma` terms;
/// the convention makes `ricci_{jl} = sum_k R^k_{jkl}` and gives the round
/// sphere positive scalar curvature.
#[derive(Clone, Debug, Serialize)]
pub struct CurvatureAtPoint {
    pub christoffel: Tensor3,
    pub riemann_lowered: Tensor4,
    #[serde(serialize_with = "crate::report::serialize_matrix")]
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

/// `Gamma^k_{ij} = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij})`,
/// with partials from the configured stencil.  Symmetric in `(i, j)`
/// exactly, by the formula.
pub fn christoffel(m: &MetricField, x: &[f64], cfg: &DifferentiationConfig) -> Result<Tensor3> {
    let chart = m.domain();
    chart.ensure_interior(x, &cfg.margin(chart, 0))?;
    christoffel_unchecked(m, x, cfg)
}

/// As [`christoffel`] but without the boundary-margin check, for use inside
/// nested stencils whose caller already accounted for the total reach.
fn christoffel_unchecked(
    m: &MetricField,
    x: &[f64],
    cfg: &DifferentiationConfig,
) -> Result<Tensor3> {
    let chart = m.domain();
    let dim = chart.dim();
    let (_, chol) = m.at_with_cholesky(x)?;
    let ginv = chol.inverse();
    let dg: Vec<DMatrix<f64>> = (0..dim)
        .map(|axis| fd::partial(chart, x, axis, cfg, |p| m.at(p)))
        .collect::<Result<_>>()?;
    let mut gamma = Tensor3::zeros(dim);
    for k in 0..dim {
        for i in 0..dim {
            for j in i..dim {
                let mut sum = 0.0;
                for l in 0..dim {
                    sum += ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                let v = 0.5 * sum;
                gamma.set(k, i, j, v);
                gamma.set(k, j, i, v);
            }
        }
    }
    Ok(gamma)
}

/// Full curvature data at `x`.  The Christoffel field is differentiated by
/// nested stencils with `cfg.nested_step`.
pub fn curvature_at(
    m: &MetricField,
    x: &[f64],
    cfg: &DifferentiationConfig,
) -> Result<CurvatureAtPoint> {
    let chart = m.domain();
    chart.ensure_interior(x, &cfg.margin(chart, 1))?;
    let dim = chart.dim();
    let (g, chol) = m.at_with_cholesky(x)?;
    let ginv = chol.inverse();
    let gamma = christoffel_unchecked(m, x, cfg)?;

    // d_a Gamma^k_{ij}, nested stencil over the Christoffel field; the
    // center value is subtracted so constant directions difference to
    // exactly zero.
    let mut dgamma: Vec<Tensor3> = Vec::with_capacity(dim);
    for axis in 0..dim {
        let h = cfg.nested_step_abs(chart, axis);
        let (pts, denom) = fd::d1_stencil(cfg.stencil_order);
        let mut acc = Tensor3::zeros(dim);
        for &(offset, weight) in pts {
            let shifted = chart.shift(x, axis, offset as f64 * h);
            let gs = christoffel_unchecked(m, &shifted, cfg)?;
            for idx in 0..acc.data.len() {
                acc.data[idx] += weight * (gs.data[idx] - gamma.data[idx]);
            }
        }
        let scale = 1.0 / (denom * h);
        for v in &mut acc.data {
            *v *= scale;
        }
        dgamma.push(acc);
    }

    // R^r_{s mu nu} = d_mu Gamma^r_{nu s} - d_nu Gamma^r_{mu s}
    //                + Gamma^r_{mu l} Gamma^l_{nu s} - Gamma^r_{nu l} Gamma^l_{mu s}
    let mut riemann_up = Tensor4::zeros(dim);
    for r in 0..dim {
        for s in 0..dim {
            for mu in 0..dim {
                for nu in 0..dim {
                    let mut v = dgamma[mu].get(r, nu, s) - dgamma[nu].get(r, mu, s);
                    for l in 0..dim {
                        v += gamma.get(r, mu, l) * gamma.get(l, nu, s)
                            - gamma.get(r, nu, l) * gamma.get(l, mu, s);
                    }
                    riemann_up.set(r, s, mu, nu, v);
                }
            }
        }
    }

    let mut riemann_lowered = Tensor4::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                for l in 0..dim {
                    let mut v = 0.0;
                    for a in 0..dim {
                        v += g[(i, a)] * riemann_up.get(a, j, k, l);
                    }
                    riemann_lowered.set(i, j, k, l, v);
                }
            }
        }
    }

    let mut ricci = DMatrix::zeros(dim, dim);
    for s in 0..dim {
        for nu in 0..dim {
            let mut v = 0.0;
            for mu in 0..dim {
                v += riemann_up.get(mu, s, mu, nu);
            }
            ricci[(s, nu)] = v;
        }
    }
    // symmetric up to stencil error; store the symmetric part
    ricci = 0.5 * (&ricci + ricci.transpose());

    let mut scalar = 0.0;
    for s in 0..dim {
        for nu in 0..dim {
            scalar += ginv[(s, nu)] * ricci[(s, nu)];
        }
    }

    Ok(CurvatureAtPoint {
        christoffel: gamma,
        riemann_lowered,
        ricci,
        scalar,
    })
}

/// Scalar curvature only.
pub fn scalar_curvature(m: &MetricField, x: &[f64], cfg: &DifferentiationConfig) -> Result<f64> {
    Ok(curvature_at(m, x, cfg)?.scalar)
}

/// Raised gradient and its squared norm.
#[derive(Clone, Debug, Serialize)]
pub struct Gradient {
    #[serde(serialize_with = "crate::report::serialize_vector")]
    pub vector: DVector<f64>,
    pub norm_sq: f64,
}

/// `(grad f)^i = g^{ij} d_j f` together with `|grad f|^2 = g^{ij} d_i f d_j f`.
pub fn gradient(
    m: &MetricField,
    f: &ScalarField,
    x: &[f64],
    cfg: &DifferentiationConfig,
) -> Result<Gradient> {
    let chart = m.domain();
    chart.ensure_interior(x, &cfg.margin(chart, 0))?;
    let ginv = m.inverse_at(x)?;
    let df = partials_of_scalar(chart, f, x, cfg)?;
    let vector = &ginv * &df;
    let norm_sq = df.dot(&vector);
    Ok(Gradient { vector, norm_sq })
}

fn partials_of_scalar(
    chart: &ChartDomain,
    f: &ScalarField,
    x: &[f64],
    cfg: &DifferentiationConfig,
) -> Result<DVector<f64>> {
    let dim = chart.dim();
    let mut df = DVector::zeros(dim);
    for axis in 0..dim {
        df[axis] = fd::partial(chart, x, axis, cfg, |p| Ok(f.at(p)))?;
    }
    Ok(df)
}

/// Covariant Hessian `Hess f_{ij} = d_i d_j f - Gamma^k_{ij} d_k f`;
/// symmetric exactly.
pub fn hessian(
    m: &MetricField,
    f: &ScalarField,
    x: &[f64],
    cfg: &DifferentiationConfig,
) -> Result<DMatrix<f64>> {
    let chart = m.domain();
    chart.ensure_interior(x, &cfg.margin(chart, 0))?;
    let dim = chart.dim();
    let gamma = christoffel_unchecked(m, x, cfg)?;
    let df = partials_of_scalar(chart, f, x, cfg)?;
    let d2f = fd::second_partials(chart, x, cfg, |p| Ok(f.at(p)))?;
    let mut hess = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let mut v = d2f[(i, j)];
            for k in 0..dim {
                v -= gamma.get(k, i, j) * df[k];
            }
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok(hess)
}

/// Metric trace of the Hessian, `g^{ij} Hess f_{ij}`.
pub fn laplacian(
    m: &MetricField,
    f: &ScalarField,
    x: &[f64],
    cfg: &DifferentiationConfig,
) -> Result<f64> {
    let ginv = m.inverse_at(x)?;
    let hess = hessian(m, f, x, cfg)?;
    Ok((ginv * hess).trace())
}
