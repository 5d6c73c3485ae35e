//! Flow of horizontal lifts and the Lie-derivative check for the fiber
//! volume form.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fd::DifferentiationConfig;
use crate::quad::PeriodicGrid;
use crate::report::{IdentityId, IdentityReport};
use crate::submersion::{metric_dot, KKSubmersion};

/// Integrates the flow of the horizontal lift of the constant base vector
/// `direction` from `p0` for time `t` (4th-order Runge-Kutta, `nsteps`
/// substeps).  Fails if the base part leaves the chart.
pub fn flow_horizontal_lift(
    s: &KKSubmersion,
    p0: &[f64],
    direction: &[f64],
    t: f64,
    nsteps: usize,
) -> Result<Vec<f64>> {
    let n = s.base_dim();
    let q = s.fiber_dim();
    assert_eq!(direction.len(), n, "direction must be a base vector");
    let velocity = |p: &[f64]| -> DVector<f64> {
        let (x, y) = p.split_at(n);
        let a = s.connection_at(x, y);
        let mut v = DVector::zeros(n + q);
        for al in 0..n {
            v[al] = direction[al];
        }
        for i in 0..q {
            let mut ay = 0.0;
            for al in 0..n {
                ay += a[(i, al)] * direction[al];
            }
            v[n + i] = -ay;
        }
        v
    };

    let dt = t / nsteps as f64;
    let mut p: Vec<f64> = p0.to_vec();
    for step in 0..nsteps {
        let pv = DVector::from_vec(p.clone());
        let k1 = velocity(pv.as_slice());
        let k2 = velocity((&pv + 0.5 * dt * &k1).as_slice());
        let k3 = velocity((&pv + 0.5 * dt * &k2).as_slice());
        let k4 = velocity((&pv + dt * &k3).as_slice());
        let next = &pv + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        p = next.as_slice().to_vec();
        let base = s.base_chart();
        for axis in 0..n {
            if base.periodic()[axis] {
                continue;
            }
            let (lo, hi) = base.bounds()[axis];
            if p[axis] < lo || p[axis] > hi {
                return Err(Error::FlowLeftChart {
                    axis,
                    time: dt * (step + 1) as f64 * t.signum(),
                });
            }
        }
    }
    Ok(p)
}

/// Wraps a coordinate difference on a periodic axis into the nearest image.
fn wrap_difference(d: f64, period: f64) -> f64 {
    d - period * (d / period).round()
}

/// Checks that the time derivative of the pulled-back fiber volume form
/// under the flow of a horizontal lift equals `-(X, N) dvol_F`.
///
/// The flow is integrated for times `+-t_step`; the fiber-coordinate
/// Jacobian of the flow map is taken by periodic central differences
/// across neighboring fiber grid nodes, and the `t`-derivative by a
/// central difference in time.  One residual per fiber grid node,
/// normalized by `max(1, |target|)`.
pub fn verify_lie_derivative_fiber_volume(
    s: &KKSubmersion,
    b: &[f64],
    direction: &[f64],
    grid: &[usize],
    cfg: &DifferentiationConfig,
    t_step: f64,
    tolerance: f64,
) -> Result<IdentityReport> {
    if !(t_step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "t_step must be positive, got {t_step}"
        )));
    }
    let n = s.base_dim();
    let q = s.fiber_dim();
    let fiber = s.fiber_chart().clone();
    let grid = PeriodicGrid::new(&fiber, grid)?;
    let nodes: Vec<Vec<f64>> = grid.nodes().collect();
    let counts: Vec<usize> = grid.nodes_per_axis().to_vec();

    let total = s.total_metric_field();
    let nsteps = 4;

    // flow every grid node forward and backward in time
    let mut forward: Vec<Vec<f64>> = Vec::with_capacity(nodes.len());
    let mut backward: Vec<Vec<f64>> = Vec::with_capacity(nodes.len());
    for y in &nodes {
        let p0 = s.join(b, y);
        forward.push(flow_horizontal_lift(s, &p0, direction, t_step, nsteps)?);
        backward.push(flow_horizontal_lift(s, &p0, direction, -t_step, nsteps)?);
    }

    let flat_index = |multi: &[usize]| -> usize {
        let mut idx = 0;
        for axis in 0..q {
            idx = idx * counts[axis] + multi[axis];
        }
        idx
    };
    let multi_index = |mut flat: usize| -> Vec<usize> {
        let mut m = vec![0usize; q];
        for axis in (0..q).rev() {
            m[axis] = flat % counts[axis];
            flat /= counts[axis];
        }
        m
    };

    // pulled-back volume density at one node for one time sign
    let volume_density = |flowed: &[Vec<f64>], k: usize| -> Result<f64> {
        let xf = &flowed[k][..n];
        let yf = &flowed[k][n..];
        let sqrt_det = s.fiber_metric_field(xf).sqrt_det_at(yf)?;
        // fiber Jacobian d y_t / d y_0 by periodic central differences
        let mut jac = DMatrix::zeros(q, q);
        let m = multi_index(k);
        for j in 0..q {
            let spacing = fiber.axis_length(j) / counts[j] as f64;
            let mut mp = m.clone();
            mp[j] = (m[j] + 1) % counts[j];
            let mut mm = m.clone();
            mm[j] = (m[j] + counts[j] - 1) % counts[j];
            let kp = flat_index(&mp);
            let km = flat_index(&mm);
            for i in 0..q {
                let period = fiber.axis_length(i);
                let d = wrap_difference(flowed[kp][n + i] - flowed[km][n + i], period);
                jac[(i, j)] = d / (2.0 * spacing);
            }
        }
        Ok(sqrt_det * jac.determinant())
    };

    let mut residuals = Vec::with_capacity(nodes.len());
    let mut sample_points = Vec::with_capacity(nodes.len());
    for (k, y) in nodes.iter().enumerate() {
        let v_plus = volume_density(&forward, k)?;
        let v_minus = volume_density(&backward, k)?;
        let dv_dt = (v_plus - v_minus) / (2.0 * t_step);

        let p = s.join(b, y);
        let g0 = total.at(&p)?;
        let nvec = s.mean_curvature_at(&total, &p, cfg)?;
        let mut lift = DVector::zeros(n + q);
        let (x, yy) = s.split(&p);
        let a = s.connection_at(x, yy);
        for al in 0..n {
            lift[al] = direction[al];
            for i in 0..q {
                lift[n + i] -= a[(i, al)] * direction[al];
            }
        }
        let sqrt_det = s.fiber_metric_field(x).sqrt_det_at(yy)?;
        let target = -metric_dot(&g0, &lift, &nvec) * sqrt_det;

        residuals.push((dv_dt - target) / target.abs().max(1.0));
        sample_points.push(p);
    }

    Ok(IdentityReport::from_residuals(
        IdentityId::LieFiberVolume,
        sample_points,
        residuals,
        tolerance,
        format!(
            "flow derivative of the pulled-back fiber volume vs -(X, N) dvol_F; \
             t_step = {t_step}, direction = {direction:?}"
        ),
    ))
}
