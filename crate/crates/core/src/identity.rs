//! Verifiers for the curvature identities and inequalities of a
//! submersion: each runs over a sample set and reports residuals.
//!
//! Residuals are normalized by `max(1, |reference|)` so tolerances read as
//! absolute for quantities of order one and relative for large ones.
//! One-sided bounds report the violation `max(0, lhs - rhs)`, so the
//! `passed <=> max residual <= tolerance` convention covers them too.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::curvature::{gradient, hessian, laplacian, scalar_curvature};
use crate::error::{Error, Result};
use crate::fd::{self, DifferentiationConfig};
use crate::field::ScalarField;
use crate::quad::NeumaierSum;
use crate::report::{IdentityId, IdentityReport, MainEqualityReport, Theorem22Report};
use crate::submersion::{metric_dot, KKSubmersion};
use crate::weighted::{modified_scalar_inf, modified_scalar_q};

/// Default tolerance for two-sided identity residuals.
pub const DEFAULT_IDENTITY_TOL: f64 = 1e-4;
/// Relaxed default for identities involving the nested-differenced
/// `check_delta_n` term.
pub const DELTA_N_IDENTITY_TOL: f64 = 1e-3;
/// Fiberwise-constancy threshold certifying the transport hypothesis.
pub const DEFAULT_HYPOTHESIS_TOL: f64 = 1e-6;
/// Pointwise Cauchy-Schwarz slack tolerance.
pub const DEFAULT_CS_TOL: f64 = 1e-8;
/// Flow-based Lie derivative comparison tolerance.
pub const DEFAULT_LIE_TOL: f64 = 1e-3;

fn normalized(diff: f64, reference: f64) -> f64 {
    diff / reference.abs().max(1.0)
}

/// Splitting identity for the scalar curvature of the total space,
/// checked at total-space sample points.
pub fn verify_oneill_identity(
    s: &KKSubmersion,
    sample_points: &[Vec<f64>],
    cfg: &DifferentiationConfig,
    tolerance: f64,
) -> Result<IdentityReport> {
    let residuals: Vec<f64> = sample_points
        .par_iter()
        .map(|p| {
            let rep = s.oneill_invariants(p, cfg)?;
            Ok(normalized(rep.residual_3_1, rep.r_m))
        })
        .collect::<Result<_>>()?;
    Ok(IdentityReport::from_residuals(
        IdentityId::Oneill,
        sample_points.to_vec(),
        residuals,
        tolerance,
        "R_M - (R_B + R_F - |A|^2 - |T|^2 - |N|^2 - 2 check_delta_N), \
         normalized by max(1, |R_M|)",
    ))
}

/// Pointwise `|T|^2 - |N|^2 / q >= 0`; reports the violation amount.
/// Needs no transport hypothesis.
pub fn verify_cauchy_schwarz(
    s: &KKSubmersion,
    sample_points: &[Vec<f64>],
    cfg: &DifferentiationConfig,
    tolerance: f64,
) -> Result<IdentityReport> {
    let q = s.fiber_dim() as f64;
    let total = s.total_metric_field();
    let residuals: Vec<f64> = sample_points
        .par_iter()
        .map(|p| {
            let frame = s.adapted_frame(p)?;
            let t = s.oneill_tensors_with_frame(&total, p, &frame, cfg)?;
            Ok((t.n_norm2 / q - t.t_norm2).max(0.0))
        })
        .collect::<Result<_>>()?;
    Ok(IdentityReport::from_residuals(
        IdentityId::CauchySchwarz,
        sample_points.to_vec(),
        residuals,
        tolerance,
        "violation of |T|^2 - |N|^2 / q >= 0",
    ))
}

/// Output of [`verify_laplacian_split`]: the splitting identity and the
/// horizontal/vertical Pythagoras check it rests on.
#[derive(Clone, Debug)]
pub struct LaplacianSplitReports {
    pub split: IdentityReport,
    pub pythagoras: IdentityReport,
}

/// Checks `lap_M f = lap_hor f + lap_F f - (grad_hor f, N)` and
/// `|grad_M f|^2 = |grad_hor f|^2 + |grad_F f|^2` at total-space points.
pub fn verify_laplacian_split(
    s: &KKSubmersion,
    f: &ScalarField,
    sample_points: &[Vec<f64>],
    cfg: &DifferentiationConfig,
    tolerance: f64,
) -> Result<LaplacianSplitReports> {
    let n = s.base_dim();
    let total = s.total_metric_field();
    let chart = total.domain().clone();

    let rows: Vec<(f64, f64)> = sample_points
        .par_iter()
        .map(|p| {
            chart.ensure_interior(p, &cfg.margin(&chart, 1))?;
            let (x, y) = s.split(p);
            let g0 = total.at(p)?;
            let ginv = total.inverse_at(p)?;
            let a = s.connection_at(x, y);

            let hess = hessian(&total, f, p, cfg)?;
            let lap_m = (&ginv * &hess).trace();

            // horizontal trace through the basic lifts: sum over an
            // orthonormal base frame equals the g_B-inverse contraction
            let gb_inv = s.base_metric_field().inverse_at(x)?;
            let mut lifts = Vec::with_capacity(n);
            for al in 0..n {
                let mut l = DVector::zeros(chart.dim());
                l[al] = 1.0;
                for i in 0..s.fiber_dim() {
                    l[n + i] = -a[(i, al)];
                }
                lifts.push(l);
            }
            let mut lap_hor = 0.0;
            for al in 0..n {
                for be in 0..n {
                    lap_hor +=
                        gb_inv[(al, be)] * (lifts[al].transpose() * &hess * &lifts[be])[(0, 0)];
                }
            }

            // fiber Laplacian of the restriction
            let f_arc = f.clone();
            let x_frozen = x.to_vec();
            let f_fiber = ScalarField::new(s.fiber_chart().clone(), move |yy| {
                let mut p2 = x_frozen.clone();
                p2.extend_from_slice(yy);
                f_arc.at(&p2)
            });
            let lap_f = laplacian(&s.fiber_metric_field(x), &f_fiber, y, cfg)?;

            // gradient splitting
            let mut df = DVector::zeros(chart.dim());
            for axis in 0..chart.dim() {
                df[axis] = fd::partial(&chart, p, axis, cfg, |pp| Ok(f.at(pp)))?;
            }
            let grad_m = &ginv * &df;
            let grad_hor = s.horizontal_part(&a, &grad_m);
            let nvec = s.mean_curvature_at(&total, p, cfg)?;
            let hor_term = metric_dot(&g0, &grad_hor, &nvec);

            let split_residual = lap_m - (lap_hor + lap_f - hor_term);

            let norm_m = df.dot(&grad_m);
            let norm_hor = metric_dot(&g0, &grad_hor, &grad_hor);
            let gf_inv = s.fiber_metric_field(x).inverse_at(y)?;
            let mut dyf = DVector::zeros(s.fiber_dim());
            for i in 0..s.fiber_dim() {
                dyf[i] = df[n + i];
            }
            let norm_fiber = (dyf.transpose() * gf_inv * &dyf)[(0, 0)];
            let pyth_residual = norm_m - norm_hor - norm_fiber;

            Ok((
                normalized(split_residual, lap_m),
                normalized(pyth_residual, norm_m),
            ))
        })
        .collect::<Result<_>>()?;

    let (split_res, pyth_res): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    Ok(LaplacianSplitReports {
        split: IdentityReport::from_residuals(
            IdentityId::LaplacianSplit,
            sample_points.to_vec(),
            split_res,
            tolerance,
            "lap_M f - (lap_hor f + lap_F f - (grad_hor f, N)), normalized",
        ),
        pythagoras: IdentityReport::from_residuals(
            IdentityId::GradientPythagoras,
            sample_points.to_vec(),
            pyth_res,
            tolerance,
            "|grad_M f|^2 - |grad_hor f|^2 - |grad_F f|^2, normalized",
        ),
    })
}

/// Three standard smooth test functions adapted to the product chart's
/// periodicities, mixing base-only, base-fiber and fiber-heavy behavior.
pub fn standard_test_functions(s: &KKSubmersion) -> Vec<ScalarField> {
    let chart = s.product_chart();
    let n = s.base_dim();
    let dim = chart.dim();
    let axis_factor = move |chart: &crate::chart::ChartDomain, axis: usize, x: &[f64]| -> f64 {
        let (lo, _) = chart.bounds()[axis];
        let len = chart.axis_length(axis);
        let t = (x[axis] - lo) / len;
        if chart.periodic()[axis] {
            (2.0 * std::f64::consts::PI * t).cos()
        } else {
            (std::f64::consts::PI * t).sin()
        }
    };
    let c1 = chart.clone();
    let f1 = ScalarField::new(chart.clone(), move |x| axis_factor(&c1, 0, x));
    let c2 = chart.clone();
    let f2 = ScalarField::new(chart.clone(), move |x| {
        axis_factor(&c2, 0, x) * axis_factor(&c2, n, x)
    });
    let c3 = chart.clone();
    let last_base = n - 1;
    let f3 = ScalarField::new(chart, move |x| {
        axis_factor(&c3, n, x) * (1.0 + 0.5 * axis_factor(&c3, last_base, x))
            + 0.25 * axis_factor(&c3, dim - 1, x)
    });
    vec![f1, f2, f3]
}

/// Output of [`verify_base_derivative_identities`]: the three residual
/// families for the pushforward density at one base point.
#[derive(Clone, Debug)]
pub struct BaseDerivativeReports {
    /// Directional derivative of `phi^B` vs its fiber-integral form, one
    /// residual per base frame direction.
    pub directional: IdentityReport,
    /// Base Laplacian of `phi^B` vs its fiber-integral form.
    pub laplacian: IdentityReport,
    /// Base gradient-norm identity; only meaningful under the transport
    /// hypothesis.
    pub gradient_norm: IdentityReport,
    /// Whether the fiberwise-constancy criterion held at this base point.
    pub hypothesis_met: bool,
    /// Largest fiberwise standard deviation found by the criterion.
    pub measure_variance: f64,
}

/// Verifies the first- and second-derivative formulas for the pushforward
/// density at base point `b`, plus the gradient-norm identity (reported as
/// informational when the hypothesis fails).
pub fn verify_base_derivative_identities(
    s: &KKSubmersion,
    b: &[f64],
    grid: &[usize],
    cfg: &DifferentiationConfig,
    tolerance: f64,
    hypothesis_tol: f64,
) -> Result<BaseDerivativeReports> {
    let n = s.base_dim();
    let base_chart = s.base_chart().clone();
    base_chart.ensure_interior(b, &cfg.margin(&base_chart, 1))?;

    let measure = s.check_measure_preserving(b, grid, cfg)?;
    let hypothesis_met = measure.max_fiber_variance <= hypothesis_tol;

    let total = s.total_metric_field();
    let chart = total.domain().clone();
    let phi_b = s.pushforward_density(grid);
    let phi_b_scalar = phi_b.as_scalar().clone();
    let phi_b_at = phi_b.at(b)?;
    let base_metric = s.base_metric_field();
    let frame_b = s.base_orthonormal_frame(b)?;
    let phi_field = s.phi_total_field();

    // horizontal data at a fiber point for base frame direction `al`
    let lift_of = |al: usize, p: &[f64]| -> DVector<f64> {
        let (x, y) = p.split_at(n);
        let a = s.connection_at(x, y);
        let mut l = DVector::zeros(chart.dim());
        for be in 0..n {
            let coeff = frame_b[al][be];
            l[be] += coeff;
            for i in 0..s.fiber_dim() {
                l[n + i] -= coeff * a[(i, be)];
            }
        }
        l
    };

    // (i) directional derivatives
    let mut directional_res = Vec::with_capacity(n);
    let mut directional_pts = Vec::with_capacity(n);
    for al in 0..n {
        let mut lhs = 0.0;
        for be in 0..n {
            let d: f64 = fd::partial(&base_chart, b, be, cfg, |x| Ok(phi_b_scalar.at(x)))?;
            lhs += frame_b[al][be] * d;
        }
        let rhs = s.fiber_integrate(
            b,
            |x, y| {
                let p = s.join(x, y);
                let lift = lift_of(al, &p);
                let g0 = total.at(&p)?;
                let mut dphi = 0.0;
                for axis in 0..chart.dim() {
                    let d: f64 = fd::partial(&chart, &p, axis, cfg, |pp| Ok(phi_field.at(pp)))?;
                    dphi += lift[axis] * d;
                }
                let nvec = s.mean_curvature_at(&total, &p, cfg)?;
                let phi = phi_field.at(&p);
                Ok(dphi - metric_dot(&g0, &lift, &nvec) * phi)
            },
            grid,
        )?;
        directional_res.push(normalized(lhs - rhs, lhs));
        directional_pts.push(b.to_vec());
    }

    // (ii) base Laplacian vs the bracket integral
    let lap_lhs = laplacian(&base_metric, &phi_b_scalar, b, cfg)?;
    let lap_rhs = s.fiber_integrate(
        b,
        |x, y| {
            let p = s.join(x, y);
            let g0 = total.at(&p)?;
            let ginv = total.inverse_at(&p)?;
            let a = s.connection_at(x, y);
            let phi = phi_field.at(&p);

            let hess = hessian(&total, &phi_field, &p, cfg)?;
            let gb_inv = base_metric.inverse_at(x)?;
            let mut lap_hor = 0.0;
            let mut lifts = Vec::with_capacity(n);
            for al in 0..n {
                let mut l = DVector::zeros(chart.dim());
                l[al] = 1.0;
                for i in 0..s.fiber_dim() {
                    l[n + i] = -a[(i, al)];
                }
                lifts.push(l);
            }
            for al in 0..n {
                for be in 0..n {
                    lap_hor +=
                        gb_inv[(al, be)] * (lifts[al].transpose() * &hess * &lifts[be])[(0, 0)];
                }
            }

            let mut dphi = DVector::zeros(chart.dim());
            for axis in 0..chart.dim() {
                dphi[axis] = fd::partial(&chart, &p, axis, cfg, |pp| Ok(phi_field.at(pp)))?;
            }
            let grad = &ginv * &dphi;
            let grad_hor = s.horizontal_part(&a, &grad);
            let hor_norm2 = metric_dot(&g0, &grad_hor, &grad_hor);

            let nvec = s.mean_curvature_at(&total, &p, cfg)?;
            let delta_n = s.check_delta_n(&p, cfg)?;
            let shifted = &grad_hor / phi - &nvec;
            let shifted_norm2 = metric_dot(&g0, &shifted, &shifted);

            Ok((lap_hor / phi - hor_norm2 / (phi * phi) + delta_n + shifted_norm2) * phi)
        },
        grid,
    )?;
    let laplacian_res = normalized(lap_lhs - lap_rhs, lap_lhs);

    // (iii) gradient-norm identity
    let grad_b = gradient(&base_metric, &phi_b_scalar, b, cfg)?;
    let grad_lhs = grad_b.norm_sq / phi_b_at;
    let grad_rhs = s.fiber_integrate(
        b,
        |x, y| {
            let p = s.join(x, y);
            let g0 = total.at(&p)?;
            let ginv = total.inverse_at(&p)?;
            let a = s.connection_at(x, y);
            let phi = phi_field.at(&p);
            let mut dphi = DVector::zeros(chart.dim());
            for axis in 0..chart.dim() {
                dphi[axis] = fd::partial(&chart, &p, axis, cfg, |pp| Ok(phi_field.at(pp)))?;
            }
            let grad = &ginv * &dphi;
            let grad_hor = s.horizontal_part(&a, &grad);
            let nvec = s.mean_curvature_at(&total, &p, cfg)?;
            let shifted = &grad_hor / phi - &nvec;
            Ok(metric_dot(&g0, &shifted, &shifted) * phi)
        },
        grid,
    )?;
    let gradient_res = normalized(grad_lhs - grad_rhs, grad_lhs);

    let hypothesis_note = if hypothesis_met {
        "transport hypothesis certified".to_string()
    } else {
        format!(
            "informational: transport hypothesis fails here \
             (fiberwise std {:.3e}); the gap need not vanish",
            measure.max_fiber_variance
        )
    };

    Ok(BaseDerivativeReports {
        directional: IdentityReport::from_residuals(
            IdentityId::BaseDerivativeFirst,
            directional_pts,
            directional_res,
            tolerance,
            "X phi^B vs fiber integral of (X phi^M - (X, N) phi^M), per frame direction",
        ),
        laplacian: IdentityReport::from_residuals(
            IdentityId::BaseDerivativeLaplacian,
            vec![b.to_vec()],
            vec![laplacian_res],
            tolerance,
            "lap_B phi^B vs its fiber-integral bracket",
        ),
        gradient_norm: IdentityReport::from_residuals(
            IdentityId::BaseDerivativeGradientNorm,
            vec![b.to_vec()],
            vec![gradient_res],
            tolerance,
            format!("|grad_B phi^B|^2 / phi^B vs fiber integral; {hypothesis_note}"),
        ),
        hypothesis_met,
        measure_variance: measure.max_fiber_variance,
    })
}

/// The fiber-integral equality for the weighted base scalar curvature at
/// base point `b`:
/// `phi^B R^B_inf = int_F (R^M_inf - R^F_inf + |A|^2 + |T|^2) phi^M dvol_F`.
///
/// Refuses with [`Error::HypothesisUnmet`] when the fiberwise-constancy
/// criterion fails at `b`, rather than reporting a spurious residual.
pub fn verify_main_equality(
    s: &KKSubmersion,
    b: &[f64],
    grid: &[usize],
    cfg: &DifferentiationConfig,
    tolerance: f64,
    hypothesis_tol: f64,
) -> Result<MainEqualityReport> {
    let measure = s.check_measure_preserving(b, grid, cfg)?;
    if measure.max_fiber_variance > hypothesis_tol {
        return Err(Error::HypothesisUnmet(format!(
            "fiber transport is not measure-preserving at {:?}: fiberwise std {:.3e} \
             exceeds {hypothesis_tol:.1e}; the fiber-integral equality does not apply",
            b, measure.max_fiber_variance
        )));
    }

    let base_w = s.base_weighted(grid);
    let phi_b = base_w.phi.at(b)?;
    let lhs = phi_b * modified_scalar_inf(&base_w, b, cfg)?;

    let total = s.total_metric_field();
    let total_w = s.total_weighted();
    let fiber_w = s.fiber_weighted(b);
    let phi_field = s.phi_total_field();

    let mut slack_acc = NeumaierSum::new();
    let spacing = {
        let g = crate::quad::PeriodicGrid::new(s.fiber_chart(), grid)?;
        g.cell_volume()
    };
    let rhs = s.fiber_integrate(
        b,
        |x, y| {
            let p = s.join(x, y);
            let r_m_inf = modified_scalar_inf(&total_w, &p, cfg)?;
            let r_f_inf = modified_scalar_inf(&fiber_w, y, cfg)?;
            let frame = s.adapted_frame(&p)?;
            let tensors = s.oneill_tensors_with_frame(&total, &p, &frame, cfg)?;
            let phi = phi_field.at(&p);
            let sqrt_det = s.fiber_metric_field(x).sqrt_det_at(y)?;
            slack_acc.add((tensors.a_norm2 + tensors.t_norm2) * phi * sqrt_det);
            Ok((r_m_inf - r_f_inf + tensors.a_norm2 + tensors.t_norm2) * phi)
        },
        grid,
    )?;
    let slack = slack_acc.total() * spacing;

    let residual = normalized(lhs - rhs, lhs);
    Ok(MainEqualityReport {
        base_point: b.to_vec(),
        lhs,
        rhs,
        residual,
        slack,
        passed: residual.abs() <= tolerance,
        tolerance,
    })
}

/// The `q = dim F` bound `R^B_q >= avg_F (R^M - R^F)` at sampled base
/// points, with the pointwise Cauchy-Schwarz check alongside.  Requires
/// `phi^M = 1` and the transport hypothesis.
pub fn verify_theorem2_2(
    s: &KKSubmersion,
    base_points: &[Vec<f64>],
    grid: &[usize],
    cfg: &DifferentiationConfig,
    tolerance: f64,
    cs_tolerance: f64,
    hypothesis_tol: f64,
) -> Result<Theorem22Report> {
    // precondition: unweighted total space
    for b in base_points {
        for y in crate::quad::PeriodicGrid::uniform(s.fiber_chart(), 4)?.nodes() {
            let phi = s.phi_m_at(b, &y);
            if (phi - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "the q = dim F bound requires phi_M = 1; found phi = {phi} at {b:?} x {y:?}"
                )));
            }
        }
    }

    let q = s.fiber_dim() as f64;
    let total = s.total_metric_field();
    let base_w = s.base_weighted(grid);
    let fiber_cs_grid = crate::quad::PeriodicGrid::uniform(s.fiber_chart(), 8)?;

    let mut violations = Vec::with_capacity(base_points.len());
    let mut slack = Vec::with_capacity(base_points.len());
    let mut cs_points = Vec::new();
    let mut cs_res = Vec::new();

    for b in base_points {
        let measure = s.check_measure_preserving(b, grid, cfg)?;
        if measure.max_fiber_variance > hypothesis_tol {
            return Err(Error::HypothesisUnmet(format!(
                "fiber transport is not measure-preserving at {:?} (fiberwise std {:.3e})",
                b, measure.max_fiber_variance
            )));
        }

        let vol = s.fiber_integrate(b, |_, _| Ok(1.0), grid)?;
        let fiber_metric = s.fiber_metric_field(b);
        let integral = s.fiber_integrate(
            b,
            |x, y| {
                let p = s.join(x, y);
                let r_m = scalar_curvature(&total, &p, cfg)?;
                let r_f = scalar_curvature(&fiber_metric, y, cfg)?;
                Ok(r_m - r_f)
            },
            grid,
        )?;
        let lhs = integral / vol;
        let rhs = modified_scalar_q(&base_w, q, b, cfg)?;
        violations.push(normalized((lhs - rhs).max(0.0), rhs));
        slack.push(rhs - lhs);

        for y in fiber_cs_grid.nodes() {
            let p = s.join(b, &y);
            let frame = s.adapted_frame(&p)?;
            let t = s.oneill_tensors_with_frame(&total, &p, &frame, cfg)?;
            cs_res.push((t.n_norm2 / q - t.t_norm2).max(0.0));
            cs_points.push(p);
        }
    }

    Ok(Theorem22Report {
        report: IdentityReport::from_residuals(
            IdentityId::Theorem22,
            base_points.to_vec(),
            violations,
            tolerance,
            "violation of R^B_q >= avg_F (R^M - R^F), normalized by max(1, |R^B_q|)",
        ),
        slack,
        cauchy_schwarz: IdentityReport::from_residuals(
            IdentityId::CauchySchwarz,
            cs_points,
            cs_res,
            cs_tolerance,
            "violation of |T|^2 - |N|^2 / q >= 0 at fiber samples",
        ),
    })
}

/// Measure-hypothesis screening as an identity report: residuals are the
/// per-direction fiberwise standard deviations at each base point.
pub fn verify_measure_hypothesis(
    s: &KKSubmersion,
    base_points: &[Vec<f64>],
    grid: &[usize],
    cfg: &DifferentiationConfig,
    tolerance: f64,
) -> Result<IdentityReport> {
    let mut residuals = Vec::with_capacity(base_points.len());
    for b in base_points {
        let m = s.check_measure_preserving(b, grid, cfg)?;
        residuals.push(m.max_fiber_variance);
    }
    Ok(IdentityReport::from_residuals(
        IdentityId::MeasureHypothesis,
        base_points.to_vec(),
        residuals,
        tolerance,
        "fiberwise standard deviation of (X phi^M)/phi^M - (X, N), max over directions",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::sample::sample_box;
    use std::f64::consts::PI;

    fn cfg() -> DifferentiationConfig {
        DifferentiationConfig::default()
    }

    fn sphere_base_region() -> Vec<(f64, f64)> {
        vec![(0.3, PI - 0.3), (0.0, 2.0 * PI)]
    }

    #[test]
    fn oneill_identity_on_product_is_tight() {
        let s = catalog::product_torus_circle(1.0);
        let pts = sample_box(&[(0.0, 2.0 * PI), (0.0, 2.0 * PI), (0.0, 2.0 * PI)], 5, 1);
        let rep = verify_oneill_identity(&s, &pts, &cfg(), 1e-8).unwrap();
        assert!(rep.passed, "max {}", rep.max_abs_residual);
    }

    #[test]
    fn oneill_identity_on_catalog_submersions() {
        for (s, region) in [
            (catalog::hopf(1.0), sphere_base_region()),
            (catalog::hopf(0.5), sphere_base_region()),
            (catalog::warped_circle_default(), sphere_base_region()),
            (catalog::heisenberg(), vec![(0.2, 0.8), (0.2, 0.8)]),
        ] {
            let mut reg = region;
            reg.push((0.0, 2.0 * PI));
            let pts = sample_box(&reg, 6, 2);
            let rep = verify_oneill_identity(&s, &pts, &cfg(), 1e-4).unwrap();
            assert!(rep.passed, "max {}", rep.max_abs_residual);
        }
    }

    #[test]
    fn laplacian_split_on_test_functions() {
        for s in [
            catalog::product_torus_circle(1.0),
            catalog::hopf(0.5),
            catalog::warped_circle_default(),
        ] {
            let mut region = if s.base_chart().periodic()[0] {
                vec![(0.0, 2.0 * PI), (0.0, 2.0 * PI)]
            } else {
                sphere_base_region()
            };
            region.push((0.0, 2.0 * PI));
            let pts = sample_box(&region, 4, 3);
            for f in standard_test_functions(&s) {
                let reps = verify_laplacian_split(&s, &f, &pts, &cfg(), 1e-4).unwrap();
                assert!(
                    reps.split.passed,
                    "split max {}",
                    reps.split.max_abs_residual
                );
                assert!(
                    reps.pythagoras.passed,
                    "pythagoras max {}",
                    reps.pythagoras.max_abs_residual
                );
            }
        }
    }

    #[test]
    fn base_derivative_identities_on_warped() {
        // phi^B = 2 pi f: all three families hold
        let s = catalog::warped_circle_default();
        let rep =
            verify_base_derivative_identities(&s, &[1.0, 0.7], &[48], &cfg(), 1e-4, 1e-6).unwrap();
        assert!(rep.hypothesis_met);
        assert!(
            rep.directional.passed,
            "dir {}",
            rep.directional.max_abs_residual
        );
        assert!(
            rep.laplacian.passed,
            "lap {}",
            rep.laplacian.max_abs_residual
        );
        assert!(
            rep.gradient_norm.passed,
            "grad {}",
            rep.gradient_norm.max_abs_residual
        );

        // and the directional derivative is genuinely nonzero: 2 pi f'(u)
        let u = 1.0_f64;
        let dphi_du = -u.sin() * u.cos().exp() * 2.0 * PI;
        assert!(dphi_du.abs() > 1.0);
    }

    #[test]
    fn base_derivative_identities_on_violating_example() {
        let s = catalog::violating();
        let rep = verify_base_derivative_identities(&s, &[0.8], &[48], &cfg(), 1e-4, 1e-6).unwrap();
        assert!(!rep.hypothesis_met);
        // (i) and (ii) need no hypothesis
        assert!(
            rep.directional.passed,
            "dir {}",
            rep.directional.max_abs_residual
        );
        assert!(
            rep.laplacian.passed,
            "lap {}",
            rep.laplacian.max_abs_residual
        );
        // (iii) is informational: the gap is genuinely nonzero here
        assert!(!rep.gradient_norm.passed);
    }

    #[test]
    fn main_equality_on_hopf() {
        let s = catalog::hopf(0.5);
        let rep = verify_main_equality(&s, &[1.2, 0.4], &[64], &cfg(), 1e-4, 1e-6).unwrap();
        // LHS = phi^B R^B_inf = (2 pi 0.5) * 8 = 8 pi
        assert!((rep.lhs - 8.0 * PI).abs() < 1e-3, "lhs {}", rep.lhs);
        assert!(rep.passed, "residual {}", rep.residual);
        // slack = int |A|^2 dvol_F = 2 eps^2 * 2 pi eps
        let expected_slack = 2.0 * 0.25 * 2.0 * PI * 0.5;
        assert!(
            (rep.slack - expected_slack).abs() < 1e-4,
            "slack {}",
            rep.slack
        );
    }

    #[test]
    fn main_equality_on_product_with_separable_weight() {
        // nonconstant phi^M = a(x1) b(y) still satisfies the hypothesis on a
        // metric product, exercising the weighted route end to end
        let s = catalog::product_torus_circle(1.0)
            .with_density(|x, y| (x[0].cos()).exp() * (1.0 + 0.5 * y[0].sin()));
        let rep = verify_main_equality(&s, &[1.3, 2.1], &[64], &cfg(), 1e-4, 1e-6).unwrap();
        assert!(rep.passed, "residual {}", rep.residual);
    }

    #[test]
    fn main_equality_refuses_on_violating_example() {
        let s = catalog::violating();
        match verify_main_equality(&s, &[0.8], &[48], &cfg(), 1e-4, 1e-6) {
            Err(Error::HypothesisUnmet(msg)) => {
                assert!(msg.contains("not measure-preserving"));
            }
            other => panic!("expected hypothesis-unmet, got {other:?}"),
        }
    }

    #[test]
    fn theorem22_on_catalog() {
        let c = cfg();
        // hopf(1): R^B_q = 8, avg(R^M - R^F) = 6, slack 2 = |A|^2
        let s = catalog::hopf(1.0);
        let rep = verify_theorem2_2(&s, &[vec![1.1, 0.3]], &[48], &c, 1e-4, 1e-8, 1e-6).unwrap();
        assert!(rep.report.passed);
        assert!((rep.slack[0] - 2.0).abs() < 1e-4, "slack {}", rep.slack[0]);
        assert!(rep.cauchy_schwarz.passed);

        // heisenberg: R^B_q = 0 >= -1/2, slack 1/2
        let s = catalog::heisenberg();
        let rep = verify_theorem2_2(&s, &[vec![0.5, 0.5]], &[48], &c, 1e-4, 1e-8, 1e-6).unwrap();
        assert!(rep.report.passed);
        assert!((rep.slack[0] - 0.5).abs() < 1e-4, "slack {}", rep.slack[0]);

        // warped circle, q = 1: equality (slack ~ 0)
        let s = catalog::warped_circle_default();
        let rep = verify_theorem2_2(&s, &[vec![1.0, 0.7]], &[48], &c, 1e-4, 1e-8, 1e-6).unwrap();
        assert!(rep.report.passed);
        assert!(rep.slack[0].abs() < 1e-4, "slack {}", rep.slack[0]);
    }

    #[test]
    fn theorem22_rejects_weighted_total_space() {
        let s = catalog::product_torus_circle(1.0).with_density(|x, _| 1.0 + 0.1 * x[0].cos());
        assert!(matches!(
            verify_theorem2_2(&s, &[vec![1.0, 1.0]], &[16], &cfg(), 1e-4, 1e-8, 1e-6),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn cauchy_schwarz_holds_even_on_violating_example() {
        let s = catalog::violating();
        let pts = sample_box(&[(0.3, 1.2), (0.0, 2.0 * PI)], 10, 4);
        let rep = verify_cauchy_schwarz(&s, &pts, &cfg(), 1e-8).unwrap();
        assert!(rep.passed, "max violation {}", rep.max_abs_residual);
    }

    #[test]
    fn measure_hypothesis_report_thresholds() {
        let c = cfg();
        let good = catalog::hopf(1.0);
        let rep = verify_measure_hypothesis(&good, &[vec![1.0, 0.2]], &[48], &c, 1e-6).unwrap();
        assert!(rep.passed);

        let bad = catalog::violating();
        let rep = verify_measure_hypothesis(&bad, &[vec![0.8]], &[48], &c, 1e-6).unwrap();
        assert!(!rep.passed);
        assert!(rep.max_abs_residual > 0.01);
    }
}
