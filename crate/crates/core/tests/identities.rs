//! Exact-identity battery: every verified relation on every catalog
//! submersion at pseudo-randomly chosen interior points, plus the
//! step-halving consistency check.

use std::collections::BTreeMap;

use subcurv::catalog;
use subcurv::fd::DifferentiationConfig;
use subcurv::identity::{
    standard_test_functions, verify_base_derivative_identities, verify_cauchy_schwarz,
    verify_laplacian_split, verify_main_equality, verify_oneill_identity, verify_theorem2_2,
};
use subcurv::Error;

fn cfg() -> DifferentiationConfig {
    DifferentiationConfig::default()
}

fn submersion_entries() -> Vec<(String, subcurv::catalog::CatalogEntry)> {
    let mut out = Vec::new();
    for (id, params) in [
        ("product", vec![]),
        ("hopf", vec![("eps", 1.0)]),
        ("hopf", vec![("eps", 0.5)]),
        ("warped_circle", vec![]),
        ("heisenberg", vec![]),
    ] {
        let mut map = BTreeMap::new();
        for (k, v) in params.clone() {
            map.insert(k.to_string(), v);
        }
        let label = if params.is_empty() {
            id.to_string()
        } else {
            format!("{id}({})", params[0].1)
        };
        out.push((label, catalog::build(id, &map).unwrap()));
    }
    out
}

#[test]
fn oneill_identity_battery_at_25_points() {
    for (label, entry) in submersion_entries() {
        let s = entry.as_submersion().unwrap();
        let points = entry.samples(25, 1234);
        let rep = verify_oneill_identity(s, &points, &cfg(), 1e-4).unwrap();
        assert!(
            rep.passed,
            "{label}: max residual {:e}",
            rep.max_abs_residual
        );
    }
}

#[test]
fn oneill_residual_shrinks_with_step() {
    // halving both steps must shrink the residual consistent with a
    // fourth-order stencil; at coarse steps truncation dominates roundoff
    let coarse = DifferentiationConfig {
        step: 2e-2,
        nested_step: 4e-2,
        ..cfg()
    };
    let fine = DifferentiationConfig {
        step: 1e-2,
        nested_step: 2e-2,
        ..coarse
    };
    let entry = catalog::build("hopf", &BTreeMap::new()).unwrap();
    let s = entry.as_submersion().unwrap();
    let points = entry.samples(5, 77);
    let r_coarse = verify_oneill_identity(s, &points, &coarse, 1.0).unwrap();
    let r_fine = verify_oneill_identity(s, &points, &fine, 1.0).unwrap();
    let ratio = r_coarse.max_abs_residual / r_fine.max_abs_residual;
    assert!(
        ratio > 8.0,
        "expected at least ~order-3 shrinkage, got ratio {ratio} \
         (coarse {:e}, fine {:e})",
        r_coarse.max_abs_residual,
        r_fine.max_abs_residual
    );
}

#[test]
fn laplacian_split_battery() {
    for (label, entry) in submersion_entries() {
        let s = entry.as_submersion().unwrap();
        let points = entry.samples(6, 4321);
        for (k, f) in standard_test_functions(s).iter().enumerate() {
            let reps = verify_laplacian_split(s, f, &points, &cfg(), 1e-4).unwrap();
            assert!(
                reps.split.passed,
                "{label} f{k}: split residual {:e}",
                reps.split.max_abs_residual
            );
            assert!(
                reps.pythagoras.passed,
                "{label} f{k}: pythagoras residual {:e}",
                reps.pythagoras.max_abs_residual
            );
        }
    }
}

#[test]
fn base_derivative_battery() {
    for (label, entry) in submersion_entries() {
        let s = entry.as_submersion().unwrap();
        for b in entry.base_samples(3, 99) {
            let rep = verify_base_derivative_identities(s, &b, &[48], &cfg(), 1e-4, 1e-6).unwrap();
            assert!(rep.hypothesis_met, "{label} at {b:?}");
            assert!(
                rep.directional.passed,
                "{label} at {b:?}: directional {:e}",
                rep.directional.max_abs_residual
            );
            assert!(
                rep.laplacian.passed,
                "{label} at {b:?}: laplacian {:e}",
                rep.laplacian.max_abs_residual
            );
            assert!(
                rep.gradient_norm.passed,
                "{label} at {b:?}: gradient-norm {:e}",
                rep.gradient_norm.max_abs_residual
            );
        }
    }
}

#[test]
fn main_equality_battery() {
    for (label, entry) in submersion_entries() {
        let s = entry.as_submersion().unwrap();
        for b in entry.base_samples(3, 55) {
            let rep = verify_main_equality(s, &b, &[64], &cfg(), 1e-4, 1e-6).unwrap();
            assert!(
                rep.passed,
                "{label} at {b:?}: residual {:e} (lhs {}, rhs {})",
                rep.residual, rep.lhs, rep.rhs
            );
            assert!(rep.slack >= -1e-12, "{label}: negative slack {}", rep.slack);
        }
    }
}

#[test]
fn theorem22_battery_and_slack_identity() {
    // slack closed forms: hopf -> 2 eps^2, heisenberg -> 1/2, warped -> 0
    let expectations: Vec<(&str, BTreeMap<String, f64>, f64)> = vec![
        ("hopf", BTreeMap::from([("eps".to_string(), 1.0)]), 2.0),
        ("hopf", BTreeMap::from([("eps".to_string(), 0.5)]), 0.5),
        ("heisenberg", BTreeMap::new(), 0.5),
        ("warped_circle", BTreeMap::new(), 0.0),
    ];
    for (id, params, expected_slack) in expectations {
        let entry = catalog::build(id, &params).unwrap();
        let s = entry.as_submersion().unwrap();
        let points = entry.base_samples(3, 777);
        let rep = verify_theorem2_2(s, &points, &[48], &cfg(), 1e-4, 1e-8, 1e-6).unwrap();
        assert!(rep.report.passed, "{id}: {:?}", rep.report.residuals);
        for slack in &rep.slack {
            assert!(
                (slack - expected_slack).abs() < 1e-4,
                "{id}: slack {slack} vs {expected_slack}"
            );
        }
        assert!(rep.cauchy_schwarz.passed);
    }
}

#[test]
fn cauchy_schwarz_battery_includes_violating_example() {
    for id in [
        "product",
        "hopf",
        "warped_circle",
        "heisenberg",
        "violating",
    ] {
        let entry = catalog::build(id, &BTreeMap::new()).unwrap();
        let s = entry.as_submersion().unwrap();
        let points = entry.samples(10, 31);
        let rep = verify_cauchy_schwarz(s, &points, &cfg(), 1e-8).unwrap();
        assert!(rep.passed, "{id}: violation {:e}", rep.max_abs_residual);
    }
}

#[test]
fn hypothesis_necessity() {
    // the violating example must fail the measure check and be refused by
    // the gated identities
    let entry = catalog::build("violating", &BTreeMap::new()).unwrap();
    let s = entry.as_submersion().unwrap();
    let b = entry.base_samples(1, 5)[0].clone();
    let measure = s.check_measure_preserving(&b, &[48], &cfg()).unwrap();
    assert!(measure.max_fiber_variance > 0.01);
    assert!(matches!(
        verify_main_equality(s, &b, &[48], &cfg(), 1e-4, 1e-6),
        Err(Error::HypothesisUnmet(_))
    ));

    // the informational gap of the gradient-norm identity: reported, not
    // asserted; it is strictly positive here
    let rep = verify_base_derivative_identities(s, &b, &[48], &cfg(), 1e-4, 1e-6).unwrap();
    assert!(!rep.hypothesis_met);
    assert!(rep.gradient_norm.max_abs_residual > 1e-3);
}

#[test]
fn riemann_symmetries_hold_on_every_catalog_metric() {
    // symmetry and first-Bianchi residuals stay within ten times a
    // Richardson truncation estimate, on manifold entries and on the
    // assembled total metrics of the submersion entries
    use subcurv::curvature::curvature_at;
    use subcurv::field::MetricField;

    let coarse = DifferentiationConfig {
        step: 1e-2,
        nested_step: 2e-2,
        ..cfg()
    };
    let fine = DifferentiationConfig {
        step: 5e-3,
        nested_step: 1e-2,
        ..coarse
    };

    let sym_residual = |m: &MetricField, x: &[f64]| -> (f64, f64) {
        let c = curvature_at(m, x, &coarse).unwrap();
        let cf = curvature_at(m, x, &fine).unwrap();
        let d = c.riemann_lowered.dim();
        let mut worst = 0.0_f64;
        let mut est = 1e-13_f64;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let v = c.riemann_lowered.get(i, j, k, l);
                        est = est.max((v - cf.riemann_lowered.get(i, j, k, l)).abs());
                        worst = worst.max((v + c.riemann_lowered.get(j, i, k, l)).abs());
                        worst = worst.max((v + c.riemann_lowered.get(i, j, l, k)).abs());
                        worst = worst.max((v - c.riemann_lowered.get(k, l, i, j)).abs());
                        worst = worst.max(
                            (v + c.riemann_lowered.get(i, k, l, j)
                                + c.riemann_lowered.get(i, l, j, k))
                            .abs(),
                        );
                    }
                }
            }
        }
        (worst, est)
    };

    let mut checked = 0;
    for id in [
        "sphere",
        "hyperbolic_plane",
        "hopf",
        "warped_circle",
        "heisenberg",
    ] {
        let entry = catalog::build(id, &BTreeMap::new()).unwrap();
        // deep interior so the coarse nested stencil fits
        let metric = match &entry.object {
            subcurv::catalog::CatalogObject::Weighted(w) => w.metric.clone(),
            subcurv::catalog::CatalogObject::Submersion(s) => s.total_metric_field(),
            _ => continue,
        };
        let mut region: Vec<(f64, f64)> = entry
            .sampling_region
            .iter()
            .map(|&(lo, hi)| {
                let inset = 0.25 * (hi - lo);
                (lo + inset, hi - inset)
            })
            .collect();
        if let subcurv::catalog::CatalogObject::Submersion(s) = &entry.object {
            region.extend_from_slice(s.fiber_chart().bounds());
        }
        for x in subcurv::sample::sample_box(&region, 3, 17) {
            let (worst, est) = sym_residual(&metric, &x);
            assert!(
                worst <= 10.0 * est,
                "{id} at {x:?}: residual {worst:e} vs estimate {est:e}"
            );
            checked += 1;
        }
    }
    assert!(checked >= 15);
}

#[test]
fn pushforward_density_is_positive_and_smooth() {
    for (label, entry) in submersion_entries() {
        let s = entry.as_submersion().unwrap();
        let phi_b = s.pushforward_density(&[48]);
        for b in entry.base_samples(5, 202) {
            let v = phi_b.at(&b).unwrap();
            assert!(v > 0.0, "{label} at {b:?}: {v}");
        }
    }
}
