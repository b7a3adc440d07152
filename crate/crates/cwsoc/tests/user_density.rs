//! End-to-end exercise of a user-registered density through the whole
//! pipeline: moments, dual solves, the gap scan, the quartic expansion, the
//! chain sampler and the fluctuation normalization.
//!
//! The density is the quadratic bump `f(z) = (3/4)(1 - z^2)` on `[-1, 1]`,
//! whose moments are exact: `sigma^2 = 1/5`, `mu4 = 3/35`, `mu6 = 1/21`.

use cwsoc::cramer::{expansion_coefficients, rate_gap_scan, solve_dual, DEFAULT_TOL};
use cwsoc::experiment::admissible_grid;
use cwsoc::fluctuations::{fluctuation_test, normalize_fluctuations, QuarticLaw};
use cwsoc::measure::SourceMeasure;
use cwsoc::sampler::{mcmc_sample, McmcParams};

fn bump() -> SourceMeasure {
    SourceMeasure::from_density(|z: f64| 0.75 * (1.0 - z * z).max(0.0), 1.0, 0.0).unwrap()
}

#[test]
fn bump_moments_are_exact() {
    let m = bump();
    assert!((m.variance() - 0.2).abs() < 1e-10);
    assert!((m.mu4() - 3.0 / 35.0).abs() < 1e-10);
    assert!((m.mu6() - 1.0 / 21.0).abs() < 1e-10);
    let rep = m.concentration_conditions();
    assert!(rep.has_density && rep.overall);
}

#[test]
fn bump_dual_solver_behaves_like_the_builtins() {
    let m = bump();
    let s2 = m.variance();
    // Minimum of I at the concentration point.
    let cv = solve_dual(&m, 0.0, s2, DEFAULT_TOL).unwrap();
    assert!(cv.value.abs() < 1e-10);
    let (u, v) = cv.maximizer.unwrap();
    assert!(u.abs() < 1e-8 && v.abs() < 1e-8);
    // Evenness and the dual-coordinate inequality off-center.
    let plus = solve_dual(&m, 0.1, 0.22, DEFAULT_TOL).unwrap();
    let minus = solve_dual(&m, -0.1, 0.22, DEFAULT_TOL).unwrap();
    assert!((plus.value - minus.value).abs() < 1e-10);
    assert!(plus.maximizer.unwrap().0 > 0.1 / 0.22);
}

#[test]
fn bump_gap_scan_and_expansion() {
    let m = bump();
    let s2 = m.variance();
    let grid = admissible_grid(&m, 40);
    let rep = rate_gap_scan(&m, &grid);
    assert!(rep.violations.is_empty(), "{:?}", rep.violations);
    assert!(rep.failures.is_empty(), "{:?}", rep.failures);
    let (px, py) = rep.polished.expect("polish");
    assert!(
        (px * px + (py - s2).powi(2)).sqrt() < 1e-3,
        "polished at ({px}, {py})"
    );

    let fit = expansion_coefficients(&m, 0.1).unwrap();
    let want_a02 = 0.5 / (m.mu4() - s2 * s2); // 875/80
    let want_a40 = m.mu4() / (12.0 * s2.powi(4)); // 1875/420
    assert!((want_a02 - 875.0 / 80.0).abs() < 1e-9);
    assert!((want_a40 - 1875.0 / 420.0).abs() < 1e-9);
    assert!(
        (fit.a02 / want_a02 - 1.0).abs() < 0.02,
        "a02 = {} vs {want_a02}",
        fit.a02
    );
    assert!(
        (fit.a40 / want_a40 - 1.0).abs() < 0.02,
        "a40 = {} vs {want_a40}",
        fit.a40
    );
}

#[test]
fn bump_chain_fluctuations_approach_the_quartic_law() {
    let m = bump();
    let n = 400;
    let params = McmcParams {
        sweeps: 80_000,
        burn_in: 8_000,
        thin: 10,
    };
    let (samples, diag) = mcmc_sample(&m, n, params, 13).unwrap();
    assert!(diag.ess > 500.0, "ess = {}", diag.ess);
    let sn: Vec<f64> = samples.iter().map(|(s, _)| *s).collect();
    let normalized = normalize_fluctuations(&m, &sn, n);
    let law = QuarticLaw::standard();
    let rep = fluctuation_test(&normalized, &law, Some(diag.ess), 0.01, "mcmc-bump");
    // Finite-n bias plus chain noise: we only ask for desk-scale closeness
    // here, not the asymptotic-regime thresholds of the acceptance suite.
    assert!(rep.ks_stat < 0.08, "KS = {}", rep.ks_stat);
    assert!((rep.m4 - law.m4()).abs() < 0.6, "m4 = {}", rep.m4);
}
