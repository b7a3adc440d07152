//! Library tour: build a measure, walk the rate function along a slice,
//! recover the quartic expansion, and compare chain fluctuations with the
//! limit law.
//!
//!     cargo run --release --example rate_tour

use cwsoc::cramer::{expansion_coefficients, solve_dual, DEFAULT_TOL};
use cwsoc::fluctuations::{fluctuation_test, normalize_fluctuations, QuarticLaw};
use cwsoc::measure::SourceMeasure;
use cwsoc::sampler::{mcmc_sample, McmcParams};

fn main() -> cwsoc::Result<()> {
    let m = SourceMeasure::uniform(1.0)?;
    let s2 = m.variance();
    println!("measure {m}: sigma^2 = {s2:.6}, mu4 = {:.6}", m.mu4());

    println!("\nrate function along y = sigma^2:");
    println!("{:>8} {:>12} {:>12} {:>12}", "x", "I(x,y)", "u(x,y)", "gap");
    for k in 0..7 {
        let x = 0.05 * k as f64;
        let cv = solve_dual(&m, x, s2, DEFAULT_TOL)?;
        let (u, _) = cv.maximizer.unwrap();
        println!(
            "{x:>8.2} {:>12.6} {u:>12.6} {:>12.3e}",
            cv.value,
            cv.value - x * x / (2.0 * s2)
        );
    }

    let fit = expansion_coefficients(&m, 0.1)?;
    println!(
        "\nquartic expansion of the gap near (0, sigma^2):\n  \
         a02 = {:.5} (moment formula {:.5})\n  \
         a40 = {:.5} (moment formula {:.5})",
        fit.a02,
        0.5 / (m.mu4() - s2 * s2),
        fit.a40,
        m.mu4() / (12.0 * s2.powi(4)),
    );

    let n = 500;
    let params = McmcParams {
        sweeps: 60_000,
        burn_in: 6_000,
        thin: 5,
    };
    let (samples, diag) = mcmc_sample(&m, n, params, 2)?;
    let sn: Vec<f64> = samples.iter().map(|(s, _)| *s).collect();
    let normalized = normalize_fluctuations(&m, &sn, n);
    let rep = fluctuation_test(
        &normalized,
        &QuarticLaw::standard(),
        Some(diag.ess),
        0.01,
        "mcmc",
    );
    println!(
        "\nchain at n = {n}: acceptance {:.3}, ess {:.0}\n\
         normalized fluctuations vs quartic law: KS = {:.4} (critical {:.4}), m4 = {:.3}",
        diag.acceptance_rate, diag.ess, rep.ks_stat, rep.ks_critical, rep.m4
    );
    Ok(())
}
