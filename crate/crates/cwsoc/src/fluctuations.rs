//! The quartic limit law and the statistical comparisons.
//!
//! After the normalization `mu_4^{1/4} S_n / (sigma^2 n^{3/4})` the model sum
//! converges in law to the density `(4/3)^{1/4} Gamma(1/4)^{-1} exp(-s^4/12)`.
//! This module provides that law (pdf, cdf through the regularized incomplete
//! gamma, quantile, sampler, moments), the normalization map, KS-based
//! comparisons for both the fluctuation law and the concentration of
//! `(S_n/n, T_n/n)`, the pair density of the two-fold convolution of the pair
//! law, and the local-CLT density approximation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::{gamma, gamma_lr};

use crate::cramer::{solve_dual, DEFAULT_TOL};
use crate::measure::{rule, MeasureKind, SourceMeasure, TAIL_WIDTH};
use crate::quad;
use crate::stats::{ks_one_sample, mean_with_se};
use crate::{Error, Result};

/// The law with density `norm_const · exp(-a s^4)`.
#[derive(Debug, Clone, Copy)]
pub struct QuarticLaw {
    a: f64,
    norm_const: f64,
}

/// Regularized lower incomplete gamma `P(1/4, x)`.
///
/// For small arguments the library routine underflows to zero even though
/// `P ~ x^{1/4}` is far from negligible there; a short series covers that
/// range.
fn reg_gamma_quarter(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 0.5 {
        return gamma_lr(0.25, x);
    }
    // P(a, x) = x^a e^{-x} Σ_n x^n / Γ(a + n + 1) with a = 1/4.
    let mut term = 1.0 / gamma(1.25);
    let mut sum = term;
    let mut n = 0.0;
    while term > 1e-18 * sum {
        term *= x / (1.25 + n);
        sum += term;
        n += 1.0;
    }
    x.powf(0.25) * (-x).exp() * sum
}

impl QuarticLaw {
    /// Standard form `a = 1/12`, the limit of the normalized sum.
    pub fn standard() -> Self {
        QuarticLaw::with_coefficient(1.0 / 12.0).expect("1/12 is a valid coefficient")
    }

    pub fn with_coefficient(a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "quartic coefficient must be positive, got {a}"
            )));
        }
        // ∫ exp(-a s^4) ds = a^{-1/4} Gamma(1/4) / 2.
        Ok(QuarticLaw {
            a,
            norm_const: 2.0 * a.powf(0.25) / gamma(0.25),
        })
    }

    /// The law of the *unnormalized* `S_n/n^{3/4}` limit for measure `m`:
    /// `a = mu_4 / (12 sigma^8)`.
    pub fn for_measure(m: &SourceMeasure) -> Self {
        let s2 = m.variance();
        QuarticLaw::with_coefficient(m.mu4() / (12.0 * s2.powi(4)))
            .expect("moments of a valid measure give a valid coefficient")
    }

    pub fn coefficient(&self) -> f64 {
        self.a
    }

    pub fn norm_const(&self) -> f64 {
        self.norm_const
    }

    pub fn pdf(&self, s: f64) -> f64 {
        self.norm_const * (-self.a * s.powi(4)).exp()
    }

    /// CDF via the regularized lower incomplete gamma of order 1/4 in `a s^4`,
    /// split by sign; uniformly accurate in the tails.
    pub fn cdf(&self, s: f64) -> f64 {
        if s.is_nan() {
            return f64::NAN;
        }
        let x = self.a * s.powi(4);
        if x == 0.0 {
            return 0.5;
        }
        let g = if x.is_finite() { reg_gamma_quarter(x) } else { 1.0 };
        if s > 0.0 {
            0.5 + 0.5 * g
        } else {
            0.5 - 0.5 * g
        }
    }

    /// Inverse CDF by bisection on the analytic CDF.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "quantile level must lie in [0, 1], got {p}"
            )));
        }
        if p == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        if p == 1.0 {
            return Ok(f64::INFINITY);
        }
        let target = (2.0 * p - 1.0).abs();
        // |s| solves P(1/4, a s^4) = |2p - 1|; the mass is all below
        // a s^4 = 750.
        let mut lo = 0.0f64;
        let mut hi = (750.0 / self.a).powf(0.25);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if reg_gamma_quarter(self.a * mid.powi(4)) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * (1.0 + hi) {
                break;
            }
        }
        let s = 0.5 * (lo + hi);
        Ok(if p >= 0.5 { s } else { -s })
    }

    /// Draw by inverse transform.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let u: f64 = rng.gen();
                self.quantile(u).expect("u in (0,1)")
            })
            .collect()
    }

    /// `E[s^2] = Gamma(3/4) / (Gamma(1/4) sqrt(a))`; `≈ 1.17081` in standard form.
    pub fn m2(&self) -> f64 {
        gamma(0.75) / (gamma(0.25) * self.a.sqrt())
    }

    /// `E[s^4] = 1/(4a)`; `= 3` in standard form.
    pub fn m4(&self) -> f64 {
        0.25 / self.a
    }
}

/// Map raw `S_n` samples to `mu_4^{1/4} S_n / (sigma^2 n^{3/4})`.
pub fn normalize_fluctuations(m: &SourceMeasure, sn: &[f64], n: usize) -> Vec<f64> {
    let factor = m.mu4().powf(0.25) / (m.variance() * (n as f64).powf(0.75));
    sn.iter().map(|s| s * factor).collect()
}

/// Outcome of a fluctuation-law comparison.
#[derive(Debug, Clone)]
pub struct FluctuationReport {
    pub ks_stat: f64,
    /// KS critical value at the configured level for the effective count.
    pub ks_critical: f64,
    pub n_used: usize,
    /// Effective sample count the critical value was computed with.
    pub ess: f64,
    pub m2: f64,
    pub m2_se: f64,
    pub m4: f64,
    pub m4_se: f64,
    pub pass: bool,
    /// Provenance of the samples ("mcmc", "exact-gaussian", ...).
    pub sampler_tag: String,
}

/// One-sample KS of normalized samples against a quartic law, plus second and
/// fourth moment estimates. Autocorrelated inputs pass their effective sample
/// size so critical values and moment errors are deweighted accordingly.
pub fn fluctuation_test(
    normalized: &[f64],
    law: &QuarticLaw,
    ess: Option<f64>,
    alpha: f64,
    tag: &str,
) -> FluctuationReport {
    let n_used = normalized.len();
    let ess = ess.unwrap_or(n_used as f64).min(n_used as f64);
    let ks_stat = ks_one_sample(normalized, |s| law.cdf(s));
    let ks_critical = crate::stats::ks_critical(alpha, ess);
    let inflation = (n_used as f64 / ess.max(1.0)).sqrt();
    let sq: Vec<f64> = normalized.iter().map(|s| s * s).collect();
    let qu: Vec<f64> = normalized.iter().map(|s| s.powi(4)).collect();
    let (m2, m2_se) = mean_with_se(&sq);
    let (m4, m4_se) = mean_with_se(&qu);
    FluctuationReport {
        ks_stat,
        ks_critical,
        n_used,
        ess,
        m2,
        m2_se: m2_se * inflation,
        m4,
        m4_se: m4_se * inflation,
        pass: ks_stat <= ks_critical,
        sampler_tag: tag.to_string(),
    }
}

/// KS distance between a discrete law (atoms, probabilities) and a continuous
/// CDF, evaluated exactly on both sides of every atom.
pub fn ks_discrete_vs_cdf<F: Fn(f64) -> f64>(support: &[f64], probs: &[f64], cdf: F) -> f64 {
    assert_eq!(support.len(), probs.len());
    let mut acc = 0.0f64;
    let mut d = 0.0f64;
    for (&s, &p) in support.iter().zip(probs) {
        let f = cdf(s);
        d = d.max((f - acc).abs());
        acc += p;
        d = d.max((acc - f).abs());
    }
    d
}

/// Total variation distance between a discrete law and a continuous density,
/// comparing atom masses with the continuous mass of midpoint cells.
pub fn tv_discrete_vs_cdf<F: Fn(f64) -> f64>(support: &[f64], probs: &[f64], cdf: F) -> f64 {
    let k = support.len();
    assert!(k >= 2 && probs.len() == k);
    let mut tv = 0.0f64;
    let mut covered = 0.0f64;
    for i in 0..k {
        let lo = if i == 0 {
            f64::NEG_INFINITY
        } else {
            0.5 * (support[i - 1] + support[i])
        };
        let hi = if i == k - 1 {
            f64::INFINITY
        } else {
            0.5 * (support[i] + support[i + 1])
        };
        let q = cdf(hi) - cdf(lo);
        covered += q;
        tv += (probs[i] - q).abs();
    }
    0.5 * (tv + (1.0 - covered).max(0.0))
}

/// Empirical concentration of `(S_n/n, T_n/n)` around `(0, sigma^2)`.
#[derive(Debug, Clone, Copy)]
pub struct ConcentrationReport {
    pub n: usize,
    pub tol: f64,
    /// `P(‖(S/n, T/n) - (0, s2)‖_2 > tol)` with standard error.
    pub p_joint: f64,
    pub p_joint_se: f64,
    /// Component-wise exceedance probabilities.
    pub p_s: f64,
    pub p_t: f64,
    pub p_t_se: f64,
    pub mean_s_over_n: f64,
    pub mean_s_se: f64,
}

/// Estimate the deviation probabilities from `(S_n, T_n)` samples.
pub fn concentration_test(
    samples: &[(f64, f64)],
    n: usize,
    sigma2: f64,
    tol: f64,
) -> ConcentrationReport {
    assert!(!samples.is_empty());
    let nf = n as f64;
    let count = samples.len() as f64;
    let mut joint = 0.0;
    let mut s_exc = 0.0;
    let mut t_exc = 0.0;
    let mut s_sum = 0.0;
    let mut s_sq = 0.0;
    for &(s, t) in samples {
        let ds = s / nf;
        let dt = t / nf - sigma2;
        if (ds * ds + dt * dt).sqrt() > tol {
            joint += 1.0;
        }
        if ds.abs() > tol {
            s_exc += 1.0;
        }
        if dt.abs() > tol {
            t_exc += 1.0;
        }
        s_sum += ds;
        s_sq += ds * ds;
    }
    let p_joint = joint / count;
    let p_t = t_exc / count;
    let mean_s = s_sum / count;
    let var_s = (s_sq / count - mean_s * mean_s).max(0.0);
    ConcentrationReport {
        n,
        tol,
        p_joint,
        p_joint_se: (p_joint * (1.0 - p_joint) / count).sqrt(),
        p_s: s_exc / count,
        p_t,
        p_t_se: (p_t * (1.0 - p_t) / count).sqrt(),
        mean_s_over_n: mean_s,
        mean_s_se: (var_s / count).sqrt(),
    }
}

/// Density of the two-fold convolution of the pair law at `(x, y)`:
/// `f2(x, y) = f((x+w)/2) f((x-w)/2) / w` with `w = sqrt(2y - x^2)`, and `0`
/// when `x^2 >= 2y`.
pub fn pair_density(m: &SourceMeasure, x: f64, y: f64) -> Result<f64> {
    let f = |z: f64| {
        m.density(z).ok_or_else(|| {
            Error::InvalidArgument("pair density requires an absolutely continuous measure".into())
        })
    };
    let disc = 2.0 * y - x * x;
    if disc <= 0.0 {
        // Probe the callable anyway so non-density kinds fail loudly.
        let _ = f(0.0)?;
        return Ok(0.0);
    }
    let w = disc.sqrt();
    Ok(f((x + w) / 2.0)? * f((x - w) / 2.0)? / w)
}

fn density_radius(m: &SourceMeasure) -> Result<f64> {
    match m.kind() {
        MeasureKind::GaussianCentered { sigma2 } => Ok(TAIL_WIDTH * sigma2.sqrt()),
        MeasureKind::SymmetricUniform { a } => Ok(*a),
        MeasureKind::SymmetricDensity { radius, .. } => Ok(*radius),
        _ => Err(Error::InvalidArgument(
            "operation requires an absolutely continuous measure".into(),
        )),
    }
}

/// `∫∫ f2^p` over the plane, by the per-`x` parametrization `w = sqrt(2y-x²)`
/// (so `f2^p dy = w^{1-p} f^p((x+w)/2) f^p((x-w)/2) dw`), with the `w = 0`
/// edge handled by a power substitution. `p = 1` gives the normalization.
///
/// This is an independent route to the integrability integral of the measure
/// module: the two agree by the change of variables between lag and pair
/// coordinates.
pub fn pair_density_pnorm(m: &SourceMeasure, p: f64) -> Result<f64> {
    if !(1.0..2.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "pair-density norm supports p in [1, 2), got {p}"
        )));
    }
    let r = density_radius(m)?;
    let fp = move |z: f64, m: &SourceMeasure| m.density(z).unwrap().powf(p);
    let inner = |x: f64| -> f64 {
        let wmax = 2.0 * r - x.abs();
        if wmax <= 0.0 {
            return 0.0;
        }
        if p == 1.0 {
            quad::adaptive(rule(), 0.0, wmax, 1e-9, 1e-300, |w| {
                fp((x + w) / 2.0, m) * fp((x - w) / 2.0, m)
            })
            .value
        } else {
            // w = xi^{1/(2-p)} absorbs the w^{1-p} edge weight.
            let q = 2.0 - p;
            quad::adaptive(rule(), 0.0, wmax.powf(q), 1e-9, 1e-300, |xi| {
                let w = xi.powf(1.0 / q);
                fp((x + w) / 2.0, m) * fp((x - w) / 2.0, m)
            })
            .value
                / q
        }
    };
    let outer = quad::adaptive(rule(), -2.0 * r, 2.0 * r, 1e-8, 1e-300, inner);
    if !outer.converged {
        return Err(Error::Quadrature("pair-density norm outer integral".into()));
    }
    Ok(outer.value)
}

/// Asymptotic density of `(S_n/n, T_n/n)` under `rho^{⊗n}` at an interior
/// point: `n/(2π) · sqrt(det D²I(x,y)) · exp(-n I(x,y))`.
pub fn local_clt_density(m: &SourceMeasure, n: usize, x: f64, y: f64) -> Result<f64> {
    let cv = solve_dual(m, x, y, DEFAULT_TOL)?;
    let det = cv.rate_hessian_det().ok_or_else(|| {
        Error::InvalidArgument("local CLT needs a nondegenerate pair law".into())
    })?;
    Ok(n as f64 / (2.0 * std::f64::consts::PI) * det.sqrt() * (-(n as f64) * cv.value).exp())
}
