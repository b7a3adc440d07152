//! Statistical utilities: Kolmogorov-Smirnov distances, autocorrelation /
//! effective sample size, jackknife errors, chi-square goodness of fit, and a
//! grid-based inverse-CDF sampler for one-dimensional densities.

use crate::{Error, Result};

/// One-sample Kolmogorov-Smirnov statistic of `samples` against `cdf`.
///
/// `D = sup_x |F_N(x) - F(x)|`, evaluated on both sides of every jump.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    assert!(!samples.is_empty());
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, x) in xs.iter().enumerate() {
        let f = cdf(*x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty());
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|u, v| u.total_cmp(v));
    ys.sort_by(|u, v| u.total_cmp(v));
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic one-sample KS critical value at level `alpha` for `n_eff`
/// effective samples: `c(alpha) / sqrt(n_eff)` with
/// `c(alpha) = sqrt(-ln(alpha/2) / 2)`. At the 1% level `c ≈ 1.628`.
pub fn ks_critical(alpha: f64, n_eff: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / n_eff.sqrt()
}

/// Integrated autocorrelation time and effective sample size of a series.
///
/// Uses Geyer's initial positive sequence: sums autocorrelations by adjacent
/// pairs until a pair sum turns negative.
pub fn autocorr_ess(series: &[f64]) -> (f64, f64) {
    let n = series.len();
    if n < 4 {
        return (1.0, n as f64);
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let var = series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    if var <= 0.0 {
        return (1.0, n as f64);
    }
    let acov = |k: usize| -> f64 {
        series[..n - k]
            .iter()
            .zip(&series[k..])
            .map(|(a, b)| (a - mean) * (b - mean))
            .sum::<f64>()
            / n as f64
    };
    let mut tau = 1.0;
    let mut k = 1;
    while k + 1 < n / 2 {
        let pair = (acov(k) + acov(k + 1)) / var;
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        k += 2;
    }
    let ess = (n as f64 / tau).min(n as f64);
    (tau, ess)
}

/// Mean of `xs` with its jackknife standard error (for the mean this equals
/// the usual `sd/sqrt(n)`).
pub fn mean_with_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Chi-square goodness-of-fit of observed counts against expected counts.
///
/// Bins with expected count below `min_expected` are merged into their
/// neighbor. Returns `(statistic, degrees_of_freedom, p_value)`.
pub fn chi_square_gof(observed: &[f64], expected: &[f64], min_expected: f64) -> (f64, usize, f64) {
    assert_eq!(observed.len(), expected.len());
    let mut obs_m = Vec::new();
    let mut exp_m = Vec::new();
    let mut acc_o = 0.0;
    let mut acc_e = 0.0;
    for (&o, &e) in observed.iter().zip(expected) {
        acc_o += o;
        acc_e += e;
        if acc_e >= min_expected {
            obs_m.push(acc_o);
            exp_m.push(acc_e);
            acc_o = 0.0;
            acc_e = 0.0;
        }
    }
    // Fold any trailing remainder into the last kept bin.
    if acc_e > 0.0 {
        if let (Some(o), Some(e)) = (obs_m.last_mut(), exp_m.last_mut()) {
            *o += acc_o;
            *e += acc_e;
        } else {
            obs_m.push(acc_o);
            exp_m.push(acc_e);
        }
    }
    let stat: f64 = obs_m
        .iter()
        .zip(&exp_m)
        .map(|(&o, &e)| (o - e).powi(2) / e)
        .sum();
    let dof = obs_m.len().saturating_sub(1).max(1);
    let p = statrs::function::gamma::gamma_ur(dof as f64 / 2.0, stat / 2.0);
    (stat, dof, p)
}

/// Piecewise-linear inverse CDF built from a log-density on a grid.
///
/// The density is evaluated pointwise, shifted by its maximum, exponentiated
/// and integrated with the trapezoid rule.
#[derive(Debug, Clone)]
pub struct GridSampler {
    xs: Vec<f64>,
    cdf: Vec<f64>,
}

impl GridSampler {
    pub fn from_log_density<F: Fn(f64) -> f64>(
        a: f64,
        b: f64,
        points: usize,
        log_density: F,
    ) -> Result<Self> {
        assert!(points >= 8 && b > a);
        let step = (b - a) / (points - 1) as f64;
        let xs: Vec<f64> = (0..points).map(|i| a + i as f64 * step).collect();
        let logs: Vec<f64> = xs.iter().map(|&x| log_density(x)).collect();
        let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !m.is_finite() {
            return Err(Error::InvalidArgument(
                "grid sampler: log-density has no finite maximum".into(),
            ));
        }
        let dens: Vec<f64> = logs.iter().map(|&l| (l - m).exp()).collect();
        let mut cdf = vec![0.0; points];
        for i in 1..points {
            cdf[i] = cdf[i - 1] + 0.5 * (dens[i - 1] + dens[i]) * step;
        }
        let total = cdf[points - 1];
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidArgument(
                "grid sampler: density integrates to zero or overflows".into(),
            ));
        }
        for c in cdf.iter_mut() {
            *c /= total;
        }
        // The trapezoid cumulative sum of nonnegative values is nondecreasing
        // by construction; a violation signals NaNs from the density callable.
        if cdf.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::InvalidArgument(
                "grid sampler: cumulative distribution is not monotone".into(),
            ));
        }
        Ok(GridSampler { xs, cdf })
    }

    /// Map a uniform variate in `[0, 1)` through the inverse CDF.
    pub fn inverse(&self, u: f64) -> f64 {
        let n = self.cdf.len();
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.cdf[mid] <= u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (c0, c1) = (self.cdf[lo], self.cdf[hi]);
        if c1 <= c0 {
            return self.xs[lo];
        }
        let t = ((u - c0) / (c1 - c0)).clamp(0.0, 1.0);
        self.xs[lo] + t * (self.xs[hi] - self.xs[lo])
    }
}
