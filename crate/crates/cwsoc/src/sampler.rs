//! Samplers for the model measure.
//!
//! The model reweights `rho^{⊗n}` by `exp(S_n²/(2 T_n))` with the all-zero
//! configuration excluded. Three routes are provided:
//!
//! * single-site Metropolis with the proposal drawn from `rho` itself, so the
//!   acceptance ratio is exactly the weight difference;
//! * exact samplers for the two closed cases: the two-point measure (where
//!   `T_n = n c²` and the law of `S_n` is an explicit tilted binomial) and the
//!   Gaussian measure (where the configuration factorizes into an independent
//!   chi-distributed radius and a tilted sphere direction);
//! * an importance-sampling estimator of the partition function `Z_n`, which
//!   is a small-`n` validator only — the weight variance grows exponentially
//!   with `n`, so the effective sample size gates its use.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution};

use crate::measure::SourceMeasure;
use crate::stats::{autocorr_ess, GridSampler};
use crate::{Error, Result};

/// A spin configuration with cached sums.
#[derive(Debug, Clone)]
pub struct Configuration {
    entries: Vec<f64>,
    s: f64,
    t: f64,
}

impl Configuration {
    pub fn new(entries: Vec<f64>) -> Self {
        let s = entries.iter().sum();
        let t = entries.iter().map(|x| x * x).sum();
        Configuration { entries, s, t }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `S_n`.
    pub fn s(&self) -> f64 {
        self.s
    }

    /// `T_n`.
    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Recompute the sums from scratch (cache-drift control).
    pub fn refresh_sums(&mut self) {
        self.s = self.entries.iter().sum();
        self.t = self.entries.iter().map(|x| x * x).sum();
    }

    fn replace(&mut self, i: usize, x: f64) {
        let old = self.entries[i];
        self.s += x - old;
        self.t += x * x - old * old;
        self.entries[i] = x;
    }
}

/// `n` independent draws from `rho` with the sums cached.
pub fn sample_iid(m: &SourceMeasure, n: usize, seed: u64) -> Result<Configuration> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one site".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(draw_iid(m, n, &mut rng))
}

fn draw_iid<R: Rng + ?Sized>(m: &SourceMeasure, n: usize, rng: &mut R) -> Configuration {
    Configuration::new((0..n).map(|_| m.sample_one(rng)).collect())
}

/// Log of the model weight: `S_n²/(2 T_n)`, and `-inf` for the excluded
/// all-zero configuration. Always lies in `[0, n/2]` by `S_n² <= n T_n`.
pub fn model_log_weight(c: &Configuration) -> f64 {
    if c.t > 0.0 {
        c.s * c.s / (2.0 * c.t)
    } else {
        f64::NEG_INFINITY
    }
}

/// One single-site Metropolis update: propose `x_i' ~ rho` at a uniform site
/// and accept with probability `min(1, exp(Δ log-weight))`. Returns whether
/// the proposal was accepted.
pub fn metropolis_update<R: Rng + ?Sized>(
    c: &mut Configuration,
    m: &SourceMeasure,
    rng: &mut R,
) -> bool {
    let i = rng.gen_range(0..c.entries.len());
    let old = c.entries[i];
    let prop = m.sample_one(rng);
    let s_new = c.s - old + prop;
    let t_new = c.t - old * old + prop * prop;
    // Proposals reaching t = 0 are always rejected (excluded configuration).
    if !(t_new > 0.0) {
        return false;
    }
    let delta = if c.t > 0.0 {
        s_new * s_new / (2.0 * t_new) - c.s * c.s / (2.0 * c.t)
    } else {
        f64::INFINITY
    };
    let accept = delta >= 0.0 || rng.gen::<f64>() < delta.exp();
    if accept {
        c.replace(i, prop);
    }
    accept
}

/// Chain controls: one sweep is `n` single-site updates.
#[derive(Debug, Clone, Copy)]
pub struct McmcParams {
    /// Retained-phase sweeps (after burn-in).
    pub sweeps: usize,
    /// Discarded initial sweeps.
    pub burn_in: usize,
    /// Keep every `thin`-th sweep.
    pub thin: usize,
}

impl Default for McmcParams {
    fn default() -> Self {
        McmcParams {
            sweeps: 20_000,
            burn_in: 2_000,
            thin: 1,
        }
    }
}

/// Mixing diagnostics of a chain.
#[derive(Debug, Clone, Copy)]
pub struct ChainDiagnostics {
    pub acceptance_rate: f64,
    /// Effective sample size of the retained `S_n/n^{3/4}` series.
    pub ess: f64,
    pub autocorr_time: f64,
    /// Total sweeps performed including burn-in.
    pub sweeps: usize,
    /// Set when `ess < 100`.
    pub poor_mixing: bool,
    /// Whether the measure satisfied the concentration hypotheses.
    pub hypotheses_ok: bool,
}

/// Run a single-site Metropolis chain and retain `(S_n, T_n)` pairs.
pub fn mcmc_sample(
    m: &SourceMeasure,
    n: usize,
    params: McmcParams,
    seed: u64,
) -> Result<(Vec<(f64, f64)>, ChainDiagnostics)> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "the chain needs at least two sites".into(),
        ));
    }
    if params.thin == 0 {
        return Err(Error::InvalidArgument("thin must be at least 1".into()));
    }
    let hypotheses_ok = m.concentration_conditions().overall;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cfg = draw_iid(m, n, &mut rng);
    // The excluded state has zero mass; restart until we leave it.
    let mut guard = 0;
    while !(cfg.t() > 0.0) {
        cfg = draw_iid(m, n, &mut rng);
        guard += 1;
        if guard > 1000 {
            return Err(Error::InvalidArgument(
                "could not draw an initial configuration with T_n > 0".into(),
            ));
        }
    }

    for sweep in 0..params.burn_in {
        for _ in 0..n {
            metropolis_update(&mut cfg, m, &mut rng);
        }
        if sweep % 1000 == 999 {
            cfg.refresh_sums();
        }
    }

    let retained_cap = params.sweeps / params.thin;
    let mut samples = Vec::with_capacity(retained_cap);
    let mut accepted = 0usize;
    for sweep in 0..params.sweeps {
        for _ in 0..n {
            if metropolis_update(&mut cfg, m, &mut rng) {
                accepted += 1;
            }
        }
        if sweep % 1000 == 999 {
            cfg.refresh_sums();
        }
        if (sweep + 1) % params.thin == 0 {
            samples.push((cfg.s(), cfg.t()));
        }
    }

    let scale = (n as f64).powf(0.75);
    let series: Vec<f64> = samples.iter().map(|(s, _)| s / scale).collect();
    let (autocorr_time, ess) = autocorr_ess(&series);
    let diag = ChainDiagnostics {
        acceptance_rate: accepted as f64 / (params.sweeps * n) as f64,
        ess,
        autocorr_time,
        sweeps: params.sweeps + params.burn_in,
        poor_mixing: ess < 100.0,
        hypotheses_ok,
    };
    Ok((samples, diag))
}

/// The exact law of `S_n` under the model for the two-point measure: with
/// `T_n = n c²` almost surely, `P(S_n = c(2k-n)) ∝ C(n,k) 2^{-n}
/// exp((2k-n)²/(2n))`, independent of `c` in the exponent.
#[derive(Debug, Clone)]
pub struct BernoulliSumLaw {
    pub c: f64,
    pub n: usize,
    /// The `n+1` atoms `c(2k - n)`, increasing.
    pub support: Vec<f64>,
    pub probs: Vec<f64>,
}

/// Largest `n` accepted by [`bernoulli_sum_law`].
pub const BERNOULLI_LAW_MAX_N: usize = 4_000_000;

pub fn bernoulli_sum_law(c: f64, n: usize) -> Result<BernoulliSumLaw> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one site".into()));
    }
    if n > BERNOULLI_LAW_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "n = {n} exceeds the supported range {BERNOULLI_LAW_MAX_N} for exact log-binomials"
        )));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidArgument("scale c must be positive".into()));
    }
    let ln_gamma = statrs::function::gamma::ln_gamma;
    let nf = n as f64;
    let ln_binom_n = ln_gamma(nf + 1.0);
    let mut logs: Vec<f64> = (0..=n)
        .map(|k| {
            let kf = k as f64;
            let d = 2.0 * kf - nf;
            ln_binom_n - ln_gamma(kf + 1.0) - ln_gamma(nf - kf + 1.0) - nf * std::f64::consts::LN_2
                + d * d / (2.0 * nf)
        })
        .collect();
    let norm = crate::quad::log_sum_exp(&logs);
    for l in logs.iter_mut() {
        *l -= norm;
    }
    Ok(BernoulliSumLaw {
        c,
        n,
        support: (0..=n).map(|k| c * (2.0 * k as f64 - nf)).collect(),
        probs: logs.into_iter().map(f64::exp).collect(),
    })
}

impl BernoulliSumLaw {
    /// Expected counts for a sample of size `total` (for chi-square tests).
    pub fn expected_counts(&self, total: f64) -> Vec<f64> {
        self.probs.iter().map(|p| p * total).collect()
    }

    /// Draw from the exact law by inverse transform on the cumulative
    /// probabilities.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut cum = Vec::with_capacity(self.probs.len());
        let mut acc = 0.0;
        for p in &self.probs {
            acc += p;
            cum.push(acc);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let u: f64 = rng.gen();
                let idx = cum.partition_point(|&c| c < u).min(self.support.len() - 1);
                self.support[idx]
            })
            .collect()
    }

    /// Count observed `S_n` values per atom; values are matched to the
    /// nearest atom (they are exact multiples in practice).
    pub fn bin_observations(&self, samples: &[f64]) -> Vec<f64> {
        let mut counts = vec![0.0; self.support.len()];
        let step = 2.0 * self.c;
        let lo = self.support[0];
        for &s in samples {
            let idx = ((s - lo) / step).round() as i64;
            let idx = idx.clamp(0, self.support.len() as i64 - 1) as usize;
            counts[idx] += 1.0;
        }
        counts
    }
}

/// Exact sampler for the Gaussian model via the polar factorization.
///
/// Under the model with centered Gaussian `rho`, the radius `r = sqrt(T_n)`
/// keeps its unweighted law `sigma · chi_n` (the weight depends on the
/// direction only), while `w = S_n/(r sqrt(n))` has density proportional to
/// `(1-w²)^{(n-3)/2} exp(n w²/2)` on `[-1, 1]`. Returns `(S_n, T_n)` pairs.
pub fn gaussian_exact_sample(
    sigma2: f64,
    n: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    if n < 3 {
        return Err(Error::InvalidArgument(
            "the polar factorization needs n >= 3".into(),
        ));
    }
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidArgument("variance must be positive".into()));
    }
    let nf = n as f64;
    let half_exp = 0.5 * (nf - 3.0);
    let log_density = move |w: f64| {
        if w.abs() >= 1.0 {
            return if half_exp == 0.0 { 0.5 * nf } else { f64::NEG_INFINITY };
        }
        half_exp * (-w * w).ln_1p() + 0.5 * nf * w * w
    };
    // Window: scan for the mode and cut where the density has dropped by e^-46.
    let scan = 4096;
    let mut peak = f64::NEG_INFINITY;
    for i in 0..scan {
        let w = i as f64 / scan as f64;
        peak = peak.max(log_density(w));
    }
    let mut w_hi = 1.0;
    for i in (0..scan).rev() {
        let w = i as f64 / scan as f64;
        if log_density(w) > peak - 46.0 {
            w_hi = ((i + 1) as f64 / scan as f64).min(1.0);
            break;
        }
    }
    let grid = GridSampler::from_log_density(-w_hi, w_hi, 16_384, log_density)?;

    let chi = ChiSquared::new(nf)
        .map_err(|e| Error::InvalidArgument(format!("chi-squared setup: {e}")))?;
    let sigma = sigma2.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let w = grid.inverse(rng.gen::<f64>());
        let r = sigma * chi.sample(&mut rng).sqrt();
        out.push((r * w * nf.sqrt(), r * r));
    }
    Ok(out)
}

/// Importance-sampling estimate of `Z_n`.
#[derive(Debug, Clone, Copy)]
pub struct ZnEstimate {
    /// `ln Z_n` (always finite).
    pub ln_zn: f64,
    /// `Z_n`; may overflow to `inf` for very large `n`, use `ln_zn` then.
    pub zn: f64,
    pub std_err: f64,
    /// Importance-weight effective sample size `(Σw)²/Σw²`.
    pub ess: f64,
    pub draws: usize,
    /// Set when `ess/draws < 0.01`.
    pub low_ess: bool,
}

/// Estimate `Z_n = E_{rho^{⊗n}}[exp(S²/(2T)) 1{T>0}]` from i.i.d. draws,
/// with a jackknife standard error. Weights are handled in shifted log-space,
/// so any `n` is safe; the estimator is only *useful* while the effective
/// sample size holds up.
pub fn importance_zn(m: &SourceMeasure, n: usize, draws: usize, seed: u64) -> Result<ZnEstimate> {
    if n == 0 || draws < 2 {
        return Err(Error::InvalidArgument(
            "need n >= 1 and at least two draws".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut logs = Vec::with_capacity(draws);
    for _ in 0..draws {
        let mut s = 0.0f64;
        let mut t = 0.0f64;
        for _ in 0..n {
            let z = m.sample_one(&mut rng);
            s += z;
            t += z * z;
        }
        logs.push(if t > 0.0 {
            s * s / (2.0 * t)
        } else {
            f64::NEG_INFINITY
        });
    }
    let shift = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !shift.is_finite() {
        return Err(Error::InvalidArgument(
            "every draw hit the excluded all-zero configuration".into(),
        ));
    }
    let w: Vec<f64> = logs.iter().map(|l| (l - shift).exp()).collect();
    let nf = draws as f64;
    let mean = w.iter().sum::<f64>() / nf;
    let var = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let sum_w: f64 = w.iter().sum();
    let sum_w2: f64 = w.iter().map(|x| x * x).sum();
    let ess = sum_w * sum_w / sum_w2;
    let ln_zn = shift + mean.ln();
    Ok(ZnEstimate {
        ln_zn,
        zn: ln_zn.exp(),
        std_err: shift.exp() * (var / nf).sqrt(),
        ess,
        draws,
        low_ess: ess / nf < 0.01,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::collections::HashMap;

    fn bernoulli() -> SourceMeasure {
        SourceMeasure::bernoulli(1.0).unwrap()
    }

    #[test]
    fn configuration_caches_and_bounds() {
        let m = bernoulli();
        let c = sample_iid(&m, 4, 1).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.entries().iter().all(|&z| z == 1.0 || z == -1.0));
        assert_eq!(c.t(), 4.0);
        assert!(c.s() * c.s() <= 4.0 * c.t());

        let single = sample_iid(&SourceMeasure::gaussian(1.0).unwrap(), 1, 7).unwrap();
        assert_eq!(single.s(), single.entries()[0]);
        assert_eq!(single.t(), single.entries()[0].powi(2));
        assert!(sample_iid(&m, 0, 1).is_err());

        // Equal seeds are bit-identical.
        let g = SourceMeasure::gaussian(2.0).unwrap();
        let c1 = sample_iid(&g, 100, 77).unwrap();
        let c2 = sample_iid(&g, 100, 77).unwrap();
        assert_eq!(c1.entries(), c2.entries());
    }

    #[test]
    fn iid_law_of_large_numbers_for_t() {
        let m = SourceMeasure::gaussian(1.0).unwrap();
        let mut bad = 0;
        for seed in 0..20 {
            let c = sample_iid(&m, 100_000, seed).unwrap();
            if (c.t() / 1e5 - 1.0).abs() >= 0.02 {
                bad += 1;
            }
        }
        // 5-sigma-ish events; at most a fluke among 20 seeds.
        assert!(bad <= 1, "{bad} seeds outside the 2% band");
    }

    #[test]
    fn log_weight_cases() {
        assert_eq!(
            model_log_weight(&Configuration::new(vec![0.0, 0.0])),
            f64::NEG_INFINITY
        );
        let c = Configuration::new(vec![1.0, 1.0, -1.0]);
        assert_relative_eq!(model_log_weight(&c), 1.0 / 6.0, max_relative = 1e-15);
        // Bound 0 <= log w <= n/2 on random configurations.
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let m = SourceMeasure::gaussian(1.0).unwrap();
        for _ in 0..50 {
            let c = draw_iid(&m, 17, &mut rng);
            let w = model_log_weight(&c);
            assert!((0.0..=8.5).contains(&w));
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let m = SourceMeasure::gaussian(1.0).unwrap();
        let p = McmcParams {
            sweeps: 200,
            burn_in: 50,
            thin: 2,
        };
        let (s1, d1) = mcmc_sample(&m, 16, p, 99).unwrap();
        let (s2, d2) = mcmc_sample(&m, 16, p, 99).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(d1.acceptance_rate, d2.acceptance_rate);
        let (s3, _) = mcmc_sample(&m, 16, p, 100).unwrap();
        assert_ne!(s1, s3);
    }

    #[test]
    fn chain_respects_support_and_caches() {
        let m = SourceMeasure::uniform(1.0).unwrap();
        let p = McmcParams {
            sweeps: 3000,
            burn_in: 100,
            thin: 1,
        };
        let (samples, diag) = mcmc_sample(&m, 32, p, 5).unwrap();
        assert_eq!(samples.len(), 3000);
        for &(s, t) in &samples {
            assert!(t > 0.0);
            assert!(s * s <= 32.0 * t * (1.0 + 1e-12));
        }
        assert!(diag.acceptance_rate > 0.0 && diag.acceptance_rate < 1.0);
        assert!(diag.hypotheses_ok);

        // Cache coherence over a long run.
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let mut cfg = draw_iid(&m, 32, &mut rng);
        for _ in 0..32_000 {
            metropolis_update(&mut cfg, &m, &mut rng);
        }
        let (s_cache, t_cache) = (cfg.s(), cfg.t());
        cfg.refresh_sums();
        assert_abs_diff_eq!(s_cache, cfg.s(), epsilon = 1e-9 * 32.0);
        assert_abs_diff_eq!(t_cache, cfg.t(), epsilon = 1e-9 * 32.0);
    }

    #[test]
    fn two_site_chain_matches_enumeration() {
        // n = 2, two-point measure: four states with weights e^{s²/4}.
        let m = bernoulli();
        let p = McmcParams {
            sweeps: 200_000,
            burn_in: 1_000,
            thin: 1,
        };
        let (samples, _) = mcmc_sample(&m, 2, p, 12).unwrap();
        let total = samples.len() as f64;
        let mut counts: HashMap<i64, f64> = HashMap::new();
        for &(s, _) in &samples {
            *counts.entry(s.round() as i64).or_default() += 1.0;
        }
        let e = 1f64.exp();
        let p0 = 2.0 / (2.0 + 2.0 * e);
        let p2 = e / (2.0 + 2.0 * e);
        for (key, want) in [(0i64, p0), (2, p2), (-2, p2)] {
            let got = counts.get(&key).copied().unwrap_or(0.0) / total;
            // Correlated draws: allow a generous multiple of the i.i.d. SE.
            let se = (want * (1.0 - want) / total).sqrt();
            assert!(
                (got - want).abs() < 12.0 * se,
                "state {key}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn detailed_balance_on_the_eight_state_chain() {
        // n = 3 two-point: states are sign patterns; stationary law ∝ e^{s²/6}.
        use rand::SeedableRng;
        let m = bernoulli();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let mut cfg = Configuration::new(vec![1.0, 1.0, -1.0]);
        let encode = |c: &Configuration| -> usize {
            c.entries()
                .iter()
                .enumerate()
                .map(|(i, &z)| if z > 0.0 { 1 << i } else { 0 })
                .sum()
        };
        for _ in 0..5_000 {
            metropolis_update(&mut cfg, &m, &mut rng);
        }
        let updates = 400_000;
        let mut flow = vec![vec![0.0f64; 8]; 8];
        let mut visits = [0.0f64; 8];
        let mut prev = encode(&cfg);
        for _ in 0..updates {
            metropolis_update(&mut cfg, &m, &mut rng);
            let cur = encode(&cfg);
            flow[prev][cur] += 1.0;
            visits[prev] += 1.0;
            prev = cur;
        }
        // Enumerated stationary law.
        let mut pi = [0.0f64; 8];
        for (state, p) in pi.iter_mut().enumerate() {
            let s = (0..3)
                .map(|i| if state & (1 << i) != 0 { 1.0 } else { -1.0 })
                .sum::<f64>();
            *p = (s * s / 6.0).exp();
        }
        let z: f64 = pi.iter().sum();
        pi.iter_mut().for_each(|p| *p /= z);

        // Occupation matches the enumerated law.
        for s in 0..8 {
            let got = visits[s] / updates as f64;
            let se = (pi[s] * (1.0 - pi[s]) / updates as f64).sqrt();
            assert!(
                (got - pi[s]).abs() < 10.0 * se,
                "state {s}: {got} vs {}",
                pi[s]
            );
        }
        // Reversibility: pi(a) P(a->b) = pi(b) P(b->a) within 3 SE of the
        // empirical flow difference.
        for a in 0..8 {
            for b in 0..8 {
                if a == b || visits[a] == 0.0 || visits[b] == 0.0 {
                    continue;
                }
                let fab = pi[a] * flow[a][b] / visits[a];
                let fba = pi[b] * flow[b][a] / visits[b];
                let se = ((flow[a][b] + flow[b][a]).sqrt() / updates as f64).max(1e-9);
                assert!(
                    (fab - fba).abs() < 3.0 * se + 1e-6,
                    "flow {a}->{b}: {fab} vs {fba}"
                );
            }
        }
    }

    #[test]
    fn chain_is_sign_symmetric() {
        let m = SourceMeasure::gaussian(1.0).unwrap();
        let p = McmcParams {
            sweeps: 20_000,
            burn_in: 2_000,
            thin: 5,
        };
        let (samples, diag) = mcmc_sample(&m, 64, p, 3).unwrap();
        let s: Vec<f64> = samples.iter().map(|(s, _)| *s).collect();
        let (mean, se) = crate::stats::mean_with_se(&s);
        let infl = (s.len() as f64 / diag.ess.max(1.0)).sqrt();
        assert!(mean.abs() < 3.0 * se * infl, "mean {mean}, se {se}");
        let neg: Vec<f64> = s.iter().map(|x| -x).collect();
        let d = crate::stats::ks_two_sample(&s, &neg);
        let crit = crate::stats::ks_critical(0.01, diag.ess / 2.0);
        assert!(d < 2.0 * crit, "sign-flip KS {d} vs {crit}");
    }

    #[test]
    fn bernoulli_law_small_cases() {
        let law = bernoulli_sum_law(1.0, 1).unwrap();
        assert_eq!(law.support, vec![-1.0, 1.0]);
        assert_relative_eq!(law.probs[0], 0.5, max_relative = 1e-12);

        let law = bernoulli_sum_law(0.7, 2).unwrap();
        let e = 1f64.exp();
        assert_relative_eq!(law.probs[1], 1.0 / (1.0 + e), max_relative = 1e-12);
        assert_relative_eq!(law.probs[0], e / (2.0 * (1.0 + e)), max_relative = 1e-12);
        assert_relative_eq!(law.probs.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bernoulli_law_matches_brute_force_enumeration() {
        // Enumerate all 2^10 sign vectors with weight e^{s²/(2n)}.
        let n = 10;
        let mut weights = vec![0.0f64; n + 1];
        for mask in 0u32..(1 << n) {
            let ones = mask.count_ones() as i32;
            let s = (2 * ones - n as i32) as f64;
            weights[ones as usize] += (s * s / (2.0 * n as f64)).exp();
        }
        let z: f64 = weights.iter().sum();
        let law = bernoulli_sum_law(1.0, n).unwrap();
        for (k, w) in weights.iter().enumerate() {
            assert_relative_eq!(law.probs[k], w / z, max_relative = 1e-11);
        }
    }

    #[test]
    fn bernoulli_law_rejects_oversized_n() {
        assert!(bernoulli_sum_law(1.0, BERNOULLI_LAW_MAX_N + 1).is_err());
    }

    #[test]
    fn gaussian_exact_sampler_basics() {
        let samples = gaussian_exact_sample(1.0, 1000, 20_000, 6).unwrap();
        let s_mean = samples.iter().map(|(s, _)| s).sum::<f64>() / 20_000.0;
        let s_scale = 1000f64.powf(0.75);
        assert!(s_mean.abs() / s_scale < 0.05, "mean {s_mean}");
        // T_n/n concentrates near sigma² = 1 (chi²_n/n).
        let t_mean = samples.iter().map(|(_, t)| t).sum::<f64>() / 20_000.0 / 1000.0;
        assert_abs_diff_eq!(t_mean, 1.0, epsilon = 0.01);
        assert!(gaussian_exact_sample(1.0, 2, 10, 0).is_err());
    }

    #[test]
    fn exact_and_mcmc_gaussian_samplers_agree() {
        let n = 200;
        let exact = gaussian_exact_sample(1.0, n, 40_000, 17).unwrap();
        let m = SourceMeasure::gaussian(1.0).unwrap();
        let p = McmcParams {
            sweeps: 60_000,
            burn_in: 4_000,
            thin: 10,
        };
        let (chain, diag) = mcmc_sample(&m, n, p, 18).unwrap();
        let scale = (n as f64).powf(0.75);
        let a: Vec<f64> = exact.iter().map(|(s, _)| s / scale).collect();
        let b: Vec<f64> = chain.iter().map(|(s, _)| s / scale).collect();
        let d = crate::stats::ks_two_sample(&a, &b);
        assert!(
            d < 0.04,
            "two-sample KS {d} (ess {})",
            diag.ess
        );
        // T_n/n concentrates near sigma^2 under the chain as well.
        let t_mean = chain.iter().map(|(_, t)| t / n as f64).sum::<f64>() / chain.len() as f64;
        assert!((t_mean - 1.0).abs() < 0.02, "T/n mean {t_mean}");
    }

    #[test]
    fn importance_zn_matches_two_site_enumeration() {
        let m = bernoulli();
        // Z_2 = (1 + e)/2 exactly.
        let want = (1.0 + 1f64.exp()) / 2.0;
        let est = importance_zn(&m, 2, 200_000, 4).unwrap();
        assert!(est.zn >= 1.0 && est.zn <= 1f64.exp());
        assert!(
            (est.zn - want).abs() < 4.0 * est.std_err,
            "Z2 = {} vs {want} (se {})",
            est.zn,
            est.std_err
        );
        assert!(!est.low_ess);
    }

    #[test]
    fn importance_zn_respects_bounds() {
        for (seed, n) in [(1u64, 8usize), (2, 32), (3, 64)] {
            let m = SourceMeasure::gaussian(1.0).unwrap();
            let est = importance_zn(&m, n, 20_000, seed).unwrap();
            assert!(est.ln_zn >= 0.0, "ln Zn = {}", est.ln_zn);
            assert!(est.ln_zn <= n as f64 / 2.0);
        }
    }
}
