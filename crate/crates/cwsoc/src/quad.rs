//! Adaptive Gauss-Legendre quadrature.
//!
//! All integrals in the crate are either finite sums over atoms or integrals
//! of `z^j · exp(g(z))` with a log-concave-ish exponent. The strategy is a
//! fixed-order Gauss-Legendre rule applied on a doubling number of panels
//! until two successive estimates agree, with the exponent shifted by its
//! maximum so that `exp` never overflows.

use crate::{Error, Result};

/// Order of the base rule on each panel.
pub const PANEL_ORDER: usize = 32;
/// Panel budget: estimates use 1, 2, 4, ..., `MAX_PANELS` panels.
const MAX_PANELS: usize = 1 << 14;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Legendre polynomial value and derivative at `x` by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = p_next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

impl GaussLegendre {
    /// Nodes and weights of the `n`-point rule, by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "rule order must be at least 2");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_pair(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_pair(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integral of `f` over `[a, b]` with a single application of the rule.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    fn integrate_panels<F: Fn(f64) -> f64>(&self, a: f64, b: f64, panels: usize, f: &F) -> f64 {
        let width = (b - a) / panels as f64;
        let mut acc = 0.0;
        for p in 0..panels {
            let pa = a + p as f64 * width;
            acc += self.integrate(pa, pa + width, f);
        }
        acc
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub converged: bool,
    pub panels: usize,
}

/// Integrate `f` over `[a, b]`, doubling the panel count until two successive
/// estimates differ by less than `rel_tol` relatively (with `abs_tol` as a
/// floor for integrals that vanish).
pub fn adaptive<F: Fn(f64) -> f64>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    f: F,
) -> QuadResult {
    let mut prev = rule.integrate_panels(a, b, 1, &f);
    let mut panels = 2;
    while panels <= MAX_PANELS {
        let cur = rule.integrate_panels(a, b, panels, &f);
        if (cur - prev).abs() <= rel_tol * cur.abs() + abs_tol {
            return QuadResult {
                value: cur,
                converged: true,
                panels,
            };
        }
        prev = cur;
        panels *= 2;
    }
    QuadResult {
        value: prev,
        converged: false,
        panels: MAX_PANELS,
    }
}

/// Same as [`adaptive`] but returns an error when the panel budget is exhausted.
pub fn adaptive_checked<F: Fn(f64) -> f64>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    what: &str,
    f: F,
) -> Result<f64> {
    let r = adaptive(rule, a, b, rel_tol, abs_tol, f);
    if r.converged {
        Ok(r.value)
    } else {
        Err(Error::Quadrature(format!(
            "{what}: not stable after {} panels",
            r.panels
        )))
    }
}

/// Moments `m_j = ∫_a^b z^j exp(g(z) - shift) dz` for `j = 0..=jmax`, all on
/// shared nodes, with the panel count doubled until every component is stable.
///
/// The caller supplies `shift`, normally `max g` over the interval, so that the
/// exponential stays in range; `m_0` then has order one whenever the interval
/// captures the peak. Convergence of `m_j` is measured against the sound bound
/// `m_0 · max(|a|,|b|)^j`, which keeps near-zero odd moments from stalling the
/// doubling.
pub fn adaptive_moments<G: Fn(f64) -> f64>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    jmax: usize,
    shift: f64,
    rel_tol: f64,
    log_weight: G,
) -> (Vec<f64>, bool, usize) {
    let eval_panels = |panels: usize| -> Vec<f64> {
        let width = (b - a) / panels as f64;
        let mut acc = vec![0.0; jmax + 1];
        for p in 0..panels {
            let pa = a + p as f64 * width;
            let half = 0.5 * width;
            let mid = pa + half;
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let z = mid + half * x;
                let base = w * half * (log_weight(z) - shift).exp();
                let mut zj = 1.0;
                for m in acc.iter_mut() {
                    *m += base * zj;
                    zj *= z;
                }
            }
        }
        acc
    };

    let r = a.abs().max(b.abs());
    let mut prev = eval_panels(1);
    let mut panels = 2;
    while panels <= MAX_PANELS {
        let cur = eval_panels(panels);
        let m0 = cur[0].abs();
        let mut ok = true;
        let mut scale = m0;
        for j in 0..=jmax {
            if (cur[j] - prev[j]).abs() > rel_tol * cur[j].abs().max(scale) {
                ok = false;
                break;
            }
            scale *= r;
        }
        if ok {
            return (cur, true, panels);
        }
        prev = cur;
        panels *= 2;
    }
    (prev, false, MAX_PANELS)
}

/// Numerically stable `ln(sum exp(x_i))`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Evenly spaced grid including both endpoints.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let step = (b - a) / (n - 1) as f64;
    (0..n).map(|i| a + i as f64 * step).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        let rule = GaussLegendre::new(PANEL_ORDER);
        // 32-point rule is exact through degree 63.
        let val = rule.integrate(-1.0, 1.0, |x| x.powi(8));
        assert_relative_eq!(val, 2.0 / 9.0, max_relative = 1e-14);
        let val = rule.integrate(0.0, 2.0, |x| 5.0 * x.powi(4) - x);
        assert_relative_eq!(val, 32.0 - 2.0, max_relative = 1e-14);
    }

    #[test]
    fn adaptive_handles_smooth_exponential() {
        let rule = GaussLegendre::new(PANEL_ORDER);
        let r = adaptive(&rule, -1.0, 1.0, 1e-13, 0.0, f64::exp);
        assert!(r.converged);
        assert_relative_eq!(r.value, 1f64.exp() - (-1f64).exp(), max_relative = 1e-13);
    }

    #[test]
    fn adaptive_moments_match_gaussian_moments() {
        let rule = GaussLegendre::new(PANEL_ORDER);
        // exp(-z^2/2) over a wide interval: moments are sqrt(2 pi) (2k-1)!!.
        let (m, ok, _) = adaptive_moments(&rule, -14.0, 14.0, 6, 0.0, 1e-13, |z| -0.5 * z * z);
        assert!(ok);
        let s = (2.0 * std::f64::consts::PI).sqrt();
        assert_relative_eq!(m[0], s, max_relative = 1e-12);
        assert!(m[1].abs() < 1e-14);
        assert_relative_eq!(m[2], s, max_relative = 1e-12);
        assert_relative_eq!(m[4], 3.0 * s, max_relative = 1e-12);
        assert_relative_eq!(m[6], 15.0 * s, max_relative = 1e-12);
    }

    #[test]
    fn shift_keeps_large_exponents_finite() {
        let rule = GaussLegendre::new(PANEL_ORDER);
        // exp(800 - z^2/2) would overflow without the shift.
        let (m, ok, _) = adaptive_moments(&rule, -14.0, 14.0, 0, 800.0, 1e-13, |z| {
            800.0 - 0.5 * z * z
        });
        assert!(ok);
        assert!(m[0].is_finite());
        assert_relative_eq!(m[0], (2.0 * std::f64::consts::PI).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn log_sum_exp_shifts() {
        assert_relative_eq!(
            log_sum_exp(&[1000.0, 1000.0]),
            1000.0 + 2f64.ln(),
            max_relative = 1e-15
        );
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
    }
}
