//! Catalog of admissible source measures.
//!
//! A source measure `rho` is a symmetric probability measure on the real line
//! with positive variance and a finite exponential square moment
//! `∫ exp(v z^2) drho < ∞` for some `v > 0`. Built-in kinds cover the regimes
//! the theory distinguishes: centered Gaussian (unbounded, open log-Laplace
//! domain), symmetric two-point (degenerate pair law), symmetric uniform
//! (bounded density), a user-supplied symmetric density hook, and a mixture
//! with an extra atom at zero (for the hypothesis checks and `I(0,0)`).
//!
//! Moments are exact for built-in kinds and computed once by adaptive
//! quadrature for user densities.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::quad::{self, GaussLegendre};
use crate::stats::GridSampler;
use crate::{Error, Result};

/// Relative tolerance for construction-time and moment quadratures.
pub(crate) const QUAD_REL_TOL: f64 = 1e-12;
/// Half-width, in peak standard deviations, of quadrature windows for
/// unbounded integrands (`exp(-14^2/2) ≈ 3e-43`).
pub(crate) const TAIL_WIDTH: f64 = 14.0;
/// Points used by symmetry probes and support scans.
const PROBE_POINTS: usize = 1000;

/// Shared quadrature rule: one 32-point panel base for the whole crate.
pub(crate) fn rule() -> &'static GaussLegendre {
    use std::sync::OnceLock;
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(quad::PANEL_ORDER))
}

pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The measure kinds in the catalog.
#[derive(Clone)]
pub enum MeasureKind {
    /// Centered Gaussian with variance `sigma2`.
    GaussianCentered { sigma2: f64 },
    /// `(delta_{-c} + delta_c) / 2`.
    SymmetricBernoulli { c: f64 },
    /// Uniform on `[-a, a]`.
    SymmetricUniform { a: f64 },
    /// User density, symmetrized and renormalized at construction.
    SymmetricDensity {
        density: DensityFn,
        /// Declared support bound (`f64::INFINITY` for unbounded support).
        support_radius: f64,
        /// Working radius: integration window containing all mass up to
        /// negligible tails.
        radius: f64,
        /// Normalization of the symmetrized density.
        norm: f64,
        /// Smallest `|z|` carrying mass, from a support scan.
        support_gap: f64,
    },
    /// `atom · delta_0 + (1 - atom) · base`.
    ZeroInflated { atom: f64, base: Box<SourceMeasure> },
}

/// A validated source measure with cached moments and domain data.
#[derive(Clone)]
pub struct SourceMeasure {
    kind: MeasureKind,
    variance: f64,
    mu4: f64,
    mu6: f64,
    /// Supremum of admissible tilts `v` in `exp(u z + v z^2)`; the domain of
    /// the log-Laplace transform is `R x (-inf, v_sup)`, open at `v_sup`.
    v_sup: f64,
    atom_at_zero: f64,
    /// `(K^2, L^2)`: infimum and supremum of `z^2` over the support.
    support_sq: (f64, f64),
    sampler_grid: Option<GridSampler>,
}

impl fmt::Debug for SourceMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SourceMeasure({self})")
    }
}

impl fmt::Display for SourceMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MeasureKind::GaussianCentered { sigma2 } => write!(f, "gaussian(sigma2={sigma2})"),
            MeasureKind::SymmetricBernoulli { c } => write!(f, "bernoulli(c={c})"),
            MeasureKind::SymmetricUniform { a } => write!(f, "uniform(a={a})"),
            MeasureKind::SymmetricDensity { radius, .. } => {
                write!(f, "density(radius={radius:.3})")
            }
            MeasureKind::ZeroInflated { atom, base } => {
                write!(f, "zero_inflated(atom={atom}, base={base})")
            }
        }
    }
}

impl SourceMeasure {
    pub fn gaussian(sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::InvalidMeasure(format!(
                "gaussian variance must be positive and finite, got {sigma2}"
            )));
        }
        Ok(SourceMeasure {
            kind: MeasureKind::GaussianCentered { sigma2 },
            variance: sigma2,
            mu4: 3.0 * sigma2 * sigma2,
            mu6: 15.0 * sigma2.powi(3),
            v_sup: 1.0 / (2.0 * sigma2),
            atom_at_zero: 0.0,
            support_sq: (0.0, f64::INFINITY),
            sampler_grid: None,
        })
    }

    pub fn bernoulli(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidMeasure(format!(
                "bernoulli scale must be positive and finite, got {c}"
            )));
        }
        let c2 = c * c;
        Ok(SourceMeasure {
            kind: MeasureKind::SymmetricBernoulli { c },
            variance: c2,
            mu4: c2 * c2,
            mu6: c2 * c2 * c2,
            v_sup: f64::INFINITY,
            atom_at_zero: 0.0,
            support_sq: (c2, c2),
            sampler_grid: None,
        })
    }

    pub fn uniform(a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidMeasure(format!(
                "uniform half-width must be positive and finite, got {a}"
            )));
        }
        let a2 = a * a;
        Ok(SourceMeasure {
            kind: MeasureKind::SymmetricUniform { a },
            variance: a2 / 3.0,
            mu4: a2 * a2 / 5.0,
            mu6: a2 * a2 * a2 / 7.0,
            v_sup: f64::INFINITY,
            atom_at_zero: 0.0,
            support_sq: (0.0, a2),
            sampler_grid: None,
        })
    }

    /// Register a user density.
    ///
    /// The callable is probed for symmetry, then symmetrized as
    /// `(f(z) + f(-z))/2` and renormalized by quadrature. `support_radius` may
    /// be `f64::INFINITY`, in which case `v0 > 0` must be a declared tilt with
    /// `∫ exp(v0 z^2) f dz < ∞`; this is validated numerically and used to
    /// pick the working integration radius.
    pub fn from_density<F>(density: F, support_radius: f64, v0: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let density: DensityFn = Arc::new(density);
        let unbounded = !support_radius.is_finite();
        if unbounded && !(v0 > 0.0) {
            return Err(Error::InvalidMeasure(
                "unbounded support requires a positive exponential-moment bound v0".into(),
            ));
        }
        if !unbounded && !(support_radius > 0.0) {
            return Err(Error::InvalidMeasure(
                "support radius must be positive".into(),
            ));
        }

        // Working radius: either the declared support, or chosen from the
        // validated exponential moment so the neglected tail is below 1e-14
        // even under the z^6 weight.
        let radius = if unbounded {
            let scale = 1.0 / v0.sqrt();
            let mut r = scale;
            let mut total = 0.0f64;
            let mut shells_growing = 0;
            let mut prev_shell = f64::INFINITY;
            loop {
                let inner = if r == scale { 0.0 } else { r / 2.0 };
                let shell = quad::adaptive(rule(), inner, r, QUAD_REL_TOL, 0.0, |z| {
                    (v0 * z * z).exp() * (density(z) + density(-z))
                })
                .value;
                total += shell;
                if shell > prev_shell {
                    shells_growing += 1;
                } else {
                    shells_growing = 0;
                }
                if shells_growing >= 3 || r > scale * (1 << 20) as f64 {
                    return Err(Error::InvalidMeasure(
                        "exponential square moment at v0 appears divergent".into(),
                    ));
                }
                if total > 0.0 && shell <= 1e-13 * total {
                    break;
                }
                prev_shell = shell;
                r *= 2.0;
            }
            // Tail of rho beyond R is at most M exp(-v0 R^2); push it to 1e-20
            // so sixth moments keep ten digits.
            ((total.max(1.0).ln() + 20.0 * std::f64::consts::LN_10) / v0).sqrt()
        } else {
            support_radius
        };

        // Symmetry probe on the raw callable before silently symmetrizing.
        let mut sup_f = 0.0f64;
        let mut sup_asym = 0.0f64;
        for i in 0..PROBE_POINTS {
            let z = radius * (i as f64 + 0.5) / PROBE_POINTS as f64;
            let (fp, fm) = (density(z), density(-z));
            if !(fp >= 0.0) || !(fm >= 0.0) {
                return Err(Error::InvalidMeasure(format!(
                    "density is negative or NaN at |z| = {z}"
                )));
            }
            sup_f = sup_f.max(fp).max(fm);
            sup_asym = sup_asym.max((fp - fm).abs());
        }
        if sup_f <= 0.0 {
            return Err(Error::InvalidMeasure("density vanishes on its support".into()));
        }
        if sup_asym > 1e-6 * sup_f {
            return Err(Error::InvalidMeasure(format!(
                "density is asymmetric: sup |f(z) - f(-z)| = {sup_asym:.3e} vs sup f = {sup_f:.3e}"
            )));
        }

        let sym = {
            let density = density.clone();
            move |z: f64| {
                if z.abs() > radius {
                    0.0
                } else {
                    0.5 * (density(z) + density(-z))
                }
            }
        };
        let log_sym = |z: f64| sym(z).ln();
        let (m, ok, _) =
            quad::adaptive_moments(rule(), -radius, radius, 6, 0.0, QUAD_REL_TOL, log_sym);
        if !ok {
            return Err(Error::Quadrature(
                "user density moments did not stabilize".into(),
            ));
        }
        let norm = m[0];
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidMeasure(
                "density does not integrate to a positive finite mass".into(),
            ));
        }
        let variance = m[2] / norm;
        if variance <= 1e-300 {
            return Err(Error::InvalidMeasure(
                "degenerate density: zero variance (Dirac mass at 0)".into(),
            ));
        }

        // Support scan: smallest |z| carrying mass (for the gap hypothesis).
        let mut support_gap = 0.0;
        for i in 0..(PROBE_POINTS * 4) {
            let z = radius * (i as f64 + 0.5) / (PROBE_POINTS * 4) as f64;
            if sym(z) > 0.0 {
                support_gap = if i == 0 { 0.0 } else { z };
                break;
            }
        }

        let grid = GridSampler::from_log_density(-radius, radius, 8192, log_sym)?;
        Ok(SourceMeasure {
            kind: MeasureKind::SymmetricDensity {
                density,
                support_radius,
                radius,
                norm,
                support_gap,
            },
            variance,
            mu4: m[4] / norm,
            mu6: m[6] / norm,
            v_sup: if unbounded { v0 } else { f64::INFINITY },
            atom_at_zero: 0.0,
            support_sq: (support_gap * support_gap, radius * radius),
            sampler_grid: Some(grid),
        })
    }

    /// Mixture `atom · delta_0 + (1 - atom) · base`.
    pub fn zero_inflated(atom: f64, base: SourceMeasure) -> Result<Self> {
        if !(0.0..1.0).contains(&atom) {
            return Err(Error::InvalidMeasure(format!(
                "atom mass at zero must lie in [0, 1), got {atom}"
            )));
        }
        if matches!(base.kind, MeasureKind::ZeroInflated { .. }) {
            return Err(Error::InvalidMeasure(
                "nested zero inflation is not supported".into(),
            ));
        }
        let keep = 1.0 - atom;
        Ok(SourceMeasure {
            variance: keep * base.variance,
            mu4: keep * base.mu4,
            mu6: keep * base.mu6,
            v_sup: base.v_sup,
            atom_at_zero: atom,
            support_sq: (0.0, base.support_sq.1),
            sampler_grid: None,
            kind: MeasureKind::ZeroInflated {
                atom,
                base: Box::new(base),
            },
        })
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    /// Variance `sigma^2` of `rho`.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Fourth moment `mu_4`.
    pub fn mu4(&self) -> f64 {
        self.mu4
    }

    /// Sixth moment `mu_6`.
    pub fn mu6(&self) -> f64 {
        self.mu6
    }

    /// Supremum of admissible tilts `v` (open boundary).
    pub fn v_sup(&self) -> f64 {
        self.v_sup
    }

    /// Tighten the admissible-tilt supremum to a declared trust bound
    /// `0 < v0 <= v_sup`. Quadrature windows computed from the cap are wider
    /// than the true envelope needs, which is safe.
    pub fn with_v_sup_cap(mut self, v0: f64) -> Result<Self> {
        if !(v0 > 0.0 && v0 <= self.v_sup) {
            return Err(Error::InvalidMeasure(format!(
                "v0 cap must lie in (0, {}], got {v0}",
                self.v_sup
            )));
        }
        self.v_sup = v0;
        Ok(self)
    }

    /// `rho({0})`.
    pub fn atom_at_zero(&self) -> f64 {
        self.atom_at_zero
    }

    /// `(K^2, L^2)` support-squared bounds.
    pub fn support_sq(&self) -> (f64, f64) {
        self.support_sq
    }

    /// Whether the pair law of `(Z, Z^2)` is concentrated on a segment
    /// (two-point measures: `Z^2` is deterministic).
    pub fn degenerate_pair(&self) -> bool {
        matches!(self.kind, MeasureKind::SymmetricBernoulli { .. })
    }

    /// Whether `rho` is absolutely continuous.
    pub fn has_density(&self) -> bool {
        matches!(
            self.kind,
            MeasureKind::GaussianCentered { .. }
                | MeasureKind::SymmetricUniform { .. }
                | MeasureKind::SymmetricDensity { .. }
        )
    }

    /// Density `f(z)` for absolutely continuous kinds.
    pub fn density(&self, z: f64) -> Option<f64> {
        match &self.kind {
            MeasureKind::GaussianCentered { sigma2 } => {
                Some((-z * z / (2.0 * sigma2)).exp() / (2.0 * std::f64::consts::PI * sigma2).sqrt())
            }
            MeasureKind::SymmetricUniform { a } => {
                Some(if z.abs() <= *a { 0.5 / a } else { 0.0 })
            }
            MeasureKind::SymmetricDensity {
                density,
                radius,
                norm,
                ..
            } => Some(if z.abs() > *radius {
                0.0
            } else {
                0.5 * (density(z) + density(-z)) / norm
            }),
            _ => None,
        }
    }

    /// `ln f(z)` for absolutely continuous kinds (`-inf` off the support).
    pub(crate) fn log_density(&self, z: f64) -> Option<f64> {
        match &self.kind {
            MeasureKind::GaussianCentered { sigma2 } => {
                Some(-z * z / (2.0 * sigma2) - 0.5 * (2.0 * std::f64::consts::PI * sigma2).ln())
            }
            _ => self.density(z).map(f64::ln),
        }
    }

    /// Atom list `(z, weight)` for purely atomic kinds.
    pub(crate) fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match &self.kind {
            MeasureKind::SymmetricBernoulli { c } => Some(vec![(-*c, 0.5), (*c, 0.5)]),
            MeasureKind::ZeroInflated { atom, base } => base.atoms().map(|mut list| {
                for (_, w) in list.iter_mut() {
                    *w *= 1.0 - atom;
                }
                list.push((0.0, *atom));
                list
            }),
            _ => None,
        }
    }

    /// Quadrature window for the tilted integrand `z^j e^{u z + v z^2} f(z)`.
    ///
    /// For unbounded kinds the envelope is a Gaussian with precision
    /// `2q = 2(v_sup - v)`; the window is its peak widened by
    /// [`TAIL_WIDTH`] standard deviations, hulled with the untilted window.
    pub(crate) fn tilt_interval(&self, u: f64, v: f64) -> (f64, f64) {
        match &self.kind {
            MeasureKind::GaussianCentered { .. } => {
                // The tilted integrand is exactly one Gaussian bump with
                // precision 2q; no need to widen to the untilted window.
                let q = self.v_sup - v;
                let peak = u / (2.0 * q);
                let s = (0.5 / q).sqrt();
                (peak - TAIL_WIDTH * s, peak + TAIL_WIDTH * s)
            }
            MeasureKind::SymmetricUniform { a } => (-*a, *a),
            MeasureKind::SymmetricDensity { radius, .. } => {
                if self.v_sup.is_finite() {
                    let q = self.v_sup - v;
                    let peak = u / (2.0 * q);
                    let s = (0.5 / q).sqrt();
                    ((peak - TAIL_WIDTH * s).min(-radius), (peak + TAIL_WIDTH * s).max(*radius))
                } else {
                    (-*radius, *radius)
                }
            }
            MeasureKind::SymmetricBernoulli { .. } | MeasureKind::ZeroInflated { .. } => {
                unreachable!("tilt_interval is only defined for density kinds")
            }
        }
    }

    /// One draw from `rho`.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            MeasureKind::GaussianCentered { sigma2 } => {
                let z: f64 = StandardNormal.sample(rng);
                z * sigma2.sqrt()
            }
            MeasureKind::SymmetricBernoulli { c } => {
                if rng.gen_bool(0.5) {
                    *c
                } else {
                    -*c
                }
            }
            MeasureKind::SymmetricUniform { a } => rng.gen_range(-*a..=*a),
            MeasureKind::SymmetricDensity { .. } => self
                .sampler_grid
                .as_ref()
                .expect("density kind always carries a sampler grid")
                .inverse(rng.gen::<f64>()),
            MeasureKind::ZeroInflated { atom, base } => {
                if rng.gen_bool(*atom) {
                    0.0
                } else {
                    base.sample_one(rng)
                }
            }
        }
    }

    /// Which of the concentration hypotheses hold for this measure.
    pub fn concentration_conditions(&self) -> HypothesisReport {
        let has_density = self.has_density();
        let finite_atoms = match &self.kind {
            MeasureKind::SymmetricBernoulli { .. } => true,
            MeasureKind::ZeroInflated { base, .. } => base.atoms().is_some(),
            _ => false,
        };
        let gap_above_zero = match &self.kind {
            MeasureKind::SymmetricBernoulli { .. } => true,
            MeasureKind::SymmetricDensity { support_gap, .. } => *support_gap > 0.0,
            _ => false,
        };
        let threshold = (-0.5f64).exp();
        let atom_below_threshold = self.atom_at_zero < threshold;
        HypothesisReport {
            has_density,
            finite_atoms,
            gap_above_zero,
            atom_below_threshold,
            atom_at_zero: self.atom_at_zero,
            overall: has_density || finite_atoms || gap_above_zero || atom_below_threshold,
        }
    }

    /// `j`-th moment by quadrature / exact summation, for cross-checking the
    /// cached analytic moments.
    pub fn moment_by_quadrature(&self, j: usize) -> Result<f64> {
        if let Some(atoms) = self.atoms() {
            return Ok(atoms.iter().map(|(z, w)| w * z.powi(j as i32)).sum());
        }
        match &self.kind {
            MeasureKind::ZeroInflated { atom, base } => {
                let m = base.moment_by_quadrature(j)?;
                Ok(if j == 0 { 1.0 } else { (1.0 - atom) * m })
            }
            _ => {
                let (a, b) = self.tilt_interval(0.0, 0.0);
                let (m, ok, _) =
                    quad::adaptive_moments(rule(), a, b, j, 0.0, QUAD_REL_TOL, |z| {
                        self.log_density(z).expect("density kind")
                    });
                if !ok {
                    return Err(Error::Quadrature("moment quadrature".into()));
                }
                Ok(m[j] / m[0])
            }
        }
    }

    /// The integrability-condition integral
    /// `∫∫ f^p(x+y) f^p(y) |x|^{1-p} dx dy` for `p ∈ (1, 2]`.
    ///
    /// Split into `|x| <= 1` (power substitution absorbs the singularity) and
    /// `|x| > 1`; a non-stabilizing estimate is reported as suspected
    /// divergence rather than an error.
    pub fn integrability_integral(&self, p: f64) -> Result<IntegralEstimate> {
        if !(p > 1.0 && p <= 2.0) {
            return Err(Error::InvalidArgument(format!(
                "integrability exponent must lie in (1, 2], got {p}"
            )));
        }
        if !self.has_density() {
            return Err(Error::InvalidArgument(
                "integrability integral requires an absolutely continuous measure".into(),
            ));
        }
        let r = match &self.kind {
            MeasureKind::GaussianCentered { sigma2 } => TAIL_WIDTH * sigma2.sqrt(),
            MeasureKind::SymmetricUniform { a } => *a,
            MeasureKind::SymmetricDensity { radius, .. } => *radius,
            _ => unreachable!(),
        };
        let fp = |z: f64| self.density(z).unwrap().powf(p);
        // Autocorrelation of f^p at lag x; vanishes for |x| > 2r.
        let corr = |x: f64| -> f64 {
            let lo = (-r).max(-r - x);
            let hi = r.min(r - x);
            if hi <= lo {
                return 0.0;
            }
            quad::adaptive(rule(), lo, hi, 1e-10, 1e-300, |y| fp(x + y) * fp(y)).value
        };
        let outer_hi = 2.0 * r;
        // |x| > 1 part: smooth.
        let far = if outer_hi > 1.0 {
            let est = quad::adaptive(rule(), 1.0, outer_hi, 1e-9, 1e-300, |x| {
                x.powf(1.0 - p) * corr(x)
            });
            if !est.converged {
                return Ok(IntegralEstimate::DivergenceSuspected {
                    partial: 2.0 * est.value,
                });
            }
            2.0 * est.value
        } else {
            0.0
        };
        // |x| <= 1 part.
        let near_hi = outer_hi.min(1.0);
        if p < 2.0 {
            // Substitute x = xi^{1/(2-p)}: the weight |x|^{1-p} dx becomes
            // d(xi)/(2-p) and the integrand is bounded.
            let q = 2.0 - p;
            let est = quad::adaptive(rule(), 0.0, near_hi.powf(q), 1e-9, 1e-300, |xi| {
                corr(xi.powf(1.0 / q))
            });
            let near = 2.0 * est.value / q;
            if !est.converged {
                return Ok(IntegralEstimate::DivergenceSuspected {
                    partial: near + far,
                });
            }
            Ok(IntegralEstimate::Finite { value: near + far })
        } else {
            // p = 2: probe ∫_eps^1 corr(x)/x dx on a shrinking ladder; constant
            // increments mean a logarithmic divergence.
            let mut eps = 0.125;
            let mut total = 2.0
                * quad::adaptive(rule(), eps, near_hi, 1e-9, 1e-300, |x| corr(x) / x).value;
            let mut increments = Vec::new();
            for _ in 0..24 {
                let inc =
                    2.0 * quad::adaptive(rule(), eps / 2.0, eps, 1e-9, 1e-300, |x| corr(x) / x)
                        .value;
                total += inc;
                increments.push(inc);
                eps /= 2.0;
                if increments.len() >= 3 {
                    let k = increments.len();
                    if increments[k - 1] <= 1e-10 * total.abs() {
                        return Ok(IntegralEstimate::Finite { value: total + far });
                    }
                    if increments[k - 1] > 0.5 * increments[k - 3] {
                        return Ok(IntegralEstimate::DivergenceSuspected {
                            partial: total + far,
                        });
                    }
                }
            }
            Ok(IntegralEstimate::DivergenceSuspected {
                partial: total + far,
            })
        }
    }
}

/// Report on the four concentration hypotheses; `overall` is their disjunction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisReport {
    /// `rho` has a density.
    pub has_density: bool,
    /// `rho` is a finite sum of Dirac masses.
    pub finite_atoms: bool,
    /// Some interval `[0, c]`, `c > 0`, carries no mass.
    pub gap_above_zero: bool,
    /// `rho({0}) < exp(-1/2)`.
    pub atom_below_threshold: bool,
    pub atom_at_zero: f64,
    pub overall: bool,
}

/// Outcome of a possibly-divergent quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegralEstimate {
    Finite { value: f64 },
    DivergenceSuspected { partial: f64 },
}

impl IntegralEstimate {
    pub fn finite_value(&self) -> Option<f64> {
        match self {
            IntegralEstimate::Finite { value } => Some(*value),
            IntegralEstimate::DivergenceSuspected { .. } => None,
        }
    }
}

/// Flat textual measure specification, as parsed from config files.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpec {
    pub kind: String,
    /// Gaussian variance.
    pub sigma2: f64,
    /// Bernoulli scale.
    pub c: f64,
    /// Uniform half-width.
    pub a: f64,
    /// Optional extra atom at zero (wraps the base kind).
    pub atom0: f64,
    /// Optional tilt-supremum override (trust bound for quadrature windows).
    pub v0: Option<f64>,
}

impl Default for MeasureSpec {
    fn default() -> Self {
        MeasureSpec {
            kind: "gaussian".into(),
            sigma2: 1.0,
            c: 1.0,
            a: 1.0,
            atom0: 0.0,
            v0: None,
        }
    }
}

impl MeasureSpec {
    pub fn build(&self) -> Result<SourceMeasure> {
        let base = match self.kind.as_str() {
            "gaussian" => SourceMeasure::gaussian(self.sigma2)?,
            "bernoulli" => SourceMeasure::bernoulli(self.c)?,
            "uniform" => SourceMeasure::uniform(self.a)?,
            other => {
                return Err(Error::Config(format!(
                    "unknown measure kind '{other}' (expected gaussian|bernoulli|uniform)"
                )))
            }
        };
        let m = if self.atom0 > 0.0 {
            SourceMeasure::zero_inflated(self.atom0, base)?
        } else {
            base
        };
        match self.v0 {
            Some(v0) => m.with_v_sup_cap(v0),
            None => Ok(m),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn builtin_moments_are_exact() {
        let g = SourceMeasure::gaussian(1.0).unwrap();
        assert_eq!((g.variance(), g.mu4(), g.mu6()), (1.0, 3.0, 15.0));
        let b = SourceMeasure::bernoulli(1.0).unwrap();
        assert_eq!((b.variance(), b.mu4(), b.mu6()), (1.0, 1.0, 1.0));
        let u = SourceMeasure::uniform(1.0).unwrap();
        assert_eq!(
            (u.variance(), u.mu4(), u.mu6()),
            (1.0 / 3.0, 1.0 / 5.0, 1.0 / 7.0)
        );
    }

    #[test]
    fn quadrature_moments_match_cached_moments() {
        for m in [
            SourceMeasure::gaussian(1.7).unwrap(),
            SourceMeasure::uniform(0.8).unwrap(),
            SourceMeasure::bernoulli(1.3).unwrap(),
            SourceMeasure::zero_inflated(0.5, SourceMeasure::bernoulli(1.0).unwrap()).unwrap(),
        ] {
            for (j, want) in [(2, m.variance()), (4, m.mu4()), (6, m.mu6())] {
                let got = m.moment_by_quadrature(j).unwrap();
                assert_relative_eq!(got, want, max_relative = 1e-10);
            }
            assert!(m.moment_by_quadrature(1).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn fourth_moment_gap_vanishes_only_for_bernoulli() {
        for m in [
            SourceMeasure::gaussian(2.0).unwrap(),
            SourceMeasure::uniform(1.5).unwrap(),
            SourceMeasure::zero_inflated(0.3, SourceMeasure::gaussian(1.0).unwrap()).unwrap(),
        ] {
            assert!(m.mu4() - m.variance().powi(2) > 0.0, "{m}");
        }
        let b = SourceMeasure::bernoulli(2.0).unwrap();
        assert_eq!(b.mu4() - b.variance().powi(2), 0.0);
    }

    #[test]
    fn densities_are_symmetric_on_a_grid() {
        for m in [
            SourceMeasure::gaussian(1.0).unwrap(),
            SourceMeasure::uniform(0.7).unwrap(),
        ] {
            for i in 0..1000 {
                let z = 3.0 * (i as f64 + 0.5) / 1000.0;
                assert_eq!(m.density(z), m.density(-z));
            }
        }
    }

    #[test]
    fn degenerate_and_invalid_specs_are_rejected() {
        assert!(SourceMeasure::gaussian(0.0).is_err());
        assert!(SourceMeasure::bernoulli(-1.0).is_err());
        assert!(SourceMeasure::uniform(0.0).is_err());
        assert!(SourceMeasure::zero_inflated(1.0, SourceMeasure::gaussian(1.0).unwrap()).is_err());
        // Dirac-like density (all mass in a spike at 0) has ~zero variance.
        let spike = SourceMeasure::from_density(
            |z: f64| if z.abs() < 1e-160 { 1e159 } else { 0.0 },
            1.0,
            0.0,
        );
        assert!(spike.is_err());
        // Asymmetric density is rejected by the probe.
        let asym = SourceMeasure::from_density(|z: f64| if z > 0.0 { 1.0 } else { 0.1 }, 1.0, 0.0);
        assert!(asym.is_err());
    }

    #[test]
    fn user_density_reproduces_gaussian_moments() {
        let m = SourceMeasure::from_density(
            |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt(),
            f64::INFINITY,
            0.25,
        )
        .unwrap();
        assert_relative_eq!(m.variance(), 1.0, max_relative = 1e-9);
        assert_relative_eq!(m.mu4(), 3.0, max_relative = 1e-9);
        assert_relative_eq!(m.mu6(), 15.0, max_relative = 1e-8);
        assert_eq!(m.v_sup(), 0.25);
    }

    #[test]
    fn conditions_per_kind() {
        let g = SourceMeasure::gaussian(1.0).unwrap().concentration_conditions();
        assert!(g.has_density && g.overall);

        let b = SourceMeasure::bernoulli(1.0).unwrap().concentration_conditions();
        assert!(b.finite_atoms && b.gap_above_zero && b.atom_below_threshold && b.overall);
        assert_eq!(b.atom_at_zero, 0.0);

        // Heavy atom at zero over a continuous part: every hypothesis fails.
        let bad = SourceMeasure::zero_inflated(0.7, SourceMeasure::gaussian(1.0).unwrap())
            .unwrap()
            .concentration_conditions();
        assert!(0.7 > (-0.5f64).exp()); // 0.7 > 0.6065...
        assert!(!bad.has_density && !bad.finite_atoms && !bad.gap_above_zero);
        assert!(!bad.atom_below_threshold && !bad.overall);

        // Same atom over a two-point measure is a finite atom sum: passes.
        let ok = SourceMeasure::zero_inflated(0.7, SourceMeasure::bernoulli(1.0).unwrap())
            .unwrap()
            .concentration_conditions();
        assert!(ok.finite_atoms && ok.overall);
    }

    #[test]
    fn integrability_gaussian_matches_closed_form() {
        // For the standard Gaussian and p = 3/2 the integral reduces to
        // (2 pi)^{-1} 3^{-1/2} (8/3)^{1/4} Gamma(1/4).
        let m = SourceMeasure::gaussian(1.0).unwrap();
        let got = m
            .integrability_integral(1.5)
            .unwrap()
            .finite_value()
            .expect("finite");
        let gamma_quarter = statrs::function::gamma::gamma(0.25);
        let want = (8.0f64 / 3.0).powf(0.25) * gamma_quarter
            / (2.0 * std::f64::consts::PI * 3.0f64.sqrt());
        assert_relative_eq!(got, want, max_relative = 1e-7);

        // Bounded-density estimate from the Fubini split.
        let f_sup = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        let int_f32: f64 = quad::adaptive(rule(), -16.0, 16.0, 1e-12, 0.0, |z| {
            m.density(z).unwrap().powf(1.5)
        })
        .value;
        let bound = f_sup.powf(1.5) * int_f32 * 4.0 + int_f32 * int_f32;
        assert!(got < bound);
    }

    #[test]
    fn integrability_uniform_matches_closed_form() {
        // f = 1/2 on [-1,1]: the integral is 2 sqrt(2) / 3.
        let m = SourceMeasure::uniform(1.0).unwrap();
        let got = m
            .integrability_integral(1.5)
            .unwrap()
            .finite_value()
            .expect("finite");
        assert_relative_eq!(got, 2.0 * 2.0f64.sqrt() / 3.0, max_relative = 1e-7);
    }

    #[test]
    fn integrability_rejects_bad_exponents_and_flags_p_two() {
        let m = SourceMeasure::gaussian(1.0).unwrap();
        assert!(m.integrability_integral(1.0).is_err());
        assert!(m.integrability_integral(2.5).is_err());
        // At p = 2 the |x|^{-1} weight against corr(0) > 0 diverges.
        match m.integrability_integral(2.0).unwrap() {
            IntegralEstimate::DivergenceSuspected { partial } => assert!(partial > 0.0),
            IntegralEstimate::Finite { value } => panic!("expected divergence, got {value}"),
        }
        let b = SourceMeasure::bernoulli(1.0).unwrap();
        assert!(b.integrability_integral(1.5).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_in_support() {
        use rand::SeedableRng;
        let m = SourceMeasure::bernoulli(1.0).unwrap();
        let mut r1 = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut r2 = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let (a, b) = (m.sample_one(&mut r1), m.sample_one(&mut r2));
            assert_eq!(a, b);
            assert!(a == 1.0 || a == -1.0);
        }
    }

    #[test]
    fn user_density_sampler_tracks_its_cdf() {
        use rand::SeedableRng;
        // Semicircle-like bounded density.
        let m = SourceMeasure::from_density(|z: f64| (1.0 - z * z).max(0.0), 1.0, 0.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 200_000;
        let mean_sq: f64 = (0..n).map(|_| m.sample_one(&mut rng).powi(2)).sum::<f64>() / n as f64;
        // Var = ∫ z^2 (3/4)(1-z^2) dz = 1/5.
        assert_abs_diff_eq!(mean_sq, m.variance(), epsilon = 5e-3);
        assert_relative_eq!(m.variance(), 0.2, max_relative = 1e-9);
    }

    #[test]
    fn v_sup_cap_restricts_the_domain() {
        let g = SourceMeasure::gaussian(1.0).unwrap().with_v_sup_cap(0.25).unwrap();
        assert_eq!(g.v_sup(), 0.25);
        assert!(SourceMeasure::gaussian(1.0).unwrap().with_v_sup_cap(0.7).is_err());
        let spec = MeasureSpec {
            kind: "uniform".into(),
            v0: Some(3.0),
            ..Default::default()
        };
        assert_eq!(spec.build().unwrap().v_sup(), 3.0);
    }

    #[test]
    fn measure_spec_round_trip() {
        let spec = MeasureSpec {
            kind: "uniform".into(),
            a: 2.0,
            ..Default::default()
        };
        let m = spec.build().unwrap();
        assert_relative_eq!(m.variance(), 4.0 / 3.0, max_relative = 1e-14);
        assert!(MeasureSpec {
            kind: "cauchy".into(),
            ..Default::default()
        }
        .build()
        .is_err());
    }
}
