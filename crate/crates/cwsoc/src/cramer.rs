//! The Cramér transform of the pair law and the structure of `I - F`.
//!
//! `I(x, y) = sup_{u,v} ( x u + y v - Lambda(u, v) )` is computed by a damped
//! Newton iteration on the stationarity system `∇Lambda(u, v) = (x, y)`,
//! started at the origin (which maps to the concentration point
//! `(0, sigma^2)`). By convex duality the maximizer is `∇I(x, y)` and
//! `D²I(x, y)` is the inverse of `D²Lambda` at the maximizer, so every solve
//! also yields first and second derivatives of the rate function.
//!
//! Two closed forms serve as independent oracles: the centered Gaussian rate
//! `(y/s2 - 1 - ln((y - x^2)/s2))/2` and the two-point rate
//! `((c+x)ln(c+x) + (c-x)ln(c-x))/(2c) - ln c` on its segment `y = c^2`.
//!
//! `F(x, y) = x^2/(2y)` is the per-site interaction term; the gap `I - F` is
//! nonnegative on `x^2 <= y` and vanishes only at `(0, sigma^2)`, which the
//! grid scan plus sign-bisection polish verifies at desk scale.

use crate::loglaplace::log_laplace;
use crate::measure::SourceMeasure;
use crate::quad::linspace;
use crate::{Error, Result};

/// Default tolerance on the dual gradient residual.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Gap below which a grid point counts as violating nonnegativity of `I - F`.
pub const GAP_VIOLATION_TOL: f64 = -1e-9;
const MAX_ITER: usize = 200;
/// Cap on `|u|, |v|`; beyond it the primal point is declared too close to
/// the boundary of the admissible region.
const DUAL_CAP: f64 = 1e6;

/// A rate-function value with its dual maximizer and solve metadata.
#[derive(Debug, Clone)]
pub struct CramerValue {
    pub x: f64,
    pub y: f64,
    /// `I(x, y)`.
    pub value: f64,
    /// Maximizing dual point `(u, v)`; equals `∇I(x, y)` in the interior.
    pub maximizer: Option<(f64, f64)>,
    pub iterations: usize,
    /// `‖∇Lambda(u, v) - (x, y)‖` at the returned maximizer.
    pub residual: f64,
    /// `D²Lambda` at the maximizer (singular for two-point measures).
    pub hessian_at_max: Option<[[f64; 2]; 2]>,
}

impl CramerValue {
    /// `D²I(x, y) = (D²Lambda)^{-1}` at the maximizer.
    pub fn rate_hessian(&self) -> Option<[[f64; 2]; 2]> {
        let h = self.hessian_at_max?;
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det <= 0.0 || !det.is_finite() {
            return None;
        }
        Some([
            [h[1][1] / det, -h[0][1] / det],
            [-h[1][0] / det, h[0][0] / det],
        ])
    }

    /// `det D²I(x, y) = 1 / det D²Lambda`.
    pub fn rate_hessian_det(&self) -> Option<f64> {
        let h = self.hessian_at_max?;
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det <= 0.0 || !det.is_finite() {
            return None;
        }
        Some(1.0 / det)
    }
}

fn solve2(h: &[[f64; 2]; 2], r: [f64; 2]) -> Option<[f64; 2]> {
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    if !det.is_finite() || det.abs() < 1e-300 {
        return None;
    }
    Some([
        (h[1][1] * r[0] - h[0][1] * r[1]) / det,
        (h[0][0] * r[1] - h[1][0] * r[0]) / det,
    ])
}

fn check_admissible(m: &SourceMeasure, x: f64, y: f64) -> Result<()> {
    let (k2, l2) = m.support_sq();
    if !(y > k2) {
        return Err(Error::Domain(format!(
            "( {x}, {y} ): y must exceed the support-squared infimum {k2}"
        )));
    }
    if !(y < l2) {
        return Err(Error::Domain(format!(
            "( {x}, {y} ): y must lie below the support-squared supremum {l2}"
        )));
    }
    if !(x * x < y) {
        return Err(Error::Domain(format!(
            "( {x}, {y} ): x^2 < y violated"
        )));
    }
    Ok(())
}

/// Two-point case: the pair law is carried by the segment `y = c^2`, where the
/// problem reduces to the one-dimensional conjugate of `ln cosh(uc)`.
fn solve_dual_two_point(m: &SourceMeasure, x: f64, y: f64, tol: f64) -> Result<CramerValue> {
    let c = m.variance().sqrt();
    let c2 = m.variance();
    if (y - c2).abs() > 1e-9 * c2 {
        return Err(Error::Domain(format!(
            "( {x}, {y} ): a two-point measure carries mass only on the segment y = c^2 = {c2}"
        )));
    }
    if x.abs() >= c {
        return Err(Error::Domain(format!(
            "( {x}, {y} ): |x| must be below the support bound c = {c}"
        )));
    }
    // Newton on c tanh(uc) = x; the map is increasing and odd.
    let mut u = 0.0f64;
    let mut res = x.abs();
    let mut iterations = 0;
    for iter in 1..=MAX_ITER {
        iterations = iter;
        let t = (u * c).tanh();
        let f = c * t - x;
        res = f.abs();
        if res <= tol {
            break;
        }
        let df = c2 * (1.0 - t * t);
        let mut step = f / df;
        // Keep the iterate strictly inside the saturation region.
        while (c * ((u - step) * c).tanh() - x).abs() > res && step.abs() > 1e-18 {
            step *= 0.5;
        }
        u -= step;
        if u.abs() > DUAL_CAP {
            return Err(Error::BoundaryProximity { x, y, cap: DUAL_CAP });
        }
    }
    if res > tol {
        return Err(Error::NoConvergence {
            what: format!("two-point dual solve at ({x}, {y})"),
            residual: res,
            iterations,
        });
    }
    let uc = (u * c).abs();
    let ln_cosh = uc - std::f64::consts::LN_2 + (-2.0 * uc).exp().ln_1p();
    // f3 - f1 f2 and f4 - f2^2 vanish (z^2 is constant on the support), so
    // D^2 Lambda has rank one and the rate Hessian does not exist here.
    let h11 = c2 * (1.0 - (u * c).tanh().powi(2));
    Ok(CramerValue {
        x,
        y,
        value: u * x - ln_cosh,
        maximizer: Some((u, 0.0)),
        iterations,
        residual: res,
        hessian_at_max: Some([[h11, 0.0], [0.0, 0.0]]),
    })
}

/// Compute `I(x, y)` for an admissible interior point by damped Newton on
/// `∇Lambda(u, v) = (x, y)` from `(0, 0)`.
///
/// Near the boundary of the admissible region the maximizer norm diverges;
/// iterates are capped at `1e6` and reported as boundary proximity instead of
/// looping.
pub fn solve_dual(m: &SourceMeasure, x: f64, y: f64, tol: f64) -> Result<CramerValue> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if m.degenerate_pair() {
        return solve_dual_two_point(m, x, y, tol);
    }
    check_admissible(m, x, y)?;

    let mut u = 0.0f64;
    let mut v = 0.0f64;
    let mut dp = log_laplace(m, u, v)?;
    let mut res = ((dp.grad[0] - x).powi(2) + (dp.grad[1] - y).powi(2)).sqrt();
    let mut iterations = 0;

    for iter in 1..=MAX_ITER {
        if res <= tol {
            return Ok(CramerValue {
                x,
                y,
                value: x * u + y * v - dp.lambda,
                maximizer: Some((u, v)),
                iterations,
                residual: res,
                hessian_at_max: Some(dp.hessian),
            });
        }
        iterations = iter;
        let r = [dp.grad[0] - x, dp.grad[1] - y];
        let Some(delta) = solve2(&dp.hessian, r) else {
            return Err(Error::NoConvergence {
                what: format!("singular dual Hessian at ({x}, {y})"),
                residual: res,
                iterations,
            });
        };
        let mut alpha = 1.0f64;
        let mut advanced = false;
        while alpha > 1e-18 {
            let (un, vn) = (u - alpha * delta[0], v - alpha * delta[1]);
            if vn >= m.v_sup() {
                alpha *= 0.5;
                continue;
            }
            match log_laplace(m, un, vn) {
                Err(_) => {
                    alpha *= 0.5;
                }
                Ok(dpn) => {
                    let rn = ((dpn.grad[0] - x).powi(2) + (dpn.grad[1] - y).powi(2)).sqrt();
                    if rn < res {
                        u = un;
                        v = vn;
                        dp = dpn;
                        res = rn;
                        advanced = true;
                        break;
                    }
                    alpha *= 0.5;
                }
            }
        }
        if u.abs() > DUAL_CAP || v.abs() > DUAL_CAP {
            return Err(Error::BoundaryProximity { x, y, cap: DUAL_CAP });
        }
        if !advanced {
            return Err(Error::NoConvergence {
                what: format!("dual line search stalled at ({x}, {y})"),
                residual: res,
                iterations,
            });
        }
    }
    if res <= tol {
        return Ok(CramerValue {
            x,
            y,
            value: x * u + y * v - dp.lambda,
            maximizer: Some((u, v)),
            iterations,
            residual: res,
            hessian_at_max: Some(dp.hessian),
        });
    }
    Err(Error::NoConvergence {
        what: format!("dual solve at ({x}, {y})"),
        residual: res,
        iterations: MAX_ITER,
    })
}

/// Closed-form rate function of the centered Gaussian with variance `sigma2`:
/// `(y/s2 - 1 - ln((y - x^2)/s2))/2` on `x^2 < y`, `+inf` elsewhere.
pub fn gaussian_rate_oracle(sigma2: f64, x: f64, y: f64) -> f64 {
    if x * x >= y {
        return f64::INFINITY;
    }
    0.5 * (y / sigma2 - 1.0 - ((y - x * x) / sigma2).ln())
}

/// Closed-form rate of the two-point measure on its segment:
/// `phi_c(x) = ((c+x)ln(c+x) + (c-x)ln(c-x))/(2c) - ln c` for `|x| <= c`
/// (one-sided limit `ln 2` at the endpoints), `+inf` outside.
pub fn bernoulli_rate_oracle(c: f64, x: f64) -> f64 {
    if x.abs() > c {
        return f64::INFINITY;
    }
    let xlnx = |t: f64| if t == 0.0 { 0.0 } else { t * t.ln() };
    (xlnx(c + x) + xlnx(c - x)) / (2.0 * c) - c.ln()
}

/// The gap `G(x, y) = I(x, y) - x^2/(2y)`, nonnegative on the admissible
/// region and zero exactly at `(0, sigma^2)`.
pub fn rate_gap(m: &SourceMeasure, x: f64, y: f64) -> Result<f64> {
    let i = solve_dual(m, x, y, DEFAULT_TOL)?;
    Ok(i.value - x * x / (2.0 * y))
}

/// `I(0, 0) = -ln rho({0})` (`+inf` when there is no atom at zero).
pub fn rate_at_origin(m: &SourceMeasure) -> f64 {
    if m.atom_at_zero() > 0.0 {
        -m.atom_at_zero().ln()
    } else {
        f64::INFINITY
    }
}

/// Result of a grid scan of the gap `I - F`.
#[derive(Debug, Clone)]
pub struct GapReport {
    /// Smallest gap over the grid.
    pub min_gap: f64,
    /// Grid point attaining it.
    pub argmin: (f64, f64),
    /// Continuous minimizer located by sign bisection on `∇(I - F)` from the
    /// grid argmin.
    pub polished: Option<(f64, f64)>,
    /// Points with gap below [`GAP_VIOLATION_TOL`].
    pub violations: Vec<(f64, f64, f64)>,
    /// Points where the solve failed, with the reason.
    pub failures: Vec<(f64, f64, String)>,
    /// All evaluated `(x, y, gap)` rows.
    pub gaps: Vec<(f64, f64, f64)>,
}

/// Evaluate the gap on every grid point, collect violations of
/// `gap >= -1e-9`, and polish the argmin to a continuous minimizer.
pub fn rate_gap_scan(m: &SourceMeasure, points: &[(f64, f64)]) -> GapReport {
    let mut min_gap = f64::INFINITY;
    let mut argmin = (f64::NAN, f64::NAN);
    let mut violations = Vec::new();
    let mut failures = Vec::new();
    let mut gaps = Vec::with_capacity(points.len());
    for &(x, y) in points {
        match rate_gap(m, x, y) {
            Ok(gap) => {
                gaps.push((x, y, gap));
                if gap < min_gap {
                    min_gap = gap;
                    argmin = (x, y);
                }
                if gap < GAP_VIOLATION_TOL {
                    violations.push((x, y, gap));
                }
            }
            Err(e) => failures.push((x, y, e.to_string())),
        }
    }
    let polished = if argmin.0.is_finite() {
        polish_minimum(m, argmin)
    } else {
        None
    };
    GapReport {
        min_gap,
        argmin,
        polished,
        violations,
        failures,
        gaps,
    }
}

/// Locate the continuous minimizer of `I - F` near `start` by bisecting the
/// sign of each component of `∇(I - F)`; the gradient components come from
/// the dual maximizer, `∇I = (u, v)`, so they are first-order accurate.
fn polish_minimum(m: &SourceMeasure, start: (f64, f64)) -> Option<(f64, f64)> {
    let sigma2 = m.variance();
    if m.degenerate_pair() {
        let c = sigma2.sqrt();
        let gx = |x: f64| -> Option<f64> {
            let cv = solve_dual(m, x, sigma2, 1e-13).ok()?;
            Some(cv.maximizer?.0 - x / sigma2)
        };
        let x = bisect_sign(gx, start.0, 0.2 * c, c * 0.999)?;
        return Some((x, sigma2));
    }
    let (mut x, mut y) = start;
    let sigma = sigma2.sqrt();
    for _ in 0..2 {
        let yc = y;
        let gx = |t: f64| -> Option<f64> {
            let cv = solve_dual(m, t, yc, 1e-13).ok()?;
            Some(cv.maximizer?.0 - t / yc)
        };
        x = bisect_sign(gx, x, 0.1 * sigma, f64::INFINITY)?;
        let xc = x;
        let gy = |t: f64| -> Option<f64> {
            let cv = solve_dual(m, xc, t, 1e-13).ok()?;
            Some(cv.maximizer?.1 + xc * xc / (2.0 * t * t))
        };
        y = bisect_sign(gy, y, 0.1 * sigma2, f64::INFINITY)?;
    }
    Some((x, y))
}

/// Bisection on the sign of `g` around `center`, expanding the bracket up to
/// `|t| < cap` until the endpoint signs differ.
fn bisect_sign<G: Fn(f64) -> Option<f64>>(g: G, center: f64, width: f64, cap: f64) -> Option<f64> {
    let mut w = width;
    let (mut lo, mut hi) = (center - w, center + w);
    let clamp = |t: f64| t.clamp(-cap, cap);
    let mut glo = g(clamp(lo))?;
    let mut ghi = g(clamp(hi))?;
    let mut tries = 0;
    while glo.signum() == ghi.signum() {
        w *= 2.0;
        lo = clamp(center - w);
        hi = clamp(center + w);
        glo = g(lo)?;
        ghi = g(hi)?;
        tries += 1;
        if tries > 20 {
            return None;
        }
    }
    let _ = ghi;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid)?;
        if gm == 0.0 {
            return Some(mid);
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * (1.0 + mid.abs()) {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Coefficients of the quartic model `a02 h^2 + a40 x^4 + a21 x^2 h + a30 x^3`
/// fitted to the gap `I - F` near `(0, sigma^2)`.
#[derive(Debug, Clone, Copy)]
pub struct ExpansionFit {
    pub a02: f64,
    pub a40: f64,
    pub a21: f64,
    pub a30: f64,
    /// Root-mean-square residual of the least-squares fit.
    pub residual_rms: f64,
    /// Condition number of the (column-scaled) design matrix.
    pub condition: f64,
    pub radius: f64,
}

/// Least-squares fit of the gap on an anisotropic stencil around
/// `(0, sigma^2)`: `x` ranges over `±radius·sigma` while `h = y - sigma^2`
/// ranges over `±(radius·sigma)^2`, matching the natural `x ~ sqrt(h)`
/// scaling of the quartic minimum so both leading terms have the same order.
pub fn expansion_coefficients(m: &SourceMeasure, radius: f64) -> Result<ExpansionFit> {
    let sigma2 = m.variance();
    if m.mu4() - sigma2 * sigma2 <= 1e-12 * sigma2 * sigma2 {
        return Err(Error::InvalidArgument(
            "expansion requires mu4 > sigma^4 (non-two-point measure)".into(),
        ));
    }
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::InvalidArgument(
            "expansion radius must lie in (0, 1)".into(),
        ));
    }
    let sigma = sigma2.sqrt();
    let rx = radius * sigma;
    let rh = rx * rx;
    let (k2, l2) = m.support_sq();
    if sigma2 - rh <= k2 || sigma2 + rh >= l2 || rx * rx >= sigma2 - rh {
        return Err(Error::Domain(format!(
            "stencil of radius {radius} leaves the admissible region"
        )));
    }

    let xs = linspace(-rx, rx, 13);
    let hs = linspace(-rh, rh, 13);
    // Quartic-model monomials plus the two even-in-x sixth-order terms; on a
    // symmetric product grid x^4 h aliases exactly onto x^2 h and x^6 onto
    // x^4, so without these absorbers the reported a21/a40 inherit O(r^2)
    // contamination from the true sixth-order content of the gap.
    const NCOLS: usize = 12;
    let monomials = |x: f64, h: f64| -> [f64; NCOLS] {
        [
            h * h,
            x.powi(4),
            x * x * h,
            x.powi(3),
            x * x * h * h,
            x * h * h,
            h.powi(3),
            x.powi(3) * h,
            x * h.powi(3),
            h.powi(4),
            x.powi(6),
            x.powi(4) * h,
        ]
    };

    let mut rows = Vec::with_capacity(xs.len() * hs.len());
    let mut rhs = Vec::with_capacity(rows.capacity());
    for &x in &xs {
        for &h in &hs {
            let gap = rate_gap(m, x, sigma2 + h)?;
            rows.push(monomials(x, h));
            rhs.push(gap);
        }
    }

    let nrows = rows.len();
    let mut scale = [0.0f64; NCOLS];
    for row in &rows {
        for (s, v) in scale.iter_mut().zip(row) {
            *s = s.max(v.abs());
        }
    }
    for s in scale.iter_mut() {
        if *s == 0.0 {
            *s = 1.0;
        }
    }
    let a = nalgebra::DMatrix::from_fn(nrows, NCOLS, |i, j| rows[i][j] / scale[j]);
    let b = nalgebra::DVector::from_row_slice(&rhs);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = smax / smin.max(1e-300);
    let beta_scaled = svd
        .solve(&b, 1e-14 * smax)
        .map_err(|e| Error::NoConvergence {
            what: format!("expansion least squares: {e}"),
            residual: f64::NAN,
            iterations: 0,
        })?;
    let beta: Vec<f64> = beta_scaled
        .iter()
        .zip(&scale)
        .map(|(b, s)| b / s)
        .collect();
    let residual_rms = ((&a * &beta_scaled - &b).norm_squared() / nrows as f64).sqrt();
    Ok(ExpansionFit {
        a02: beta[0],
        a40: beta[1],
        a21: beta[2],
        a30: beta[3],
        residual_rms,
        condition,
        radius,
    })
}

/// Finite-difference derivative identities of the rate function at the
/// concentration point, with Richardson extrapolation and a disagreement
/// estimate between the two extrapolation levels.
#[derive(Debug, Clone, Copy)]
pub struct DerivativeReport {
    /// Dual maximizer at `(0, sigma^2)`; equals `∇I` there and should vanish.
    pub grad_at_min: (f64, f64),
    /// FD `∂²I/∂x²(0, sigma^2)`; expected `1/sigma^2`.
    pub d2_xx: f64,
    /// FD `∂²I/∂y²(0, sigma^2)`; expected `1/(mu4 - sigma^4)`.
    pub d2_yy: f64,
    /// FD mixed second derivative; expected `0`.
    pub d2_xy: f64,
    /// FD `∂³I/∂x²∂y(0, sigma^2)`; expected `-1/sigma^4`.
    pub d3_x2y: f64,
    /// FD `∂⁴I/∂x⁴(0, sigma^2)`; expected `2 mu4 / sigma^8`.
    pub d4_x4: f64,
    pub d3_spread: f64,
    pub d4_spread: f64,
    pub expected_d2: (f64, f64),
    pub expected_d3: f64,
    pub expected_d4: f64,
}

fn richardson<F: Fn(f64) -> Result<f64>>(f: F, h0: f64) -> Result<(f64, f64)> {
    // Central differences have O(h^2) error: R(h) = (4 F(h/2) - F(h)) / 3
    // cancels it; the spread between the two levels estimates what is left.
    let f0 = f(h0)?;
    let f1 = f(h0 / 2.0)?;
    let f2 = f(h0 / 4.0)?;
    let r1 = (4.0 * f1 - f0) / 3.0;
    let r2 = (4.0 * f2 - f1) / 3.0;
    Ok((r2, (r2 - r1).abs()))
}

/// Check `∇I = 0`, the diagonal `D²I`, and the third/fourth derivatives that
/// drive the quartic expansion, all at `(0, sigma^2)`.
pub fn derivative_report(m: &SourceMeasure) -> Result<DerivativeReport> {
    let sigma2 = m.variance();
    if m.degenerate_pair() {
        return Err(Error::InvalidArgument(
            "derivative identities need a nondegenerate pair law".into(),
        ));
    }
    let sigma = sigma2.sqrt();
    let tol = 1e-13;
    let rate = |x: f64, y: f64| -> Result<f64> { Ok(solve_dual(m, x, y, tol)?.value) };

    let at_min = solve_dual(m, 0.0, sigma2, tol)?;
    let grad_at_min = at_min.maximizer.unwrap_or((f64::NAN, f64::NAN));
    let i0 = at_min.value;

    let (d2_xx, _) = richardson(
        |h| {
            let h = h * sigma;
            Ok((rate(h, sigma2)? - 2.0 * i0 + rate(-h, sigma2)?) / (h * h))
        },
        0.04,
    )?;
    let (d2_yy, _) = richardson(
        |h| {
            let k = h * sigma2;
            Ok((rate(0.0, sigma2 + k)? - 2.0 * i0 + rate(0.0, sigma2 - k)?) / (k * k))
        },
        0.04,
    )?;
    let (d2_xy, _) = richardson(
        |h| {
            let hx = h * sigma;
            let hy = h * sigma2;
            Ok(
                (rate(hx, sigma2 + hy)? - rate(hx, sigma2 - hy)? - rate(-hx, sigma2 + hy)?
                    + rate(-hx, sigma2 - hy)?)
                    / (4.0 * hx * hy),
            )
        },
        0.04,
    )?;
    let (d3_x2y, d3_spread) = richardson(
        |h| {
            let hx = h * sigma;
            let hy = h * sigma2;
            let d2 = |y: f64| -> Result<f64> {
                Ok((rate(hx, y)? - 2.0 * rate(0.0, y)? + rate(-hx, y)?) / (hx * hx))
            };
            Ok((d2(sigma2 + hy)? - d2(sigma2 - hy)?) / (2.0 * hy))
        },
        0.08,
    )?;
    let (d4_x4, d4_spread) = richardson(
        |h| {
            let hx = h * sigma;
            Ok(
                (rate(2.0 * hx, sigma2)? - 4.0 * rate(hx, sigma2)? + 6.0 * i0
                    - 4.0 * rate(-hx, sigma2)?
                    + rate(-2.0 * hx, sigma2)?)
                    / hx.powi(4),
            )
        },
        0.12,
    )?;
    // Step-size failure: the two extrapolation levels must agree, otherwise
    // the stencil sits in the wrong regime (too coarse or drowned in noise).
    if d3_spread > 0.01 * d3_x2y.abs() + 1e-6 || d4_spread > 0.01 * d4_x4.abs() + 1e-6 {
        return Err(Error::NoConvergence {
            what: format!(
                "finite-difference step sizes: extrapolation levels disagree (d3 spread {d3_spread:.2e}, d4 spread {d4_spread:.2e})"
            ),
            residual: d3_spread.max(d4_spread),
            iterations: 0,
        });
    }

    let mu4 = m.mu4();
    Ok(DerivativeReport {
        grad_at_min,
        d2_xx,
        d2_yy,
        d2_xy,
        d3_x2y,
        d4_x4,
        d3_spread,
        d4_spread,
        expected_d2: (1.0 / sigma2, 1.0 / (mu4 - sigma2 * sigma2)),
        expected_d3: -1.0 / (sigma2 * sigma2),
        expected_d4: 2.0 * mu4 / sigma2.powi(4),
    })
}
