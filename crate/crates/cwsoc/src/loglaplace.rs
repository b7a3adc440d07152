//! The bivariate log-Laplace transform of the pair law.
//!
//! For `Z ~ rho` let `nu` be the law of `(Z, Z^2)`. Its log-Laplace transform
//!
//! ```text
//! Lambda(u, v) = ln ∫ exp(u z + v z^2) drho(z)
//! ```
//!
//! is finite on `R x (-inf, v_sup)` and smooth in the interior. Gradient and
//! Hessian are assembled from the tilted moments
//! `f_j(u, v) = ∫ z^j e^{uz+vz^2} drho / ∫ e^{uz+vz^2} drho`:
//!
//! ```text
//! ∇Lambda = (f_1, f_2),
//! D²Lambda = [ f_2 - f_1²     f_3 - f_1 f_2 ]
//!            [ f_3 - f_1 f_2  f_4 - f_2²    ].
//! ```
//!
//! All integrals run in shifted log-space so the exponential tilt never
//! overflows: atoms go through log-sum-exp, densities through peak-shifted
//! adaptive quadrature.

use crate::measure::{rule, MeasureKind, SourceMeasure, QUAD_REL_TOL};
use crate::quad;
use crate::{Error, Result};

/// Points scanned when locating the integrand peak for the log-space shift.
const SHIFT_SCAN: usize = 512;

/// A dual point `(u, v)` with the transform and its first two derivatives.
#[derive(Debug, Clone, Copy)]
pub struct DualPoint {
    pub u: f64,
    pub v: f64,
    /// `Lambda(u, v)`.
    pub lambda: f64,
    /// `(f_1, f_2) = ∇Lambda(u, v)`.
    pub grad: [f64; 2],
    /// `D²Lambda(u, v)`, symmetric positive definite in the interior.
    pub hessian: [[f64; 2]; 2],
}

impl DualPoint {
    pub fn hessian_det(&self) -> f64 {
        self.hessian[0][0] * self.hessian[1][1] - self.hessian[0][1] * self.hessian[1][0]
    }
}

fn check_domain(m: &SourceMeasure, v: f64) -> Result<()> {
    if v < m.v_sup() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "tilt v = {v} is not below the admissible supremum v_sup = {}",
            m.v_sup()
        )))
    }
}

/// `Lambda(u, v)` together with the tilted moments `f_0 ..= f_jmax`.
pub(crate) fn lambda_and_moments(
    m: &SourceMeasure,
    u: f64,
    v: f64,
    jmax: usize,
) -> Result<(f64, Vec<f64>)> {
    check_domain(m, v)?;

    if let Some(atoms) = m.atoms() {
        let logs: Vec<f64> = atoms
            .iter()
            .map(|(z, w)| w.ln() + u * z + v * z * z)
            .collect();
        let shift = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sums = vec![0.0; jmax + 1];
        for ((z, _), lg) in atoms.iter().zip(&logs) {
            let e = (lg - shift).exp();
            let mut zj = 1.0;
            for s in sums.iter_mut() {
                *s += e * zj;
                zj *= z;
            }
        }
        let lambda = shift + sums[0].ln();
        let moments = sums.iter().map(|s| s / sums[0]).collect();
        return Ok((lambda, moments));
    }

    if let MeasureKind::ZeroInflated { atom, base } = m.kind() {
        // Continuous base plus an atom at zero: the atom contributes only to
        // the zeroth moment.
        let (lb, fb) = lambda_and_moments(base, u, v, jmax)?;
        let lambda = quad::log_sum_exp(&[atom.ln(), (1.0 - atom).ln() + lb]);
        let cont_weight = ((1.0 - atom).ln() + lb - lambda).exp();
        let mut moments = vec![1.0; jmax + 1];
        for j in 1..=jmax {
            moments[j] = cont_weight * fb[j];
        }
        return Ok((lambda, moments));
    }

    let (a, b) = m.tilt_interval(u, v);
    let g = |z: f64| m.log_density(z).expect("density kind") + (u + v * z) * z;
    let mut shift = f64::NEG_INFINITY;
    for i in 0..=SHIFT_SCAN {
        let z = a + (b - a) * i as f64 / SHIFT_SCAN as f64;
        shift = shift.max(g(z));
    }
    if !shift.is_finite() {
        return Err(Error::Quadrature(
            "tilted integrand vanishes on the whole window".into(),
        ));
    }
    let (sums, ok, panels) = quad::adaptive_moments(rule(), a, b, jmax, shift, QUAD_REL_TOL, g);
    if !ok {
        return Err(Error::Quadrature(format!(
            "tilted moments at (u, v) = ({u}, {v}) not stable after {panels} panels"
        )));
    }
    let lambda = shift + sums[0].ln();
    let moments = sums.iter().map(|s| s / sums[0]).collect();
    Ok((lambda, moments))
}

/// The tilted moment `f_j(u, v)`; `f_0 = 1`, `f_1 = ∂Lambda/∂u`,
/// `f_2 = ∂Lambda/∂v`, and `f_j(0, 0)` is the `j`-th moment of `rho`.
pub fn tilted_moment(m: &SourceMeasure, j: usize, u: f64, v: f64) -> Result<f64> {
    let (_, moments) = lambda_and_moments(m, u, v, j)?;
    Ok(moments[j])
}

/// `Lambda(u, v)` together with all tilted moments up to `jmax` in one pass.
pub fn tilted_moments(m: &SourceMeasure, u: f64, v: f64, jmax: usize) -> Result<(f64, Vec<f64>)> {
    lambda_and_moments(m, u, v, jmax)
}

/// Evaluate `Lambda`, `∇Lambda` and `D²Lambda` at `(u, v)`.
pub fn log_laplace(m: &SourceMeasure, u: f64, v: f64) -> Result<DualPoint> {
    let (lambda, f) = lambda_and_moments(m, u, v, 4)?;
    let h11 = f[2] - f[1] * f[1];
    let h12 = f[3] - f[1] * f[2];
    let h22 = f[4] - f[2] * f[2];
    Ok(DualPoint {
        u,
        v,
        lambda,
        grad: [f[1], f[2]],
        hessian: [[h11, h12], [h12, h22]],
    })
}
