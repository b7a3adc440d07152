//! Curie-Weiss self-organized criticality at desk scale.
//!
//! The model puts `n` real spins under the joint law
//!
//! ```text
//! dmu_n(x_1, ..., x_n) ∝ exp( S_n^2 / (2 T_n) ) · 1{T_n > 0} · prod_i drho(x_i),
//! S_n = x_1 + ... + x_n,   T_n = x_1^2 + ... + x_n^2,
//! ```
//!
//! for a symmetric source measure `rho`. Without any tunable temperature the
//! pair `(S_n/n, T_n/n)` concentrates at `(0, sigma^2)` and the sum fluctuates
//! at the anomalous order `n^{3/4}`, with limit density proportional to
//! `exp(-s^4/12)` after the normalization `mu_4^{1/4} S_n / (sigma^2 n^{3/4})`.
//!
//! The crate provides the numerical toolchain to verify this at finite `n`:
//!
//! * [`measure`] — the catalog of admissible source measures with exact
//!   moments, samplers and hypothesis checks;
//! * [`loglaplace`] — the bivariate log-Laplace transform `Lambda(u, v)` of
//!   `(Z, Z^2)` with gradient and Hessian via tilted moments;
//! * [`cramer`] — the rate function `I(x, y)` by Newton solves of the dual
//!   problem, closed-form oracles, the `I - F` gap and its quartic expansion;
//! * [`sampler`] — single-site Metropolis chains for the model measure,
//!   exact samplers for the Bernoulli and Gaussian cases, and an importance
//!   sampling estimator of the partition function `Z_n`;
//! * [`fluctuations`] — the quartic limit law, sample normalization,
//!   Kolmogorov-Smirnov comparisons and the local-CLT density;
//! * [`experiment`] — reproducible experiment runs behind the `cwsoc` CLI.

pub mod config;
pub mod cramer;
pub mod experiment;
pub mod fluctuations;
pub mod loglaplace;
pub mod measure;
pub mod quad;
pub mod sampler;
pub mod stats;

pub use cramer::{
    bernoulli_rate_oracle, derivative_report, expansion_coefficients, gaussian_rate_oracle,
    rate_at_origin, rate_gap, rate_gap_scan, solve_dual, CramerValue, DerivativeReport,
    ExpansionFit, GapReport,
};
pub use fluctuations::{
    concentration_test, fluctuation_test, local_clt_density, normalize_fluctuations,
    pair_density, pair_density_pnorm, ConcentrationReport, FluctuationReport, QuarticLaw,
};
pub use loglaplace::{log_laplace, tilted_moment, tilted_moments, DualPoint};
pub use measure::{HypothesisReport, IntegralEstimate, MeasureSpec, SourceMeasure};
pub use sampler::{
    bernoulli_sum_law, gaussian_exact_sample, importance_zn, mcmc_sample, model_log_weight,
    sample_iid, BernoulliSumLaw, ChainDiagnostics, Configuration, McmcParams, ZnEstimate,
};

/// Library-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A measure specification failed validation.
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    /// An evaluation point violated a domain constraint; names the constraint.
    #[error("domain violation: {0}")]
    Domain(String),
    /// An iterative routine ran out of iterations.
    #[error("no convergence: {what} (residual {residual:.3e} after {iterations} iterations)")]
    NoConvergence {
        what: String,
        residual: f64,
        iterations: usize,
    },
    /// The dual variables ran into their cap; the primal point is too close
    /// to the boundary of the admissible region.
    #[error("boundary proximity: dual iterate |(u,v)| exceeded {cap:.1e} at ({x}, {y})")]
    BoundaryProximity { x: f64, y: f64, cap: f64 },
    /// A quadrature did not stabilize within the panel budget.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    /// Invalid argument outside measure/domain issues.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Configuration file / CLI parse problem.
    #[error("config error: {0}")]
    Config(String),
    /// Experiment I/O error.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
