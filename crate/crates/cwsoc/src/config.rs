//! Flat key-value experiment configuration.
//!
//! Config files are `key = value` lines with `#` comments; manifests emitted
//! by runs are themselves valid config files, so any run can be reproduced
//! from its manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::measure::MeasureSpec;
use crate::{Error, Result};

/// Everything a run needs; the seed fully determines stochastic output.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub measure: MeasureSpec,
    /// Site count for single-`n` commands.
    pub n: usize,
    /// Strictly increasing ladder for trend commands.
    pub n_ladder: Vec<usize>,
    pub sweeps: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub chains: usize,
    pub seed: u64,
    pub out: PathBuf,
    /// Importance-sampling draws per ladder point.
    pub draws: usize,
    /// Exact-sampler draw count.
    pub samples: usize,
    /// Concentration tolerance for `theorem1-test`.
    pub conc_tol: f64,
    /// KS level for critical values.
    pub ks_level: f64,
    /// Absolute KS pass threshold for fluctuation tests.
    pub ks_threshold: f64,
    /// Grid points per axis for scans.
    pub grid: usize,
    /// Expansion stencil radius (dimensionless).
    pub radius: f64,
    /// Sample source for the statistical tests: "exact" or "mcmc".
    pub sampler: String,
    /// Evaluation point for `lambda-eval` / `cramer-eval` when `grid = 0`.
    pub u: f64,
    pub v: f64,
    pub x: f64,
    pub y: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            measure: MeasureSpec::default(),
            n: 1000,
            n_ladder: vec![200, 1000, 5000],
            sweeps: 50_000,
            burn_in: 5_000,
            thin: 5,
            chains: 1,
            seed: 1,
            out: PathBuf::from("out"),
            draws: 1_000_000,
            samples: 100_000,
            conc_tol: 0.1,
            ks_level: 0.01,
            ks_threshold: 0.05,
            grid: 0,
            radius: 0.1,
            sampler: "exact".into(),
            u: 0.0,
            v: 0.0,
            x: 0.0,
            y: 1.0,
        }
    }
}

/// Parse `key = value` lines; later keys override earlier ones.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected 'key = value', got '{raw}'",
                lineno + 1
            )));
        };
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("key '{key}': cannot parse '{value}'")))
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(&std::fs::read_to_string(path)?)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        self.apply_kv(&parse_kv(text)?)
    }

    pub fn apply_kv(&mut self, map: &BTreeMap<String, String>) -> Result<()> {
        for (k, v) in map {
            match k.as_str() {
                "kind" => self.measure.kind = v.clone(),
                "sigma2" => self.measure.sigma2 = parse(k, v)?,
                "c" => self.measure.c = parse(k, v)?,
                "a" => self.measure.a = parse(k, v)?,
                "atom0" => self.measure.atom0 = parse(k, v)?,
                "v0" => {
                    self.measure.v0 = if v == "none" { None } else { Some(parse(k, v)?) }
                }
                "n" => self.n = parse(k, v)?,
                "n_ladder" => {
                    let mut ladder = Vec::new();
                    for part in v.split(',') {
                        ladder.push(parse(k, part.trim())?);
                    }
                    self.n_ladder = ladder;
                }
                "sweeps" => self.sweeps = parse(k, v)?,
                "burn_in" => self.burn_in = parse(k, v)?,
                "thin" => self.thin = parse(k, v)?,
                "chains" => self.chains = parse(k, v)?,
                "seed" => self.seed = parse(k, v)?,
                "out" => self.out = PathBuf::from(v),
                "draws" => self.draws = parse(k, v)?,
                "samples" => self.samples = parse(k, v)?,
                "conc_tol" => self.conc_tol = parse(k, v)?,
                "ks_level" => self.ks_level = parse(k, v)?,
                "ks_threshold" => self.ks_threshold = parse(k, v)?,
                "grid" => self.grid = parse(k, v)?,
                "radius" => self.radius = parse(k, v)?,
                "sampler" => self.sampler = v.clone(),
                "u" => self.u = parse(k, v)?,
                "v" => self.v = parse(k, v)?,
                "x" => self.x = parse(k, v)?,
                "y" => self.y = parse(k, v)?,
                "command" | "version" => {} // manifest echo keys
                other => {
                    return Err(Error::Config(format!("unknown config key '{other}'")));
                }
            }
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.n_ladder.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config(
                "n_ladder must be strictly increasing".into(),
            ));
        }
        if self.n_ladder.is_empty() {
            return Err(Error::Config("n_ladder must not be empty".into()));
        }
        if self.thin == 0 || self.chains == 0 {
            return Err(Error::Config("thin and chains must be at least 1".into()));
        }
        if !(self.ks_level > 0.0 && self.ks_level < 1.0) {
            return Err(Error::Config("ks_level must lie in (0, 1)".into()));
        }
        match self.sampler.as_str() {
            "exact" | "mcmc" => {}
            other => {
                return Err(Error::Config(format!(
                    "sampler must be 'exact' or 'mcmc', got '{other}'"
                )))
            }
        }
        Ok(())
    }

    /// Manifest text: a valid config file echoing every effective key.
    pub fn manifest(&self, command: &str) -> String {
        let ladder: Vec<String> = self.n_ladder.iter().map(|n| n.to_string()).collect();
        format!(
            "# cwsoc run manifest (re-runnable as --config)\n\
             command = {command}\n\
             version = {version}\n\
             kind = {kind}\n\
             sigma2 = {sigma2}\n\
             c = {c}\n\
             a = {a}\n\
             atom0 = {atom0}\n\
             v0 = {v0}\n\
             n = {n}\n\
             n_ladder = {ladder}\n\
             sweeps = {sweeps}\n\
             burn_in = {burn_in}\n\
             thin = {thin}\n\
             chains = {chains}\n\
             seed = {seed}\n\
             draws = {draws}\n\
             samples = {samples}\n\
             conc_tol = {conc_tol}\n\
             ks_level = {ks_level}\n\
             ks_threshold = {ks_threshold}\n\
             grid = {grid}\n\
             radius = {radius}\n\
             sampler = {sampler}\n\
             u = {u}\n\
             v = {v}\n\
             x = {x}\n\
             y = {y}\n",
            command = command,
            version = env!("CARGO_PKG_VERSION"),
            kind = self.measure.kind,
            sigma2 = self.measure.sigma2,
            c = self.measure.c,
            a = self.measure.a,
            atom0 = self.measure.atom0,
            v0 = self
                .measure
                .v0
                .map(|v| v.to_string())
                .unwrap_or_else(|| "none".into()),
            n = self.n,
            ladder = ladder.join(","),
            sweeps = self.sweeps,
            burn_in = self.burn_in,
            thin = self.thin,
            chains = self.chains,
            seed = self.seed,
            draws = self.draws,
            samples = self.samples,
            conc_tol = self.conc_tol,
            ks_level = self.ks_level,
            ks_threshold = self.ks_threshold,
            grid = self.grid,
            radius = self.radius,
            sampler = self.sampler,
            u = self.u,
            v = self.v,
            x = self.x,
            y = self.y,
        )
    }
}
