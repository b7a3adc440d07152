//! `cwsoc` command line: reproducible experiment runs for the self-organized
//! Curie-Weiss model. Exit status is 0 when every requested check passes,
//! 1 when a check fails, 2 on errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cwsoc::config::ExperimentConfig;
use cwsoc::experiment::{run, Command};

#[derive(Parser)]
#[command(
    name = "cwsoc",
    about = "Curie-Weiss self-organized criticality experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Config file (flat key = value lines); CLI flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// RNG seed; fully determines all stochastic output.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for manifest, CSV data and summary.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Measure kind: gaussian | bernoulli | uniform.
    #[arg(long, global = true)]
    kind: Option<String>,

    /// Gaussian variance.
    #[arg(long, global = true, allow_negative_numbers = true)]
    sigma2: Option<f64>,

    /// Two-point scale.
    #[arg(long, global = true, allow_negative_numbers = true)]
    c: Option<f64>,

    /// Uniform half-width.
    #[arg(long, global = true, allow_negative_numbers = true)]
    a: Option<f64>,

    /// Extra atom at zero.
    #[arg(long, global = true, allow_negative_numbers = true)]
    atom0: Option<f64>,

    /// Tilt-supremum override (trust bound).
    #[arg(long, global = true, allow_negative_numbers = true)]
    v0: Option<f64>,

    /// Site count.
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Comma-separated strictly increasing site-count ladder.
    #[arg(long, global = true)]
    n_ladder: Option<String>,

    #[arg(long, global = true)]
    sweeps: Option<usize>,

    #[arg(long, global = true)]
    burn_in: Option<usize>,

    #[arg(long, global = true)]
    thin: Option<usize>,

    #[arg(long, global = true)]
    chains: Option<usize>,

    /// Importance-sampling draws per ladder point.
    #[arg(long, global = true)]
    draws: Option<usize>,

    /// Exact-sampler draw count.
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Sample source for statistical tests: exact | mcmc.
    #[arg(long, global = true)]
    sampler: Option<String>,

    /// Grid points per axis (0 = single point for eval commands).
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Expansion stencil radius.
    #[arg(long, global = true, allow_negative_numbers = true)]
    radius: Option<f64>,

    /// Concentration tolerance.
    #[arg(long, global = true, allow_negative_numbers = true)]
    conc_tol: Option<f64>,

    /// KS level for critical values.
    #[arg(long, global = true, allow_negative_numbers = true)]
    ks_level: Option<f64>,

    /// Absolute KS pass threshold.
    #[arg(long, global = true, allow_negative_numbers = true)]
    ks_threshold: Option<f64>,

    /// Dual point for lambda-eval.
    #[arg(long, global = true, allow_negative_numbers = true)]
    u: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    v: Option<f64>,

    /// Primal point for cramer-eval.
    #[arg(long, global = true, allow_negative_numbers = true)]
    x: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    y: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run Metropolis chains and persist (S_n, T_n) samples.
    Sample,
    /// Evaluate the log-Laplace transform and tilted moments.
    #[command(name = "lambda-eval")]
    LambdaEval,
    /// Evaluate the rate function I(x, y) at a point or grid.
    #[command(name = "cramer-eval")]
    CramerEval,
    /// Scan the gap I - F over the admissible region.
    #[command(name = "check-inequality")]
    CheckInequality,
    /// Fit the quartic expansion of I - F and check derivative identities.
    #[command(name = "check-expansion")]
    CheckExpansion,
    /// Concentration of (S_n/n, T_n/n) over an n-ladder.
    #[command(name = "theorem1-test")]
    Theorem1Test,
    /// Compare normalized fluctuations against the quartic law.
    #[command(name = "fluctuation-test")]
    FluctuationTest,
    /// Importance-sampling estimates of the partition function.
    #[command(name = "zn-estimate")]
    ZnEstimate,
    /// Aggregate pass/fail over previous runs in the output directory.
    Report,
}

impl Cmd {
    fn command(&self) -> Command {
        match self {
            Cmd::Sample => Command::Sample,
            Cmd::LambdaEval => Command::LambdaEval,
            Cmd::CramerEval => Command::CramerEval,
            Cmd::CheckInequality => Command::CheckInequality,
            Cmd::CheckExpansion => Command::CheckExpansion,
            Cmd::Theorem1Test => Command::Theorem1Test,
            Cmd::FluctuationTest => Command::FluctuationTest,
            Cmd::ZnEstimate => Command::ZnEstimate,
            Cmd::Report => Command::Report,
        }
    }
}

fn build_config(cli: &Cli) -> cwsoc::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    let mut overrides = std::collections::BTreeMap::new();
    let mut put = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            overrides.insert(k.to_string(), v);
        }
    };
    put("seed", cli.seed.map(|v| v.to_string()));
    put("kind", cli.kind.clone());
    put("sigma2", cli.sigma2.map(|v| v.to_string()));
    put("c", cli.c.map(|v| v.to_string()));
    put("a", cli.a.map(|v| v.to_string()));
    put("atom0", cli.atom0.map(|v| v.to_string()));
    put("v0", cli.v0.map(|v| v.to_string()));
    put("n", cli.n.map(|v| v.to_string()));
    put("n_ladder", cli.n_ladder.clone());
    put("sweeps", cli.sweeps.map(|v| v.to_string()));
    put("burn_in", cli.burn_in.map(|v| v.to_string()));
    put("thin", cli.thin.map(|v| v.to_string()));
    put("chains", cli.chains.map(|v| v.to_string()));
    put("draws", cli.draws.map(|v| v.to_string()));
    put("samples", cli.samples.map(|v| v.to_string()));
    put("sampler", cli.sampler.clone());
    put("grid", cli.grid.map(|v| v.to_string()));
    put("radius", cli.radius.map(|v| v.to_string()));
    put("conc_tol", cli.conc_tol.map(|v| v.to_string()));
    put("ks_level", cli.ks_level.map(|v| v.to_string()));
    put("ks_threshold", cli.ks_threshold.map(|v| v.to_string()));
    put("u", cli.u.map(|v| v.to_string()));
    put("v", cli.v.map(|v| v.to_string()));
    put("x", cli.x.map(|v| v.to_string()));
    put("y", cli.y.map(|v| v.to_string()));
    cfg.apply_kv(&overrides)?;
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = cli.command.command();
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("cwsoc: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg, command) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("cwsoc: {} failed: {e}", command.name());
            ExitCode::from(2)
        }
    }
}
