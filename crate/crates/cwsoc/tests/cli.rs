//! End-to-end tests of the `cwsoc` binary: determinism of artifacts, manifest
//! round-trips, aggregation, and error reporting.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cwsoc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cwsoc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn identical_config_and_seed_give_byte_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    for out in [&out1, &out2] {
        let o = cwsoc(&[
            "sample",
            "--kind",
            "bernoulli",
            "--n",
            "64",
            "--sweeps",
            "12000",
            "--burn-in",
            "500",
            "--thin",
            "2",
            "--chains",
            "2",
            "--seed",
            "31",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = read(&out1.join("samples.csv"));
    let b = read(&out2.join("samples.csv"));
    assert_eq!(a, b);
    assert!(a.starts_with("S_n,T_n\n"));
    // 17 significant digits, scientific.
    let first = a.lines().nth(1).unwrap();
    assert!(first.contains('e'), "row: {first}");
}

#[test]
fn different_seed_changes_the_data() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    for (out, seed) in [(&out1, "31"), (&out2, "32")] {
        let o = cwsoc(&[
            "sample", "--kind", "bernoulli", "--n", "64", "--sweeps", "12000", "--burn-in",
            "500", "--seed", seed, "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    assert_ne!(read(&out1.join("samples.csv")), read(&out2.join("samples.csv")));
}

#[test]
fn manifest_round_trip_reproduces_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("first");
    let o = cwsoc(&[
        "fluctuation-test",
        "--kind",
        "gaussian",
        "--n",
        "2000",
        "--samples",
        "5000",
        "--sampler",
        "exact",
        "--seed",
        "5",
        "--out",
        out1.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = out1.join("manifest.txt");
    assert!(manifest.is_file());

    let out2 = dir.path().join("second");
    let o = cwsoc(&[
        "fluctuation-test",
        "--config",
        manifest.to_str().unwrap(),
        "--out",
        out2.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        read(&out1.join("fluctuation.csv")),
        read(&out2.join("fluctuation.csv"))
    );
}

#[test]
fn check_expansion_reports_the_quartic_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("exp");
    let o = cwsoc(&[
        "check-expansion",
        "--kind",
        "gaussian",
        "--sigma2",
        "1.0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = read(&out.join("summary.txt"));
    assert!(summary.contains("a40"), "{summary}");
    assert!(summary.contains("overall: PASS"), "{summary}");
    // a40 = 0.25 within 2% for the standard Gaussian.
    let csv = read(&out.join("expansion.csv"));
    let row = csv.lines().nth(1).unwrap();
    let a40: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((a40 / 0.25 - 1.0).abs() < 0.02, "a40 = {a40}");
}

#[test]
fn report_aggregates_runs_and_errors_when_empty() {
    let dir = tempfile::tempdir().unwrap();
    // Empty state: named error, nonzero exit.
    let o = cwsoc(&["report", "--out", dir.path().to_str().unwrap()]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("no artifacts found"), "{err}");

    // Two runs, then an aggregate.
    for (name, cmd) in [("lam", "lambda-eval"), ("cram", "cramer-eval")] {
        let out = dir.path().join(name);
        let o = cwsoc(&[
            cmd,
            "--kind",
            "gaussian",
            "--u",
            "0.5",
            "--v",
            "-1.0",
            "--x",
            "0.2",
            "--y",
            "1.1",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let o = cwsoc(&["report", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("overall: PASS"), "{text}");
}

#[test]
fn lambda_eval_emits_the_moment_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lam");
    let o = cwsoc(&[
        "lambda-eval",
        "--kind",
        "bernoulli",
        "--c",
        "1.0",
        "--u",
        "1.0",
        "--v",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = read(&out.join("lambda.csv"));
    assert!(csv.starts_with("u,v,lambda,f1,f2,f3,f4\n"));
    let row: Vec<f64> = csv
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    // Lambda(1, 0.5) = 0.5 + ln cosh 1 for the unit two-point measure.
    let want = 0.5 + 1f64.cosh().ln();
    assert!((row[2] - want).abs() < 1e-12, "lambda = {}", row[2]);
    // f2 = c^2 = 1 identically.
    assert!((row[4] - 1.0).abs() < 1e-14);
}

#[test]
fn invalid_input_yields_exit_code_two_and_names_the_subsystem() {
    let dir = tempfile::tempdir().unwrap();
    let o = cwsoc(&[
        "cramer-eval",
        "--kind",
        "gaussian",
        "--x",
        "2.0",
        "--y",
        "1.0", // x^2 >= y: domain violation
        "--out",
        dir.path().join("z").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("cramer-eval failed"), "{err}");
    assert!(err.contains("domain violation"), "{err}");

    let o = cwsoc(&["sample", "--kind", "cauchy", "--out", dir.path().join("w").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown measure kind"));
}

#[test]
fn zn_estimate_small_ladder_passes_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("zn");
    let o = cwsoc(&[
        "zn-estimate",
        "--kind",
        "gaussian",
        "--n-ladder",
        "8,16",
        "--draws",
        "20000",
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    // Small n: the asymptote band check is not expected to pass, only the
    // bounds; exit may be 1 but artifacts must exist and bounds must hold.
    assert!(o.status.code() == Some(0) || o.status.code() == Some(1));
    let summary = read(&out.join("summary.txt"));
    assert!(summary.contains("check zn-bounds: PASS"), "{summary}");
    let csv = read(&out.join("zn.csv"));
    assert!(csv.starts_with("n,Z_n,std_err,ess,ratio\n"));
}

#[test]
fn theorem1_test_exact_ladder_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t1");
    let o = cwsoc(&[
        "theorem1-test",
        "--kind",
        "gaussian",
        "--n-ladder",
        "200,1000,5000",
        "--samples",
        "20000",
        "--sampler",
        "exact",
        "--seed",
        "12",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = read(&out.join("summary.txt"));
    assert!(summary.contains("check deviation-trend: PASS"), "{summary}");
    assert!(summary.contains("check final-deviation: PASS"), "{summary}");
    let csv = read(&out.join("theorem1.csv"));
    assert!(csv.starts_with("n,p_joint,p_joint_se,p_s,p_t,p_t_se\n"));
}

#[test]
fn mcmc_backed_tests_run_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    // Concentration ladder off the chain sampler.
    let out = dir.path().join("t1m");
    let o = cwsoc(&[
        "theorem1-test",
        "--kind",
        "uniform",
        "--n-ladder",
        "50,200",
        "--sampler",
        "mcmc",
        "--sweeps",
        "6000",
        "--burn-in",
        "500",
        "--thin",
        "2",
        "--conc-tol",
        "0.2",
        "--seed",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    // Small chains may or may not clear the final-deviation gate; the run
    // itself must succeed and produce the ladder artifact.
    assert!(o.status.code() == Some(0) || o.status.code() == Some(1));
    let csv = read(&out.join("theorem1.csv"));
    assert_eq!(csv.lines().count(), 3);

    // Fluctuation test off the chain sampler.
    let out = dir.path().join("flm");
    let o = cwsoc(&[
        "fluctuation-test",
        "--kind",
        "bernoulli",
        "--n",
        "200",
        "--sampler",
        "mcmc",
        "--sweeps",
        "20000",
        "--burn-in",
        "2000",
        "--thin",
        "10",
        "--ks-threshold",
        "0.1",
        "--seed",
        "6",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = read(&out.join("summary.txt"));
    assert!(summary.contains("[mcmc]"), "{summary}");
}
