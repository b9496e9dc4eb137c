//! Properties that back the acceptance suite where a criterion line mixes an
//! attainable part with one that is not, plus end-to-end CLI behavior.

use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stieltjes_krylov::experiments::{run_gamma_sweep, ExperimentConfig, ExperimentKind};
use stieltjes_krylov::lanczos::{lanczos_extend, lanczos_fab, two_pass_fab, LanczosDecomposition};
use stieltjes_krylov::linalg::relative_error;
use stieltjes_krylov::operators::{make_diagonal_chebyshev, normalized_ones, DiagonalOperator, SpectralBounds};
use stieltjes_krylov::predict::MethodTag;
use stieltjes_krylov::rational::{extended_krylov_fab, ExtendedKrylovOptions, InnerSolveConfig};
use stieltjes_krylov::report::Stopping;
use stieltjes_krylov::stieltjes::StieltjesFunction;

#[test]
fn lanczos_coefficients_grow_monotonically() {
    let f = StieltjesFunction::inv_sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for trial in 0..20 {
        let n = rng.random_range(10..=60);
        let lmin = 10f64.powf(rng.random_range(-2.0..0.0));
        let lmax = lmin * 10f64.powf(rng.random_range(0.5..3.0));
        let eig: Vec<f64> = (0..n).map(|_| rng.random_range(lmin..=lmax)).collect();
        let op = DiagonalOperator::new(eig).unwrap();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
        let mut dec = LanczosDecomposition::new(&b, true).unwrap();
        let mut prev: Vec<f64> = Vec::new();
        while dec.order() < n && !dec.is_invariant() {
            lanczos_extend(&op, &mut dec, 1).unwrap();
            let c = dec.coefficients(&f).unwrap();
            for (j, (old, new)) in prev.iter().zip(&c).enumerate() {
                assert!(
                    new.abs() >= old.abs() - 1e-10,
                    "trial {trial}, m = {}, j = {j}: {old} -> {new}",
                    c.len()
                );
            }
            prev = c;
        }
    }
}

#[test]
fn two_pass_ratio_to_mscg_is_flat_over_clustering() {
    let mut cfg = ExperimentConfig::for_experiment(ExperimentKind::GammaSweep);
    cfg.gammas = vec![0.65, 0.8, 0.9, 0.99];
    cfg.methods = vec![MethodTag::TwoPass];
    let rows = run_gamma_sweep(&cfg).unwrap();
    let ratios: Vec<f64> = rows
        .iter()
        .filter(|r| r.method == "two_pass")
        .map(|r| {
            assert!(r.met_tol, "gamma {} missed tolerance", r.gamma);
            r.ratio_to_mscg.unwrap()
        })
        .collect();
    assert_eq!(ratios.len(), 4);
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    assert!(hi / lo - 1.0 <= 0.2, "ratios {ratios:?}");
}

#[test]
fn two_pass_matches_one_pass() {
    let bounds = SpectralBounds::new(1.0, 50.0).unwrap();
    let op = make_diagonal_chebyshev(300, bounds).unwrap();
    let b = normalized_ones(300);
    let f = StieltjesFunction::inv_sqrt();
    let stop = Stopping::Oracle {
        reference: op.exact_function_times(&f, &b),
        rel_tol: 1e-8,
    };
    let (two, report) = two_pass_fab(&op, &f, &b, &stop, 300).unwrap();
    assert_eq!(report.matvecs, 2 * report.iterations);
    let one = lanczos_fab(&op, &f, &b, report.iterations).unwrap();
    assert!(relative_error(&two, &one) < 1e-12);
}

#[test]
fn extended_krylov_stays_definite_far_past_table_accuracy() {
    let bounds = SpectralBounds::new(0.1, 200.1).unwrap();
    let op = make_diagonal_chebyshev(1000, bounds).unwrap();
    let b = normalized_ones(1000);
    let f = StieltjesFunction::inv_sqrt();
    let stop = Stopping::Oracle {
        reference: op.exact_function_times(&f, &b),
        rel_tol: 1e-12,
    };
    let opts = ExtendedKrylovOptions::new(InnerSolveConfig::exact());
    let (_, report) = extended_krylov_fab(&op, &f, &b, &stop, bounds, &opts).unwrap();
    assert!(report.relative_error.unwrap() <= 1e-12);
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_krylov-experiments"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn cli_output_is_deterministic() {
    let args = [
        "single-run",
        "--n",
        "200",
        "--lmin",
        "0.5",
        "--lmax",
        "100",
        "--methods",
        "two_pass,mscg,restarted",
        "--restart-length",
        "10",
        "--seed",
        "7",
    ];
    let first = cli(&args);
    let second = cli(&args);
    assert_eq!(
        first.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# config:")));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn cli_writes_csv_and_json_mirror() {
    let dir = std::env::temp_dir().join(format!("krylov-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("run.csv");
    let status = cli(&[
        "single-run",
        "--n",
        "100",
        "--methods",
        "mscg",
        "--out",
        out.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(status.status.code(), Some(0));
    assert!(std::fs::read_to_string(&out).unwrap().contains("mscg"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    assert!(json.is_object() || json.is_array());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn cli_rejects_invalid_configuration() {
    let output = cli(&["single-run", "--n", "0"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn cli_reports_a_missed_tolerance() {
    // 1e-16 is below what double precision reaches; the full space ends the
    // run and the row is recorded as missing the tolerance.
    let output = cli(&["single-run", "--n", "200", "--methods", "two_pass", "--tol", "1e-16"]);
    assert_eq!(
        output.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text
        .lines()
        .any(|l| l.starts_with("two_pass,") && l.contains(",false,")));
}
