//! Experiment drivers behind the `krylov-experiments` binary.
//!
//! Each driver returns typed rows; [`ExperimentOutput`] renders them as CSV
//! with `#`-prefixed metadata, or as JSON. Floats are printed in shortest
//! round-trip form, so identical configurations give identical bytes.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{KrylovError, Result};
use crate::lanczos::two_pass_fab;
use crate::linalg::{norm2, relative_error};
use crate::mscg::{min_poles_for_tolerance, mscg_fab, rational_approximation, MscgOptions};
use crate::operators::{
    make_diagonal_chebyshev, make_diagonal_clustered, normalized_ones, DiagonalOperator, SpectralBounds,
};
use crate::predict::{
    mscg_deflation_schedule, perturbed_rate, predict_total_matvecs, work_units, MethodTag, PredictionParams, WorkCounts,
};
use crate::rational::{
    extended_inner_schedule, extended_krylov_fab, inner_tolerance_schedule, optimal_shift, si_lanczos_fab,
    ExtendedKrylovOptions, SiOptions,
};
use crate::report::{MethodReport, Stopping};
use crate::restarted::restarted_lanczos_fab;
use crate::stieltjes::StieltjesFunction;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

const MAX_LANCZOS_STEPS: usize = 100_000;
const MAX_RESTART_CYCLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Table2,
    GammaSweep,
    WorkUnits,
    PerturbedRate,
    SingleRun,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Table2 => "table2",
            ExperimentKind::GammaSweep => "gamma_sweep",
            ExperimentKind::WorkUnits => "work_units",
            ExperimentKind::PerturbedRate => "perturbed_rate",
            ExperimentKind::SingleRun => "single_run",
        }
    }
}

/// How measured runs decide to stop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StoppingMode {
    /// True error against the diagonal oracle.
    Oracle,
    /// The methods' own error estimates.
    Estimate,
}

/// Everything a driver needs; `Default` is the reference instance: N = 1000
/// Chebyshev points on `[0.1, 200.1]`, `f = z^{-1/2}`, tol `1e-6`.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub bounds: SpectralBounds,
    #[serde(serialize_with = "serialize_function")]
    pub function: StieltjesFunction,
    /// Relative target accuracy.
    pub tol: f64,
    pub methods: Vec<MethodTag>,
    pub restart_length: usize,
    /// Fixed pole count for multi-shift CG; `None` picks the minimum for `tol`.
    pub poles: Option<usize>,
    pub gammas: Vec<f64>,
    /// Matvec costs `M` in units of one vector update.
    pub matvec_costs: Vec<f64>,
    /// Relative accuracies scanned by the work-unit experiment.
    pub accuracies: Vec<f64>,
    /// Perturbation sizes scanned by the perturbed-rate experiment.
    pub perturbations: Vec<f64>,
    pub stopping: StoppingMode,
    /// Random unit `b` from this seed; `None` is the normalized ones vector.
    pub seed: Option<u64>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub json: bool,
}

fn serialize_function<S: serde::Serializer>(f: &StieltjesFunction, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&f.tag())
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: ExperimentKind::Table2,
            n: 1000,
            bounds: SpectralBounds {
                lambda_min: 0.1,
                lambda_max: 200.1,
            },
            function: StieltjesFunction::inv_sqrt(),
            tol: 1e-6,
            methods: MethodTag::ALL.to_vec(),
            restart_length: 30,
            poles: Some(15),
            gammas: (65..=99).map(|i| i as f64 / 100.0).collect(),
            matvec_costs: vec![10.0, 14.0],
            accuracies: (2..=24).map(|k| 10f64.powf(-0.5 * k as f64)).collect(),
            perturbations: (0..=24).map(|k| 10f64.powf(-14.0 + 0.5 * k as f64)).collect(),
            stopping: StoppingMode::Oracle,
            seed: None,
            out: None,
            json: false,
        }
    }
}

impl ExperimentConfig {
    /// Defaults for `experiment`; the sweep leaves out the rational methods.
    pub fn for_experiment(experiment: ExperimentKind) -> Self {
        let mut cfg = ExperimentConfig {
            experiment,
            ..Default::default()
        };
        match experiment {
            ExperimentKind::GammaSweep => {
                cfg.methods = vec![MethodTag::TwoPass, MethodTag::Mscg, MethodTag::Restarted];
            }
            ExperimentKind::WorkUnits => {
                cfg.methods = vec![MethodTag::Mscg, MethodTag::Restarted];
                cfg.poles = None;
            }
            ExperimentKind::PerturbedRate => cfg.methods = vec![MethodTag::Si],
            _ => {}
        }
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(KrylovError::invalid("tol", "must be positive"));
        }
        if self.n < 2 {
            return Err(KrylovError::invalid("n", "must be at least 2"));
        }
        if self.methods.is_empty() {
            return Err(KrylovError::invalid("methods", "need at least one method"));
        }
        if self.restart_length == 0 {
            return Err(KrylovError::invalid("restart_length", "must be positive"));
        }
        if self.gammas.iter().any(|&g| !(g > 0.0 && g < 1.0)) {
            return Err(KrylovError::invalid("gammas", "must lie in (0, 1)"));
        }
        if self.matvec_costs.iter().any(|&m| !(m > 0.0)) {
            return Err(KrylovError::invalid("matvec_costs", "must be positive"));
        }
        if self.accuracies.iter().any(|&a| !(a > 0.0)) {
            return Err(KrylovError::invalid("accuracies", "must be positive"));
        }
        Ok(())
    }

    /// Right-hand side: normalized ones, or a seeded random unit vector.
    pub fn rhs(&self) -> Vec<f64> {
        match self.seed {
            None => normalized_ones(self.n),
            Some(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut b: Vec<f64> = (0..self.n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let nb = norm2(&b);
                b.iter_mut().for_each(|x| *x /= nb);
                b
            }
        }
    }

    fn primary_matvec_cost(&self) -> f64 {
        self.matvec_costs.first().copied().unwrap_or(10.0)
    }
}

/// Runs one method on a diagonal instance and returns its result and report.
///
/// The inner-solve schedules of the rational methods target `tol` times the
/// oracle norm, or times the lower bound `f(λmax)‖b‖` without an oracle.
pub fn run_method(
    method: MethodTag,
    op: &DiagonalOperator,
    b: &[f64],
    cfg: &ExperimentConfig,
    stopping: &Stopping,
) -> Result<(Vec<f64>, MethodReport)> {
    let f = &cfg.function;
    let scale = match stopping.reference() {
        Some(r) => norm2(r),
        None => f.eval(cfg.bounds.lambda_max) * norm2(b),
    };
    let eps = cfg.tol * scale;
    match method {
        MethodTag::TwoPass => two_pass_fab(op, f, b, stopping, MAX_LANCZOS_STEPS),
        MethodTag::Restarted => restarted_lanczos_fab(op, f, b, cfg.restart_length, stopping, MAX_RESTART_CYCLES),
        MethodTag::Mscg => {
            let opts = MscgOptions {
                poles: cfg.poles,
                ..Default::default()
            };
            mscg_fab(op, f, b, stopping, cfg.bounds, &opts)
        }
        MethodTag::Si => {
            let inner = inner_tolerance_schedule(eps, f, cfg.bounds, optimal_shift(cfg.bounds))?;
            si_lanczos_fab(op, f, b, stopping, cfg.bounds, &SiOptions::new(inner))
        }
        MethodTag::Eksm => {
            let inner = extended_inner_schedule(eps, f, cfg.bounds)?;
            extended_krylov_fab(op, f, b, stopping, cfg.bounds, &ExtendedKrylovOptions::new(inner))
        }
    }
}

fn stopping_for(cfg: &ExperimentConfig, reference: &[f64]) -> Stopping {
    match cfg.stopping {
        StoppingMode::Oracle => Stopping::Oracle {
            reference: reference.to_vec(),
            rel_tol: cfg.tol,
        },
        StoppingMode::Estimate => Stopping::Estimate { rel_tol: cfg.tol },
    }
}

/// Runs under the configured stopping rule; the true error is always filled in.
fn measure(
    method: MethodTag,
    op: &DiagonalOperator,
    b: &[f64],
    reference: &[f64],
    cfg: &ExperimentConfig,
) -> Result<MethodReport> {
    let (x, mut report) = run_method(method, op, b, cfg, &stopping_for(cfg, reference))?;
    report.relative_error = Some(relative_error(&x, reference));
    Ok(report)
}

/// One method on the reference instance.
#[derive(Debug, Clone, Serialize)]
pub struct Table2Row {
    pub method: String,
    pub predicted_matvecs: Option<usize>,
    pub matvecs: Option<usize>,
    pub relative_error: Option<f64>,
    pub work_units: Option<f64>,
    pub iterations: Option<usize>,
    pub peak_vectors: Option<usize>,
    pub met_tol: bool,
    pub failure: Option<String>,
}

fn table_row(
    method: MethodTag,
    predicted: Result<usize>,
    measured: Result<MethodReport>,
    cfg: &ExperimentConfig,
) -> Table2Row {
    let mut failures = Vec::new();
    let predicted = predicted.map_err(|e| failures.push(format!("prediction: {e}"))).ok();
    let report = measured.map_err(|e| failures.push(format!("run: {e}"))).ok();
    let error = report.as_ref().and_then(|r| r.relative_error);
    Table2Row {
        method: method.to_string(),
        predicted_matvecs: predicted,
        matvecs: report.as_ref().map(|r| r.matvecs),
        relative_error: error,
        work_units: report.as_ref().map(|r| r.work_units(cfg.primary_matvec_cost())),
        iterations: report.as_ref().map(|r| r.iterations),
        peak_vectors: report.as_ref().map(|r| r.peak_vectors),
        met_tol: error.is_some_and(|e| e <= cfg.tol),
        failure: (!failures.is_empty()).then(|| failures.join("; ")),
    }
}

/// Predicted and measured matvecs per method on the Chebyshev instance.
pub fn run_table2(cfg: &ExperimentConfig) -> Result<Vec<Table2Row>> {
    cfg.validate()?;
    let oracle = make_diagonal_chebyshev(cfg.n, cfg.bounds)?;
    let b = cfg.rhs();
    let reference = oracle.exact_function_times(&cfg.function, &b);
    let norm_fab = norm2(&reference);
    let params = PredictionParams {
        restart_length: cfg.restart_length,
        poles: cfg.poles,
    };
    let rows = cfg
        .methods
        .par_iter()
        .map(|&method| {
            let predicted =
                predict_total_matvecs(method, cfg.bounds, &cfg.function, norm_fab, cfg.tol * norm_fab, &params)
                    .map(|p| p.total_matvecs);
            // Each cell owns its operator so matvec counts do not interleave.
            let measured =
                make_diagonal_chebyshev(cfg.n, cfg.bounds).and_then(|own| measure(method, &own, &b, &reference, cfg));
            table_row(method, predicted, measured, cfg)
        })
        .collect();
    Ok(rows)
}

/// Methods on one instance, Chebyshev or (with one `gamma`) clustered.
pub fn single_run(cfg: &ExperimentConfig) -> Result<Vec<Table2Row>> {
    cfg.validate()?;
    let build = || match cfg.gammas.as_slice() {
        [gamma] => make_diagonal_clustered(cfg.n, cfg.bounds, *gamma),
        _ => make_diagonal_chebyshev(cfg.n, cfg.bounds),
    };
    let op = build()?;
    let b = cfg.rhs();
    let reference = op.exact_function_times(&cfg.function, &b);
    let norm_fab = norm2(&reference);
    let params = PredictionParams {
        restart_length: cfg.restart_length,
        poles: cfg.poles,
    };
    Ok(cfg
        .methods
        .iter()
        .map(|&method| {
            let predicted =
                predict_total_matvecs(method, cfg.bounds, &cfg.function, norm_fab, cfg.tol * norm_fab, &params)
                    .map(|p| p.total_matvecs);
            let measured = measure(method, &op, &b, &reference, cfg);
            table_row(method, predicted, measured, cfg)
        })
        .collect())
}

/// One `(γ, method)` cell of the clustered-spectrum sweep.
#[derive(Debug, Clone, Serialize)]
pub struct GammaRow {
    pub gamma: f64,
    pub method: String,
    pub matvecs: Option<usize>,
    pub ratio_to_mscg: Option<f64>,
    pub predicted_matvecs: Option<usize>,
    pub relative_error: Option<f64>,
    pub work_units: Option<f64>,
    pub met_tol: bool,
    pub failure: Option<String>,
}

/// Measured matvecs on clustered spectra, relative to multi-shift CG.
///
/// Multi-shift CG is always run as the baseline; it appears in the output
/// only when requested.
pub fn run_gamma_sweep(cfg: &ExperimentConfig) -> Result<Vec<GammaRow>> {
    cfg.validate()?;
    let b = cfg.rhs();
    let mut methods = cfg.methods.clone();
    if !methods.contains(&MethodTag::Mscg) {
        methods.push(MethodTag::Mscg);
    }
    let params = PredictionParams {
        restart_length: cfg.restart_length,
        poles: cfg.poles,
    };
    let cells: Vec<(usize, MethodTag)> = (0..cfg.gammas.len())
        .flat_map(|g| methods.iter().map(move |&m| (g, m)))
        .collect();
    let results: Vec<(usize, MethodTag, Result<MethodReport>, Result<usize>)> = cells
        .par_iter()
        .map(|&(g, method)| {
            let run = || -> Result<(MethodReport, Result<usize>)> {
                let op = make_diagonal_clustered(cfg.n, cfg.bounds, cfg.gammas[g])?;
                let reference = op.exact_function_times(&cfg.function, &b);
                let norm_fab = norm2(&reference);
                let predicted =
                    predict_total_matvecs(method, cfg.bounds, &cfg.function, norm_fab, cfg.tol * norm_fab, &params)
                        .map(|p| p.total_matvecs);
                Ok((measure(method, &op, &b, &reference, cfg)?, predicted))
            };
            match run() {
                Ok((report, predicted)) => (g, method, Ok(report), predicted),
                Err(e) => (g, method, Err(e.clone()), Err(e)),
            }
        })
        .collect();

    let mut rows = Vec::new();
    for (g, &gamma) in cfg.gammas.iter().enumerate() {
        let baseline = results
            .iter()
            .find(|(gi, m, _, _)| *gi == g && *m == MethodTag::Mscg)
            .and_then(|(_, _, r, _)| r.as_ref().ok().map(|r| r.matvecs));
        for (_, method, report, predicted) in results
            .iter()
            .filter(|(gi, m, _, _)| *gi == g && cfg.methods.contains(m))
        {
            let mut failure = Vec::new();
            if let Err(e) = predicted {
                failure.push(format!("prediction: {e}"));
            }
            if let Err(e) = report {
                failure.push(format!("run: {e}"));
            }
            let report = report.as_ref().ok();
            let error = report.and_then(|r| r.relative_error);
            rows.push(GammaRow {
                gamma,
                method: method.to_string(),
                matvecs: report.map(|r| r.matvecs),
                ratio_to_mscg: match (report, baseline) {
                    (Some(r), Some(base)) if base > 0 => Some(r.matvecs as f64 / base as f64),
                    _ => None,
                },
                predicted_matvecs: predicted.as_ref().ok().copied(),
                relative_error: error,
                work_units: report.map(|r| r.work_units(cfg.primary_matvec_cost())),
                met_tol: error.is_some_and(|e| e <= cfg.tol),
                failure: (!failure.is_empty()).then(|| failure.join("; ")),
            });
        }
    }
    Ok(rows)
}

/// Estimated work for one accuracy, matvec cost and method.
#[derive(Debug, Clone, Serialize)]
pub struct WorkUnitRow {
    /// Relative target accuracy, the row's error column.
    pub accuracy: f64,
    pub matvec_cost: f64,
    pub method: String,
    pub poles: usize,
    pub restart_length: usize,
    pub matvecs: usize,
    pub work_units: f64,
}

/// Predicted work of multi-shift CG (minimal Zolotarev `p`, converged
/// systems dropped) against restarted Lanczos with `m_re = 2p`.
pub fn run_work_units(cfg: &ExperimentConfig) -> Result<Vec<WorkUnitRow>> {
    cfg.validate()?;
    let op = make_diagonal_chebyshev(cfg.n, cfg.bounds)?;
    let b = cfg.rhs();
    let norm_b = norm2(&b);
    let norm_fab = norm2(&op.exact_function_times(&cfg.function, &b));
    let mut rows = Vec::new();
    for &accuracy in &cfg.accuracies {
        let eps = accuracy * norm_fab;
        let p = min_poles_for_tolerance(cfg.bounds, &cfg.function, eps / (2.0 * norm_b))?;
        let m_re = 2 * p;
        let params = PredictionParams {
            restart_length: m_re,
            poles: Some(p),
        };
        let mscg = predict_total_matvecs(MethodTag::Mscg, cfg.bounds, &cfg.function, norm_fab, eps, &params)?;
        let approx = rational_approximation(cfg.bounds, &cfg.function, p)?;
        let mscg_counts = WorkCounts {
            iterations: mscg.total_matvecs,
            active_extra_systems: mscg_deflation_schedule(cfg.bounds, &approx, eps, norm_b, mscg.total_matvecs),
            poles: p,
            ..Default::default()
        };
        let restarted = predict_total_matvecs(MethodTag::Restarted, cfg.bounds, &cfg.function, norm_fab, eps, &params)?;
        let restarted_counts = WorkCounts {
            iterations: restarted.total_matvecs,
            cycles: restarted.cycles.unwrap_or(0),
            restart_length: m_re,
            ..Default::default()
        };
        for &cost in &cfg.matvec_costs {
            for &method in &cfg.methods {
                let (counts, matvecs) = match method {
                    MethodTag::Mscg => (&mscg_counts, mscg.total_matvecs),
                    MethodTag::Restarted => (&restarted_counts, restarted.total_matvecs),
                    other => return Err(KrylovError::UnknownMethod(format!("no work-unit model for `{other}`"))),
                };
                rows.push(WorkUnitRow {
                    accuracy,
                    matvec_cost: cost,
                    method: method.to_string(),
                    poles: p,
                    restart_length: m_re,
                    matvecs,
                    work_units: work_units(method, counts, cost)?,
                });
            }
        }
    }
    Ok(rows)
}

/// Loosest scanned accuracy at which restarted Lanczos is estimated to be
/// cheaper than multi-shift CG and stays so for every tighter accuracy.
pub fn break_even_accuracy(rows: &[WorkUnitRow], matvec_cost: f64) -> Option<f64> {
    let mut accuracies: Vec<f64> = rows
        .iter()
        .filter(|r| r.matvec_cost == matvec_cost)
        .map(|r| r.accuracy)
        .collect();
    accuracies.sort_by(|a, b| b.total_cmp(a));
    accuracies.dedup();
    let work = |acc: f64, method: &str| {
        rows.iter()
            .find(|r| r.matvec_cost == matvec_cost && r.accuracy == acc && r.method == method)
            .map(|r| r.work_units)
    };
    let restarted_cheaper: Vec<bool> = accuracies
        .iter()
        .map(|&a| matches!((work(a, "restarted"), work(a, "mscg")), (Some(r), Some(m)) if r < m))
        .collect();
    // First index from which restarted is cheaper through the tightest accuracy.
    let mut start = None;
    for i in (0..accuracies.len()).rev() {
        if restarted_cheaper[i] {
            start = Some(i);
        } else {
            break;
        }
    }
    start.map(|i| accuracies[i])
}

/// Either a rate on the perturbation grid or one outer iteration of the
/// inexact shift-and-invert run.
#[derive(Debug, Clone, Serialize)]
pub struct PerturbedRateRow {
    pub kind: &'static str,
    pub method: String,
    pub eps: Option<f64>,
    pub rate: Option<f64>,
    pub saturated: Option<bool>,
    pub iteration: Option<usize>,
    pub matvecs: Option<usize>,
    pub work_units: Option<f64>,
    pub relative_error: Option<f64>,
    pub em_bound: Option<f64>,
}

/// Perturbed rate on the grid, then an inexact shift-and-invert run with the
/// relaxed inner schedule logging its error and `‖E_m‖` bound.
pub fn run_perturbed_rate(cfg: &ExperimentConfig) -> Result<Vec<PerturbedRateRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &eps in &cfg.perturbations {
        let r = perturbed_rate(eps, cfg.bounds)?;
        rows.push(PerturbedRateRow {
            kind: "rate",
            method: "perturbed_rate".into(),
            eps: Some(eps),
            rate: Some(r.rate),
            saturated: Some(r.saturated),
            iteration: None,
            matvecs: None,
            work_units: None,
            relative_error: None,
            em_bound: None,
        });
    }
    let op = make_diagonal_chebyshev(cfg.n, cfg.bounds)?;
    let b = cfg.rhs();
    let reference = op.exact_function_times(&cfg.function, &b);
    let stopping = Stopping::Oracle {
        reference: reference.clone(),
        rel_tol: cfg.tol,
    };
    let (_, report) = run_method(MethodTag::Si, &op, &b, cfg, &stopping)?;
    let mut matvecs = 0;
    for (j, (&err, &em)) in report.history.iter().zip(&report.perturbation_bounds).enumerate() {
        matvecs += report.inner_iterations.get(j).copied().unwrap_or(0);
        rows.push(PerturbedRateRow {
            kind: "si_run",
            method: MethodTag::Si.to_string(),
            eps: None,
            rate: Some(perturbed_rate(em, cfg.bounds)?.rate),
            saturated: None,
            iteration: Some(j + 1),
            matvecs: Some(matvecs),
            work_units: Some(matvecs as f64 * cfg.primary_matvec_cost()),
            relative_error: Some(err),
            em_bound: Some(em),
        });
    }
    Ok(rows)
}

/// Rendered result of a driver.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub csv: String,
    pub json: String,
    /// Every requested measured method met the tolerance.
    pub all_met_tol: bool,
}

fn render<R: Serialize>(cfg: &ExperimentConfig, rows: &[R], all_met_tol: bool) -> Result<ExperimentOutput> {
    let mut csv_text = String::new();
    let _ = writeln!(csv_text, "# stieltjes-krylov {ARTIFACT_VERSION}");
    let _ = writeln!(csv_text, "# config: {}", serde_json::to_string(cfg)?);
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let body = writer.into_inner().map_err(|e| KrylovError::Io(e.to_string()))?;
    csv_text.push_str(&String::from_utf8_lossy(&body));
    let json = serde_json::to_string_pretty(&serde_json::json!({
        "version": ARTIFACT_VERSION,
        "config": cfg,
        "rows": rows,
    }))?;
    Ok(ExperimentOutput {
        csv: csv_text,
        json,
        all_met_tol,
    })
}

/// Runs the configured experiment and renders it.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    match cfg.experiment {
        ExperimentKind::Table2 | ExperimentKind::SingleRun => {
            let rows = if cfg.experiment == ExperimentKind::Table2 {
                run_table2(cfg)?
            } else {
                single_run(cfg)?
            };
            let ok = rows.iter().all(|r| r.met_tol);
            render(cfg, &rows, ok)
        }
        ExperimentKind::GammaSweep => {
            let rows = run_gamma_sweep(cfg)?;
            let ok = rows.iter().all(|r| r.met_tol);
            render(cfg, &rows, ok)
        }
        ExperimentKind::WorkUnits => {
            let rows = run_work_units(cfg)?;
            render(cfg, &rows, true)
        }
        ExperimentKind::PerturbedRate => {
            let rows = run_perturbed_rate(cfg)?;
            let ok = rows
                .iter()
                .rfind(|r| r.kind == "si_run")
                .and_then(|r| r.relative_error)
                .is_some_and(|e| e <= cfg.tol);
            render(cfg, &rows, ok)
        }
    }
}

/// Writes CSV (and the JSON mirror next to it when requested).
pub fn write_output(cfg: &ExperimentConfig, output: &ExperimentOutput) -> Result<()> {
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &output.csv)?;
            if cfg.json {
                std::fs::write(path.with_extension("json"), &output.json)?;
            }
        }
        None => {
            print!("{}", output.csv);
            if cfg.json {
                println!("{}", output.json);
            }
        }
    }
    Ok(())
}
