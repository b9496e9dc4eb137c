use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stieltjes_krylov::experiments::{run_experiment, write_output, ExperimentConfig, ExperimentKind, StoppingMode};
use stieltjes_krylov::operators::SpectralBounds;
use stieltjes_krylov::predict::MethodTag;
use stieltjes_krylov::stieltjes::StieltjesFunction;

#[derive(Parser)]
#[command(
    name = "krylov-experiments",
    version,
    about = "Krylov methods for f(A)b: experiment runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Predicted and measured matvecs on the Chebyshev instance.
    Table2(Common),
    /// Matvecs on clustered spectra relative to multi-shift CG.
    GammaSweep(Common),
    /// Estimated work units, multi-shift CG against restarted Lanczos.
    WorkUnits(Common),
    /// Perturbed convergence rate and an inexact shift-and-invert run.
    PerturbedRate(Common),
    /// The requested methods on one instance.
    SingleRun(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum StopArg {
    Oracle,
    Estimate,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    lmin: Option<f64>,
    #[arg(long)]
    lmax: Option<f64>,
    /// Relative target accuracy.
    #[arg(long)]
    tol: Option<f64>,
    /// Comma-separated: two_pass, mscg, restarted, eksm, si.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<MethodTag>>,
    #[arg(long)]
    restart_length: Option<usize>,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// inv_sqrt, inv_power:<alpha>, log1p_over_z or resolvent:<shift>.
    #[arg(long)]
    function: Option<String>,
    /// Multi-shift CG pole count; `0` picks the minimum for the tolerance.
    #[arg(long)]
    poles: Option<usize>,
    /// Comma-separated γ values; one value makes single-run use a clustered spectrum.
    #[arg(long, value_delimiter = ',')]
    gammas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    matvec_costs: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    accuracies: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    stopping: Option<StopArg>,
    /// Random right-hand side from this seed instead of normalized ones.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write a JSON mirror next to the CSV.
    #[arg(long)]
    json: bool,
}

fn build_config(kind: ExperimentKind, c: Common) -> Result<ExperimentConfig, Box<dyn std::error::Error>> {
    let mut cfg = ExperimentConfig::for_experiment(kind);
    cfg.n = c.n.unwrap_or(cfg.n);
    cfg.bounds = SpectralBounds::new(
        c.lmin.unwrap_or(cfg.bounds.lambda_min),
        c.lmax.unwrap_or(cfg.bounds.lambda_max),
    )?;
    if let Some(tag) = c.function {
        cfg.function = StieltjesFunction::from_tag(&tag)?;
    }
    cfg.tol = c.tol.unwrap_or(cfg.tol);
    cfg.methods = c.methods.unwrap_or(cfg.methods);
    cfg.restart_length = c.restart_length.unwrap_or(cfg.restart_length);
    if let Some(p) = c.poles {
        cfg.poles = (p > 0).then_some(p);
    }
    cfg.gammas = c.gammas.unwrap_or(cfg.gammas);
    if kind == ExperimentKind::SingleRun && cfg.gammas.len() != 1 {
        cfg.gammas.clear();
    }
    cfg.matvec_costs = c.matvec_costs.unwrap_or(cfg.matvec_costs);
    cfg.accuracies = c.accuracies.unwrap_or(cfg.accuracies);
    if let Some(s) = c.stopping {
        cfg.stopping = match s {
            StopArg::Oracle => StoppingMode::Oracle,
            StopArg::Estimate => StoppingMode::Estimate,
        };
    }
    cfg.seed = c.seed;
    cfg.out = c.out;
    cfg.json = c.json;
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, common) = match cli.command {
        Command::Table2(c) => (ExperimentKind::Table2, c),
        Command::GammaSweep(c) => (ExperimentKind::GammaSweep, c),
        Command::WorkUnits(c) => (ExperimentKind::WorkUnits, c),
        Command::PerturbedRate(c) => (ExperimentKind::PerturbedRate, c),
        Command::SingleRun(c) => (ExperimentKind::SingleRun, c),
    };
    let result = build_config(kind, common).and_then(|cfg| {
        let output = run_experiment(&cfg)?;
        write_output(&cfg, &output)?;
        Ok(output.all_met_tol)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("at least one method missed the tolerance");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
