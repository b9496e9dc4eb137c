//! The experiment drivers behind the CLI, called from library code: the
//! comparison table, a short clustered-spectrum sweep and the work-unit
//! break-even.

use stieltjes_krylov::experiments::{
    break_even_accuracy, run_gamma_sweep, run_table2, run_work_units, ExperimentConfig, ExperimentKind,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ExperimentConfig::for_experiment(ExperimentKind::Table2);
    println!("method      predicted  measured  rel. error");
    for row in run_table2(&cfg)? {
        println!(
            "{:<10}  {:>9}  {:>8}  {:.2e}",
            row.method,
            row.predicted_matvecs.map_or("-".into(), |v| v.to_string()),
            row.matvecs.map_or("-".into(), |v| v.to_string()),
            row.relative_error.unwrap_or(f64::NAN)
        );
    }

    let mut cfg = ExperimentConfig::for_experiment(ExperimentKind::GammaSweep);
    cfg.gammas = vec![0.65, 0.8, 0.95];
    println!("\ngamma  method      matvecs  ratio to mscg");
    for row in run_gamma_sweep(&cfg)? {
        println!(
            "{:<5}  {:<10}  {:>7}  {}",
            row.gamma,
            row.method,
            row.matvecs.map_or("-".into(), |v| v.to_string()),
            row.ratio_to_mscg.map_or("-".into(), |r| format!("{r:.2}"))
        );
    }

    let cfg = ExperimentConfig::for_experiment(ExperimentKind::WorkUnits);
    let rows = run_work_units(&cfg)?;
    for cost in &cfg.matvec_costs {
        match break_even_accuracy(&rows, *cost) {
            Some(acc) => println!("\nmatvec = {cost} vector ops: restarted cheaper from accuracy {acc:.1e} on"),
            None => println!("\nmatvec = {cost} vector ops: no break-even on the grid"),
        }
    }
    Ok(())
}
