//! Shift-and-invert Lanczos with relaxed inner CG tolerances, corrected and
//! uncorrected, against exact inner solves.

use stieltjes_krylov::operators::{make_diagonal_chebyshev, normalized_ones, LinearOperator, SpectralBounds};
use stieltjes_krylov::rational::{inner_tolerance_schedule, optimal_shift, si_lanczos_fab, SiOptions};
use stieltjes_krylov::report::Stopping;
use stieltjes_krylov::stieltjes::StieltjesFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bounds = SpectralBounds::new(0.1, 200.1)?;
    let op = make_diagonal_chebyshev(1000, bounds)?;
    let b = normalized_ones(op.dim());
    let f = StieltjesFunction::inv_sqrt();
    let reference = op.exact_function_times(&f, &b);
    let norm_fab = reference.iter().map(|x| x * x).sum::<f64>().sqrt();
    let stop = Stopping::Oracle {
        reference,
        rel_tol: 1e-6,
    };
    let xi = optimal_shift(bounds);
    let relaxed = inner_tolerance_schedule(1e-6 * norm_fab, &f, bounds, xi)?;
    println!(
        "shift = {xi:.4}, first inner tolerance = {:.2e}, growth per step = {:.3}",
        relaxed.tolerance(1),
        relaxed.ratio
    );

    for (label, inner, corrected) in [
        ("relaxed, corrected", relaxed, true),
        ("relaxed, plain", relaxed, false),
        ("fixed tolerance", relaxed.strict(), true),
    ] {
        let options = SiOptions {
            corrected,
            ..SiOptions::new(inner)
        };
        let (_, report) = si_lanczos_fab(&op, &f, &b, &stop, bounds, &options)?;
        println!(
            "{label:<20} outer = {:>3}, inner matvecs = {:>5}, error = {:.3e}",
            report.iterations,
            report.matvecs,
            report.relative_error.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
