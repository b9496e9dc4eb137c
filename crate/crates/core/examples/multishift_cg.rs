//! Multi-shift CG: f(A)b from a Zolotarev rational approximation whose
//! shifted systems share one Krylov recurrence. Shows how many systems stay
//! active as the cheaper ones converge.

use stieltjes_krylov::mscg::{mscg_fab, MscgOptions};
use stieltjes_krylov::operators::{make_diagonal_chebyshev, normalized_ones, LinearOperator, SpectralBounds};
use stieltjes_krylov::report::Stopping;
use stieltjes_krylov::stieltjes::StieltjesFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bounds = SpectralBounds::new(0.1, 200.1)?;
    let op = make_diagonal_chebyshev(1000, bounds)?;
    let b = normalized_ones(op.dim());
    let f = StieltjesFunction::inv_sqrt();
    let stop = Stopping::Oracle {
        reference: op.exact_function_times(&f, &b),
        rel_tol: 1e-6,
    };

    for poles in [None, Some(15)] {
        let options = MscgOptions {
            poles,
            ..MscgOptions::default()
        };
        let (_, report) = mscg_fab(&op, &f, &b, &stop, bounds, &options)?;
        println!(
            "poles = {:>2} ({}): matvecs = {}, error = {:.3e}",
            report.poles,
            if poles.is_some() { "fixed" } else { "minimal" },
            report.matvecs,
            report.relative_error.unwrap_or(f64::NAN)
        );
        let active = &report.active_shifted_systems;
        let samples: Vec<String> = (0..active.len())
            .step_by((active.len() / 6).max(1))
            .map(|k| format!("{k}:{}", active[k]))
            .collect();
        println!("  active extra systems by iteration: {}", samples.join(" "));
    }
    Ok(())
}
