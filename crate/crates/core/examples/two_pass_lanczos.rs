//! Two-pass Lanczos for A^{-1/2} b on a Chebyshev spectrum, compared with
//! the one-pass approximation that keeps its basis.

use stieltjes_krylov::lanczos::{lanczos_fab, two_pass_fab};
use stieltjes_krylov::linalg::relative_error;
use stieltjes_krylov::operators::{make_diagonal_chebyshev, normalized_ones, LinearOperator, SpectralBounds};
use stieltjes_krylov::report::Stopping;
use stieltjes_krylov::stieltjes::StieltjesFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bounds = SpectralBounds::new(0.1, 200.1)?;
    let op = make_diagonal_chebyshev(1000, bounds)?;
    let b = normalized_ones(op.dim());
    let f = StieltjesFunction::inv_sqrt();
    let exact = op.exact_function_times(&f, &b);

    let oracle = Stopping::Oracle {
        reference: exact.clone(),
        rel_tol: 1e-6,
    };
    let (fm, report) = two_pass_fab(&op, &f, &b, &oracle, 1000)?;
    println!(
        "two-pass (true error stop): m = {}, matvecs = {}, error = {:.3e}",
        report.iterations,
        report.matvecs,
        report.relative_error.unwrap_or(f64::NAN)
    );

    let one_pass = lanczos_fab(&op, &f, &b, report.iterations)?;
    println!("difference to one-pass Lanczos: {:.3e}", relative_error(&fm, &one_pass));

    let estimate = Stopping::Estimate { rel_tol: 1e-6 };
    let (fe, report) = two_pass_fab(&op, &f, &b, &estimate, 1000)?;
    println!(
        "two-pass (estimate stop):   m = {}, matvecs = {}, error = {:.3e}",
        report.iterations,
        report.matvecs,
        relative_error(&fe, &exact)
    );
    Ok(())
}
