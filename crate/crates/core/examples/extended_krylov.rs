//! Extended Krylov on span{b, A^{-1}b, Ab, ...}: error per iteration against
//! the predicted rate α(0)², once with exact and once with relaxed solves.

use stieltjes_krylov::operators::{make_diagonal_chebyshev, normalized_ones, LinearOperator, SpectralBounds};
use stieltjes_krylov::predict::{convergence_factor, FactorKind};
use stieltjes_krylov::rational::{
    extended_inner_schedule, extended_krylov_fab, ExtendedKrylovOptions, InnerSolveConfig,
};
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
        rel_tol: 1e-8,
    };
    let rate = convergence_factor(FactorKind::ShiftInvertOrExtended, bounds, 0.0).powi(2);

    let exact = ExtendedKrylovOptions::new(InnerSolveConfig::exact());
    let (_, report) = extended_krylov_fab(&op, &f, &b, &stop, bounds, &exact)?;
    println!("exact solves, predicted ratio per iteration {rate:.4}");
    for (j, w) in report.history.windows(2).enumerate().step_by(3) {
        println!("  iteration {:>2}: error {:.3e}, ratio {:.4}", j + 2, w[1], w[1] / w[0]);
    }

    let relaxed = ExtendedKrylovOptions::new(extended_inner_schedule(1e-8 * norm_fab, &f, bounds)?);
    let (_, report) = extended_krylov_fab(&op, &f, &b, &stop, bounds, &relaxed)?;
    println!(
        "relaxed solves: {} iterations, {} matvecs, inner CG steps {:?}",
        report.iterations, report.matvecs, report.inner_iterations
    );
    Ok(())
}
