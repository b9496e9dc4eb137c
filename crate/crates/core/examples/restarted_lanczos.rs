//! Restarted Lanczos with a few restart lengths: storage stays at m_re + 3
//! vectors while the error contracts by roughly α_{m_re} per cycle.

use stieltjes_krylov::lanczos::alpha_m;
use stieltjes_krylov::operators::{make_diagonal_chebyshev, normalized_ones, LinearOperator, SpectralBounds};
use stieltjes_krylov::report::Stopping;
use stieltjes_krylov::restarted::restarted_lanczos_fab;
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

    println!("m_re  cycles  matvecs  peak vectors  mean decay  bound");
    for m_re in [10, 20, 30, 50] {
        let (_, report) = restarted_lanczos_fab(&op, &f, &b, m_re, &stop, 10_000)?;
        let h = &report.history;
        let decay = if h.len() > 1 {
            (h[h.len() - 1] / h[0]).powf(1.0 / (h.len() - 1) as f64)
        } else {
            f64::NAN
        };
        println!(
            "{m_re:>4}  {:>6}  {:>7}  {:>12}  {decay:>10.3}  {:.3}",
            report.cycles,
            report.matvecs,
            report.peak_vectors,
            alpha_m(bounds, f.support_start(), m_re as f64)
        );
    }
    Ok(())
}
