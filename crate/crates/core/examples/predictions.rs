//! Matvec predictions for all five methods from the spectral interval alone.

use stieltjes_krylov::operators::{make_diagonal_chebyshev, normalized_ones, SpectralBounds};
use stieltjes_krylov::predict::{predict_total_matvecs, MethodTag, PredictionParams};
use stieltjes_krylov::stieltjes::StieltjesFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bounds = SpectralBounds::new(0.1, 200.1)?;
    let op = make_diagonal_chebyshev(1000, bounds)?;
    let b = normalized_ones(1000);
    let f = StieltjesFunction::inv_sqrt();
    let norm_fab = op
        .exact_function_times(&f, &b)
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    let params = PredictionParams {
        restart_length: 30,
        poles: Some(15),
    };

    for tol in [1e-4, 1e-6, 1e-8] {
        println!("relative tolerance {tol:e}");
        for method in [
            MethodTag::TwoPass,
            MethodTag::Mscg,
            MethodTag::Restarted,
            MethodTag::Eksm,
            MethodTag::Si,
        ] {
            let p = predict_total_matvecs(method, bounds, &f, norm_fab, tol * norm_fab, &params)?;
            println!(
                "  {:<10} rate {:.4}  m* = {:>3}  matvecs = {}",
                method.as_str(),
                p.alpha,
                p.m_star,
                p.total_matvecs
            );
        }
    }
    Ok(())
}
