//! Convergence factor of shift-and-invert Lanczos under a perturbation of
//! size ε, from α(0) up to saturation at ε = 1/(λmax - ξ).

use stieltjes_krylov::operators::SpectralBounds;
use stieltjes_krylov::predict::{perturbed_rate, perturbed_rate_from_ellipse};
use stieltjes_krylov::rational::optimal_shift;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bounds = SpectralBounds::new(0.1, 200.1)?;
    let saturation = 1.0 / (bounds.lambda_max - optimal_shift(bounds));
    println!("saturation at eps = {saturation:.5}");
    println!("      eps     rate   ellipse form");
    for k in 0..=14 {
        let eps = 10f64.powf(-14.0 + k as f64);
        let r = perturbed_rate(eps.min(saturation), bounds)?;
        println!(
            "{:>9.1e}  {:.5}  {:.5}{}",
            eps.min(saturation),
            r.rate,
            perturbed_rate_from_ellipse(eps.min(saturation), bounds),
            if r.saturated { "  (saturated)" } else { "" }
        );
        if r.saturated {
            break;
        }
    }
    Ok(())
}
