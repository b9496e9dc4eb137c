//! Zolotarev approximations of z^{-1/2}: uniform error against pole count,
//! and the smallest pole count for a few target accuracies.

use stieltjes_krylov::mscg::{min_poles_for_tolerance, zolotarev_inv_sqrt};
use stieltjes_krylov::operators::SpectralBounds;
use stieltjes_krylov::stieltjes::StieltjesFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bounds = SpectralBounds::new(0.1, 200.1)?;
    println!(" p  max |f - r|   max |f - r|/f   nearest pole");
    for p in [2, 4, 6, 8, 10, 12, 15] {
        let r = zolotarev_inv_sqrt(bounds, p)?;
        println!(
            "{p:>2}  {:>11.3e}   {:>13.3e}   {:.4e}",
            r.error_bound,
            r.relative_error_bound,
            r.smallest_pole()
        );
    }
    let f = StieltjesFunction::inv_sqrt();
    for target in [1e-3, 1e-6, 5e-7, 1e-10] {
        println!(
            "uniform error <= {target:e}: {} poles",
            min_poles_for_tolerance(bounds, &f, target)?
        );
    }
    Ok(())
}
