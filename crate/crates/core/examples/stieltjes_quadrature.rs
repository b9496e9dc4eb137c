//! Stieltjes functions evaluated through their measure: quadrature against
//! the closed forms.

use stieltjes_krylov::stieltjes::StieltjesFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let functions = [
        StieltjesFunction::inv_sqrt(),
        StieltjesFunction::inv_power(0.25)?,
        StieltjesFunction::log1p_over_z(),
        StieltjesFunction::resolvent(2.0)?,
    ];
    for f in &functions {
        print!("{:<14}", f.tag());
        for z in [0.1, 1.0, 200.0] {
            let by_measure = f.integrate_measure(|t| 1.0 / (z + t), 1e-12)?;
            print!("  z={z:<5} rel diff {:.1e}", (by_measure - f.eval(z)).abs() / f.eval(z));
        }
        println!();
    }
    Ok(())
}
