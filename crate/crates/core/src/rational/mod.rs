//! Rational Krylov methods with inexact inner solves: shift-and-invert
//! Lanczos on `B = (A - ξI)^{-1}` and the extended Krylov method.

mod extended;
mod shift_invert;

pub use extended::{extended_krylov_fab, ExtendedDecomposition, ExtendedKrylovOptions};
pub use shift_invert::{si_lanczos_fab, InexactDecomposition, SiOptions};

use serde::Serialize;

use crate::error::{KrylovError, Result};
use crate::operators::SpectralBounds;
use crate::predict::{convergence_factor, FactorKind};
use crate::stieltjes::StieltjesFunction;

/// Default cap on CG iterations per inner solve.
pub const DEFAULT_MAX_INNER: usize = 20_000;

/// `ξ = -√(λmin λmax)`, which equalizes `κ_ξ(0)` and `κ_{ξ,∞}`.
pub fn optimal_shift(bounds: SpectralBounds) -> f64 {
    -bounds.geometric_mean()
}

/// `g(y) = f(1/y + ξ)` for `y ∈ (0, -1/ξ]`.
pub fn transformed_g(f: StieltjesFunction, xi: f64) -> Result<impl Fn(f64) -> Result<f64>> {
    if !(xi < 0.0) {
        return Err(KrylovError::invalid("xi", "shift must be negative"));
    }
    Ok(move |y: f64| {
        if !(y > 0.0 && y <= -1.0 / xi) {
            return Err(KrylovError::invalid("y", format!("{y} outside (0, {}]", -1.0 / xi)));
        }
        Ok(f.eval(1.0 / y + xi))
    })
}

/// `g(y) = ∫ y / (1 + (ξ + t) y) dμ(t)`, the integral form of [`transformed_g`].
pub fn transformed_g_integral(f: &StieltjesFunction, xi: f64, y: f64, tol: f64) -> Result<f64> {
    f.integrate_measure(|t| y / (1.0 + (xi + t) * y), tol)
}

/// Geometric inner tolerance schedule `ε_j = ε_1 ρ^{j-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InnerSolveConfig {
    pub base_tolerance: f64,
    pub ratio: f64,
    pub max_inner_iterations: usize,
}

impl InnerSolveConfig {
    pub fn new(base_tolerance: f64, ratio: f64, max_inner_iterations: usize) -> Result<Self> {
        if !(base_tolerance > 0.0) {
            return Err(KrylovError::invalid("base_tolerance", "must be positive"));
        }
        if !(ratio >= 1.0) {
            return Err(KrylovError::invalid("ratio", "must be at least 1"));
        }
        Ok(InnerSolveConfig {
            base_tolerance,
            ratio,
            max_inner_iterations,
        })
    }

    /// Near-exact solves with a fixed residual tolerance.
    pub fn exact() -> Self {
        InnerSolveConfig {
            base_tolerance: 1e-14,
            ratio: 1.0,
            max_inner_iterations: DEFAULT_MAX_INNER,
        }
    }

    /// Tolerance for outer iteration `j >= 1`.
    pub fn tolerance(&self, j: usize) -> f64 {
        self.base_tolerance * self.ratio.powi(j.saturating_sub(1) as i32)
    }

    /// Same base tolerance without relaxation.
    pub fn strict(self) -> Self {
        InnerSolveConfig { ratio: 1.0, ..self }
    }
}

/// `ε_1 = ε / (2((λmin - ξ)|f'(λmin)| + (λmax - ξ)|f'(√(λmin λmax))|))`, ratio `1/α(0)`.
pub fn inner_tolerance_schedule(
    eps_target: f64,
    f: &StieltjesFunction,
    bounds: SpectralBounds,
    xi: f64,
) -> Result<InnerSolveConfig> {
    if !(eps_target > 0.0) {
        return Err(KrylovError::invalid("eps_target", "must be positive"));
    }
    let d_min = f.derivative(bounds.lambda_min);
    let d_mid = f.derivative(bounds.geometric_mean());
    if !d_min.is_finite() || !d_mid.is_finite() {
        return Err(KrylovError::invalid("f", "derivative not finite on the spectrum"));
    }
    let denom = 2.0 * ((bounds.lambda_min - xi) * d_min.abs() + (bounds.lambda_max - xi) * d_mid.abs());
    let alpha0 = convergence_factor(FactorKind::ShiftInvertOrExtended, bounds, 0.0);
    let ratio = if alpha0 > 0.0 { 1.0 / alpha0 } else { 1.0 };
    InnerSolveConfig::new(eps_target / denom, ratio, DEFAULT_MAX_INNER)
}

/// Extended-Krylov schedule: `ξ = 0` in the prefactor and ratio `1/α(0)²`,
/// since each iteration adds one positive and one negative power.
pub fn extended_inner_schedule(
    eps_target: f64,
    f: &StieltjesFunction,
    bounds: SpectralBounds,
) -> Result<InnerSolveConfig> {
    let cfg = inner_tolerance_schedule(eps_target, f, bounds, 0.0)?;
    Ok(InnerSolveConfig {
        ratio: cfg.ratio * cfg.ratio,
        ..cfg
    })
}

/// `‖E_m‖ <= ‖B‖ √(Σ ‖r_j‖²)`.
pub fn em_norm_bound(residual_norms: &[f64], norm_b_op: f64) -> f64 {
    norm_b_op * residual_norms.iter().map(|r| r * r).sum::<f64>().sqrt()
}

/// Error bound of corrected shift-and-invert Lanczos at the optimal shift:
/// `‖b‖ √κ (√κ f_1(λmin) + f_2(√(λmin λmax))) α_m(0)`, where `f_1` and `f_2`
/// integrate `1/(z + t)` over `t < -ξ` and `t > -ξ`.
pub fn si_error_bound(bounds: SpectralBounds, f: &StieltjesFunction, m: usize, norm_b: f64) -> Result<f64> {
    let xi = optimal_shift(bounds);
    let sk = bounds.kappa().sqrt();
    let tol = 1e-10;
    let (f1, _) = f.integrate_measure_split(|t| 1.0 / (bounds.lambda_min + t), -xi, tol)?;
    let (_, f2) = f.integrate_measure_split(|t| 1.0 / (bounds.geometric_mean() + t), -xi, tol)?;
    let a = convergence_factor(FactorKind::ShiftInvertOrExtended, bounds, 0.0);
    let alpha_m = if a <= 0.0 {
        if m == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 / (m as f64 * a.ln()).cosh()
    };
    Ok(norm_b * sk * (sk * f1 + f2) * alpha_m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table2() -> SpectralBounds {
        SpectralBounds::new(0.1, 200.1).unwrap()
    }

    #[test]
    fn shift_for_table_bounds() {
        assert_relative_eq!(optimal_shift(table2()), -(20.01f64.sqrt()), epsilon = 1e-14);
        assert_eq!(optimal_shift(SpectralBounds::new(1.0, 1.0).unwrap()), -1.0);
    }

    #[test]
    fn g_unwinds_to_f() {
        let f = StieltjesFunction::inv_sqrt();
        let g = transformed_g(f, -1.0).unwrap();
        assert_relative_eq!(g(0.5).unwrap(), 1.0, epsilon = 1e-15);
        assert!(g(2.0).is_err());
        let xi = optimal_shift(table2());
        let g = transformed_g(f, xi).unwrap();
        for lam in [0.1, 3.0, 200.1] {
            assert_relative_eq!(g(1.0 / (lam - xi)).unwrap(), f.eval(lam), max_relative = 1e-14);
        }
    }

    #[test]
    fn schedule_matches_closed_form() {
        let f = StieltjesFunction::inv_sqrt();
        let b = table2();
        let xi = optimal_shift(b);
        let cfg = inner_tolerance_schedule(1e-6, &f, b, xi).unwrap();
        let expect = 1e-6 / (2.0 * ((0.1 - xi) * 0.5 * 0.1f64.powf(-1.5) + (200.1 - xi) * 0.5 * (-xi).powf(-1.5)));
        assert_relative_eq!(cfg.base_tolerance, expect, max_relative = 1e-12);
        for j in 1..10 {
            assert_relative_eq!(cfg.tolerance(j + 1) / cfg.tolerance(j), cfg.ratio, max_relative = 1e-12);
        }
        assert_eq!(cfg.strict().tolerance(7), cfg.base_tolerance);
    }

    #[test]
    fn em_bound_trivial_cases() {
        assert_eq!(em_norm_bound(&[0.0, 0.0], 3.0), 0.0);
        assert_eq!(em_norm_bound(&[0.25], 1.0), 0.25);
    }

    #[test]
    fn si_bound_prefactor_is_finite() {
        let f = StieltjesFunction::inv_sqrt();
        let c0 = si_error_bound(table2(), &f, 0, 1.0).unwrap();
        assert!(c0.is_finite() && c0 > 0.0);
        // A point mass beyond -ξ leaves only the f_2 part.
        let far = StieltjesFunction::resolvent(100.0).unwrap();
        let bound = si_error_bound(table2(), &far, 0, 1.0).unwrap();
        let sk = 2001f64.sqrt();
        assert_relative_eq!(bound, sk / (20.01f64.sqrt() + 100.0), max_relative = 1e-12);
    }
}
