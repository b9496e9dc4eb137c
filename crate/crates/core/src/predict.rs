//! A-priori convergence factors, iteration and matvec predictions, the
//! work-unit cost model, and the perturbed convergence rate of inexact
//! shift-and-invert Lanczos.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{KrylovError, Result};
use crate::mscg::{rational_approximation, residual_tolerances, RationalApproximation};
use crate::operators::SpectralBounds;
use crate::rational::{inner_tolerance_schedule, optimal_shift};
use crate::stieltjes::StieltjesFunction;

/// The five methods compared throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    TwoPass,
    Mscg,
    Restarted,
    Eksm,
    Si,
}

impl MethodTag {
    pub const ALL: [MethodTag; 5] = [
        MethodTag::TwoPass,
        MethodTag::Mscg,
        MethodTag::Restarted,
        MethodTag::Eksm,
        MethodTag::Si,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MethodTag::TwoPass => "two_pass",
            MethodTag::Mscg => "mscg",
            MethodTag::Restarted => "restarted",
            MethodTag::Eksm => "eksm",
            MethodTag::Si => "si",
        }
    }

    /// Polynomial methods work in `K_m(A, b)` without inner solves.
    pub fn is_polynomial(&self) -> bool {
        matches!(self, MethodTag::TwoPass | MethodTag::Mscg | MethodTag::Restarted)
    }
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodTag {
    type Err = KrylovError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "two_pass" | "2pl" | "twopass" => Ok(MethodTag::TwoPass),
            "mscg" | "multishift" => Ok(MethodTag::Mscg),
            "restarted" | "rlan" => Ok(MethodTag::Restarted),
            "eksm" | "extended" => Ok(MethodTag::Eksm),
            "si" | "shift_invert" => Ok(MethodTag::Si),
            _ => Err(KrylovError::UnknownMethod(s.to_string())),
        }
    }
}

/// Which asymptotic factor to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    /// `c(t) = (√κ(t) - 1)/(√κ(t) + 1)`, `κ(t) = (λmax + t)/(λmin + t)`.
    Lanczos,
    /// `α(0) = (κ^{1/4} - 1)/(κ^{1/4} + 1)`.
    ShiftInvertOrExtended,
}

pub fn convergence_factor(kind: FactorKind, bounds: SpectralBounds, t: f64) -> f64 {
    match kind {
        FactorKind::Lanczos => {
            let kappa = (bounds.lambda_max + t) / (bounds.lambda_min + t);
            cg_factor(kappa)
        }
        FactorKind::ShiftInvertOrExtended => cg_factor(bounds.kappa().sqrt()),
    }
}

/// `(√κ - 1)/(√κ + 1)`, zero for `κ <= 1`.
pub fn cg_factor(kappa: f64) -> f64 {
    if kappa <= 1.0 {
        return 0.0;
    }
    let s = kappa.sqrt();
    (s - 1.0) / (s + 1.0)
}

/// Condition number of `I + (ξ + t) B`, `B = (A - ξI)^{-1}`.
pub fn kappa_xi(t: f64, xi: f64, bounds: SpectralBounds) -> f64 {
    let (lmin, lmax) = (bounds.lambda_min, bounds.lambda_max);
    if t <= -xi {
        (lmax + t) / (lmin + t) * (lmin - xi) / (lmax - xi)
    } else {
        (lmin + t) / (lmax + t) * (lmax - xi) / (lmin - xi)
    }
}

/// `κ_{ξ,∞} = (λmax - ξ)/(λmin - ξ)`.
pub fn kappa_xi_infinity(xi: f64, bounds: SpectralBounds) -> f64 {
    (bounds.lambda_max - xi) / (bounds.lambda_min - xi)
}

/// Prefactor estimate `√(1 - α²) ‖f(A)b‖`.
pub fn estimate_c(norm_fab: f64, alpha: f64) -> f64 {
    (1.0 - alpha * alpha).max(0.0).sqrt() * norm_fab
}

/// `⌈log_α(ε/C)⌉`, zero when already below tolerance.
pub fn predict_m_star(alpha: f64, c: f64, eps: f64) -> usize {
    if eps >= c || c <= 0.0 {
        return 0;
    }
    if alpha <= 0.0 {
        return 1;
    }
    ceil_tolerant((eps / c).ln() / alpha.ln())
}

/// Restart cycles `⌈ln cosh(m* ln c) / ln cosh(m_re ln c)⌉`.
pub fn predict_restart_cycles(restart_length: usize, m_star: usize, c: f64) -> usize {
    if m_star == 0 {
        return 0;
    }
    if restart_length >= m_star || c <= 0.0 || c >= 1.0 {
        return 1;
    }
    let lc = c.ln();
    let num = ln_cosh(m_star as f64 * lc);
    let den = ln_cosh(restart_length as f64 * lc);
    ceil_tolerant(num / den).max(1)
}

/// `ln cosh(x)` without overflow.
fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Ceiling that does not round `k + 1e-12` up to `k + 1`.
fn ceil_tolerant(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r.max(0.0) as usize
    } else {
        x.ceil().max(0.0) as usize
    }
}

/// CG iterations predicted by `C_in c_in^k <= tol` with `C_in = 1`.
pub fn predict_inner_iterations(inner_factor: f64, tol: f64) -> usize {
    if tol >= 1.0 {
        return 0;
    }
    if inner_factor <= 0.0 {
        return 1;
    }
    ceil_tolerant(tol.ln() / inner_factor.ln()).max(1)
}

/// Parameters shared by the predictions.
#[derive(Debug, Clone)]
pub struct PredictionParams {
    pub restart_length: usize,
    /// Pole count for multi-shift CG; `None` picks the minimum for `ε/2`.
    pub poles: Option<usize>,
}

impl Default for PredictionParams {
    fn default() -> Self {
        PredictionParams {
            restart_length: 30,
            poles: None,
        }
    }
}

/// A-priori record for one method.
#[derive(Debug, Clone, Serialize)]
pub struct Prediction {
    pub method: MethodTag,
    pub alpha: f64,
    pub c: f64,
    /// Outer iterations (Lanczos steps, CG steps, rational iterations).
    pub m_star: usize,
    /// Restart cycles, restarted Lanczos only.
    pub cycles: Option<usize>,
    pub inner_iterations: Vec<usize>,
    pub total_matvecs: usize,
}

/// Predicted matvecs for `method`; `eps` is the absolute target.
pub fn predict_total_matvecs(
    method: MethodTag,
    bounds: SpectralBounds,
    f: &StieltjesFunction,
    norm_fab: f64,
    eps: f64,
    params: &PredictionParams,
) -> Result<Prediction> {
    if !(eps > 0.0) {
        return Err(KrylovError::invalid("eps", "must be positive"));
    }
    let t0 = f.support_start();
    let lanczos_alpha = convergence_factor(FactorKind::Lanczos, bounds, t0);
    let lanczos_c = estimate_c(norm_fab, lanczos_alpha);
    let lanczos_m = predict_m_star(lanczos_alpha, lanczos_c, eps);
    let rational_alpha = convergence_factor(FactorKind::ShiftInvertOrExtended, bounds, 0.0);

    let pred = match method {
        MethodTag::TwoPass => Prediction {
            method,
            alpha: lanczos_alpha,
            c: lanczos_c,
            m_star: lanczos_m,
            cycles: None,
            inner_iterations: Vec::new(),
            total_matvecs: 2 * lanczos_m,
        },
        MethodTag::Restarted => {
            let k = predict_restart_cycles(params.restart_length, lanczos_m, lanczos_alpha);
            Prediction {
                method,
                alpha: lanczos_alpha,
                c: lanczos_c,
                m_star: lanczos_m,
                cycles: Some(k),
                inner_iterations: Vec::new(),
                total_matvecs: k * params.restart_length,
            }
        }
        MethodTag::Mscg => {
            let r = prediction_rational(bounds, f, eps, params)?;
            let zeta1 = r.smallest_pole();
            let shifted = SpectralBounds::new(bounds.lambda_min - zeta1, bounds.lambda_max - zeta1)?;
            let alpha = convergence_factor(FactorKind::Lanczos, shifted, 0.0);
            let c = estimate_c(norm_fab, alpha);
            let m = predict_m_star(alpha, c, eps);
            Prediction {
                method,
                alpha,
                c,
                m_star: m,
                cycles: None,
                inner_iterations: Vec::new(),
                total_matvecs: m,
            }
        }
        MethodTag::Si => {
            let c = estimate_c(norm_fab, rational_alpha);
            let m = predict_m_star(rational_alpha, c, eps);
            let xi = optimal_shift(bounds);
            let schedule = inner_tolerance_schedule(eps, f, bounds, xi)?;
            // CG on A - ξI sees κ(A - ξI) = √κ(A).
            let inner_factor = cg_factor(bounds.kappa().sqrt());
            let inner: Vec<usize> = (1..=m)
                .map(|j| predict_inner_iterations(inner_factor, schedule.tolerance(j)))
                .collect();
            let total = inner.iter().sum();
            Prediction {
                method,
                alpha: rational_alpha,
                c,
                m_star: m,
                cycles: None,
                inner_iterations: inner,
                total_matvecs: total,
            }
        }
        MethodTag::Eksm => {
            let per_iteration = rational_alpha * rational_alpha;
            let c = estimate_c(norm_fab, per_iteration);
            let m = predict_m_star(per_iteration, c, eps);
            let schedule = crate::rational::extended_inner_schedule(eps, f, bounds)?;
            let inner_factor = cg_factor(bounds.kappa());
            let inner: Vec<usize> = (1..=m)
                .map(|j| predict_inner_iterations(inner_factor, schedule.tolerance(j)))
                .collect();
            // One product with A per iteration on top of the inner solves.
            let total = inner.iter().sum::<usize>() + m;
            Prediction {
                method,
                alpha: per_iteration,
                c,
                m_star: m,
                cycles: None,
                inner_iterations: inner,
                total_matvecs: total,
            }
        }
    };
    Ok(pred)
}

fn prediction_rational(
    bounds: SpectralBounds,
    f: &StieltjesFunction,
    eps: f64,
    params: &PredictionParams,
) -> Result<RationalApproximation> {
    match params.poles {
        Some(p) => rational_approximation(bounds, f, p),
        None => crate::mscg::min_poles_for_tolerance(bounds, f, eps / 2.0)
            .and_then(|p| rational_approximation(bounds, f, p)),
    }
}

/// Iteration counts feeding the work-unit model.
#[derive(Debug, Clone, Default, Serialize)]
pub struct WorkCounts {
    /// Matvec-driving iterations (CG steps or Lanczos steps).
    pub iterations: usize,
    /// Restart cycles (restarted Lanczos).
    pub cycles: usize,
    pub restart_length: usize,
    /// Active non-seed systems in each iteration (multi-shift CG).
    pub active_extra_systems: Vec<usize>,
    /// Number of poles (multi-shift CG).
    pub poles: usize,
}

/// Work in units of one vector update `V`, a matvec costing `matvec_cost`.
pub fn work_units(method: MethodTag, counts: &WorkCounts, matvec_cost: f64) -> Result<f64> {
    if !(matvec_cost > 0.0) {
        return Err(KrylovError::invalid("matvec_cost", "must be positive"));
    }
    match method {
        MethodTag::Mscg => {
            if counts.iterations == 0 {
                return Ok(0.0);
            }
            let seed = counts.iterations as f64 * (matvec_cost + 12.0);
            let extra: usize = counts.active_extra_systems.iter().sum();
            let combine = counts.poles.saturating_sub(1) as f64;
            Ok(seed + 5.0 * extra as f64 + combine)
        }
        MethodTag::Restarted => {
            Ok(counts.iterations as f64 * (matvec_cost + 9.0)
                + 2.0 * counts.restart_length as f64 * counts.cycles as f64)
        }
        other => Err(KrylovError::UnknownMethod(format!("no work-unit model for `{other}`"))),
    }
}

/// Per-iteration active extra systems when system `i` is dropped once its
/// CG bound `√κ_i α_k(κ_i) ‖b‖` meets `tol_i`. Index 0 is the seed.
pub fn mscg_deflation_schedule(
    bounds: SpectralBounds,
    approx: &RationalApproximation,
    eps: f64,
    norm_b: f64,
    seed_iterations: usize,
) -> Vec<usize> {
    let tols = residual_tolerances(approx, bounds, eps);
    let needed: Vec<usize> = approx
        .poles
        .iter()
        .zip(&tols)
        .map(|(&zeta, &tol)| {
            let kappa = (bounds.lambda_max - zeta) / (bounds.lambda_min - zeta);
            let c = cg_factor(kappa);
            let pre = kappa.sqrt() * norm_b;
            if pre <= tol {
                return 0;
            }
            if c <= 0.0 {
                return 1;
            }
            // α_k = 1/cosh(k ln c) <= tol/pre  <=>  k >= acosh(pre/tol) / |ln c|.
            ceil_tolerant((pre / tol).acosh() / -c.ln())
        })
        .collect();
    (0..seed_iterations)
        .map(|k| needed.iter().skip(1).filter(|&&n| n > k).count())
        .collect()
}

/// Convergence factor of shift-and-invert Lanczos under a perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbedRate {
    pub rate: f64,
    /// The perturbation reached `1/(λmax - ξ)`; convergence is no longer guaranteed.
    pub saturated: bool,
}

/// `α(0) + (-2ξε + 2√ε √(-βξ + εξ²)) / (1 + √(1 - β²))`, clamped at 1.
pub fn perturbed_rate(eps: f64, bounds: SpectralBounds) -> Result<PerturbedRate> {
    if !(eps >= 0.0) {
        return Err(KrylovError::invalid("eps", "must be nonnegative"));
    }
    let xi = optimal_shift(bounds);
    let beta = cg_factor(bounds.kappa());
    let alpha0 = convergence_factor(FactorKind::ShiftInvertOrExtended, bounds, 0.0);
    let threshold = 1.0 / (bounds.lambda_max - xi);
    if eps >= threshold {
        return Ok(PerturbedRate {
            rate: 1.0,
            saturated: true,
        });
    }
    let denom = 1.0 + (1.0 - beta * beta).sqrt();
    let num = -2.0 * xi * eps + 2.0 * eps.sqrt() * (-beta * xi + eps * xi * xi).sqrt();
    let rate = alpha0 + num / denom;
    Ok(PerturbedRate {
        rate: rate.min(1.0),
        saturated: rate >= 1.0,
    })
}

/// Same rate from the enclosing ellipse and Zhukovsky map:
/// `|1/τ*| = R β / (1 + √(1 - β²))` with `R = 1 + ε/a + √(2ε/a + ε²/a²)`.
pub fn perturbed_rate_from_ellipse(eps: f64, bounds: SpectralBounds) -> f64 {
    let xi = optimal_shift(bounds);
    let beta = cg_factor(bounds.kappa());
    let c = 1.0 / (-2.0 * xi);
    let a = c * beta;
    let r = 1.0 + eps / a + (2.0 * eps / a + (eps / a).powi(2)).sqrt();
    (r * beta / (1.0 + (1.0 - beta * beta).sqrt())).min(1.0)
}
