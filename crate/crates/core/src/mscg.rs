//! Rational approximation of `f` in partial-fraction form and multi-shift CG.
//!
//! `r(z) = Σ ω_i / (z - ζ_i)` with `ζ_i` on the negative real axis, so
//! `r(A) b = Σ ω_i (A - ζ_i I)^{-1} b` costs one Krylov recurrence.

use serde::Serialize;

use crate::elliptic::{complete_k, sc_squared};
use crate::error::{KrylovError, Result};
use crate::linalg::{axpy, dot, norm2, relative_error};
use crate::operators::{LinearOperator, SpectralBounds};
use crate::report::{MethodReport, Stopping};
use crate::stieltjes::StieltjesFunction;

/// Largest pole count tried by [`min_poles_for_tolerance`].
pub const MAX_POLES: usize = 100;
/// Samples used to verify a uniform error bound.
pub const VERIFICATION_SAMPLES: usize = 10_000;

/// Which partial-fraction form `r` uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RationalForm {
    /// `Σ ω_i / (z - ζ_i)`.
    First,
    /// `Σ ω_i / (z² - ζ_i)`; carried as a type only.
    Second,
}

#[derive(Debug, Clone, Serialize)]
pub struct RationalApproximation {
    /// Sorted by increasing `|ζ_i|`.
    pub poles: Vec<f64>,
    pub weights: Vec<f64>,
    pub form: RationalForm,
    /// `max |f - r|` over the interval.
    pub error_bound: f64,
    /// `max |f - r| / |f|` when known from equioscillation, else `error_bound / min f`.
    pub relative_error_bound: f64,
    pub bounds: SpectralBounds,
}

impl RationalApproximation {
    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    /// Pole closest to the spectrum, which sets the hardest shifted system.
    pub fn smallest_pole(&self) -> f64 {
        self.poles.first().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, z: f64) -> f64 {
        let arg = match self.form {
            RationalForm::First => z,
            RationalForm::Second => z * z,
        };
        self.poles
            .iter()
            .zip(&self.weights)
            .map(|(&zeta, &w)| w / (arg - zeta))
            .sum()
    }

    /// `max |f(z) - r(z)|` over `samples` log-spaced points.
    pub fn sampled_error(&self, f: &StieltjesFunction, samples: usize) -> f64 {
        log_grid(self.bounds, samples)
            .map(|z| (f.eval(z) - self.eval(z)).abs())
            .fold(0.0, f64::max)
    }

    /// `max |f(z) - r(z)| / |f(z)|` over `samples` log-spaced points.
    pub fn sampled_relative_error(&self, f: &StieltjesFunction, samples: usize) -> f64 {
        log_grid(self.bounds, samples)
            .map(|z| ((f.eval(z) - self.eval(z)) / f.eval(z)).abs())
            .fold(0.0, f64::max)
    }

    fn sort_by_distance(&mut self) {
        let mut pairs: Vec<(f64, f64)> = self.poles.iter().copied().zip(self.weights.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()));
        self.poles = pairs.iter().map(|p| p.0).collect();
        self.weights = pairs.iter().map(|p| p.1).collect();
    }
}

fn log_grid(bounds: SpectralBounds, samples: usize) -> impl Iterator<Item = f64> {
    let (lo, hi) = (bounds.lambda_min.ln(), bounds.lambda_max.ln());
    let n = samples.max(2);
    (0..n).map(move |i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
}

/// Zolotarev's best relative approximation of `z^{-1/2}` of type `(p-1, p)`.
///
/// On `s = z/λmin ∈ [1, κ]` with `c_l = sc²(lK/(2p) | 1 - 1/κ)`:
/// `h(s) = √s Π(s + c_{2j}) / Π(s + c_{2j-1})` equioscillates, and
/// `r = d · h / √s` with `d = 2/(max h + min h)` has relative error
/// `(max h - min h)/(max h + min h)`.
pub fn zolotarev_inv_sqrt(bounds: SpectralBounds, p: usize) -> Result<RationalApproximation> {
    if p == 0 {
        return Err(KrylovError::invalid("p", "need at least one pole"));
    }
    let kappa = bounds.kappa();
    let lmin = bounds.lambda_min;
    let m1 = 1.0 / kappa;
    let k = complete_k(m1)?;
    let c: Vec<f64> = (1..2 * p)
        .map(|l| sc_squared(l as f64 * k / (2 * p) as f64, m1))
        .collect::<Result<_>>()?;
    let den: Vec<f64> = c.iter().step_by(2).copied().collect();
    let num: Vec<f64> = c.iter().skip(1).step_by(2).copied().collect();
    if c.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(KrylovError::Elliptic(format!(
            "pole count {p} exceeds floating-point range"
        )));
    }
    let h = |s: f64| -> f64 {
        let mut acc = s.sqrt() / (s + den[p - 1]);
        for (n, d) in num.iter().zip(&den) {
            acc *= (s + n) / (s + d);
        }
        acc
    };
    let (h_min, h_max) = extreme_values(h, 1.0, kappa);
    let d = 2.0 / (h_max + h_min);
    let rel = (h_max - h_min) / (h_max + h_min);
    // Residue of d Π(s + num)/Π(s + den) at s = -den_i, as a product of ratios.
    let scale = lmin / lmin.sqrt();
    let mut poles = Vec::with_capacity(p);
    let mut weights = Vec::with_capacity(p);
    for (i, &di) in den.iter().enumerate() {
        let others = den.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v);
        let mut res = d;
        for (n, dj) in num.iter().zip(others) {
            res *= (n - di) / (dj - di);
        }
        poles.push(-lmin * di);
        weights.push(res * scale);
    }
    let mut approx = RationalApproximation {
        poles,
        weights,
        form: RationalForm::First,
        error_bound: rel / lmin.sqrt(),
        relative_error_bound: rel,
        bounds,
    };
    approx.sort_by_distance();
    Ok(approx)
}

/// `(min, max)` of a smooth function on `[a, b]`, from log-spaced samples
/// refined by golden-section search around every interior local extremum.
fn extreme_values(h: impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    if b <= a {
        let v = h(a);
        return (v, v);
    }
    const SAMPLES: usize = 4096;
    let (la, lb) = (a.ln(), b.ln());
    let at = |u: f64| h(u.exp());
    let us: Vec<f64> = (0..SAMPLES)
        .map(|i| la + (lb - la) * i as f64 / (SAMPLES - 1) as f64)
        .collect();
    let vs: Vec<f64> = us.iter().map(|&u| at(u)).collect();
    let mut lo = vs[0].min(vs[SAMPLES - 1]);
    let mut hi = vs[0].max(vs[SAMPLES - 1]);
    for i in 1..SAMPLES - 1 {
        let is_max = vs[i] >= vs[i - 1] && vs[i] >= vs[i + 1];
        let is_min = vs[i] <= vs[i - 1] && vs[i] <= vs[i + 1];
        if is_max {
            hi = hi.max(golden_extremum(&at, us[i - 1], us[i + 1], 1.0));
        }
        if is_min {
            lo = lo.min(golden_extremum(&at, us[i - 1], us[i + 1], -1.0));
        }
    }
    (lo, hi)
}

/// Value of the maximum (`sense = 1`) or minimum (`sense = -1`) on `[a, b]`.
fn golden_extremum(h: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, sense: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (sense * h(x1), sense * h(x2));
    for _ in 0..80 {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = sense * h(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = sense * h(x2);
        }
    }
    sense * f1.max(f2)
}

/// Rational approximation with `p` poles for any built-in Stieltjes function.
///
/// `z^{-1/2}` uses Zolotarev; the resolvent is exact with one pole; other
/// functions use a `p`-point Gauss rule on the measure, with the error
/// bound taken from dense sampling.
pub fn rational_approximation(
    bounds: SpectralBounds,
    f: &StieltjesFunction,
    p: usize,
) -> Result<RationalApproximation> {
    if p == 0 {
        return Err(KrylovError::invalid("p", "need at least one pole"));
    }
    match *f {
        StieltjesFunction::InvPower { alpha: 0.5 } => zolotarev_inv_sqrt(bounds, p),
        _ => {
            let rule = f.node_rule(p, bounds.geometric_mean());
            let mut approx = RationalApproximation {
                poles: rule.iter().map(|&(t, _)| -t).collect(),
                weights: rule.iter().map(|&(_, w)| w).collect(),
                form: RationalForm::First,
                error_bound: 0.0,
                relative_error_bound: 0.0,
                bounds,
            };
            if !matches!(f, StieltjesFunction::Resolvent { .. }) {
                // Sampling misses at most a sliver between samples; pad by 1%.
                approx.error_bound = 1.01 * approx.sampled_error(f, VERIFICATION_SAMPLES);
                approx.relative_error_bound = approx.error_bound / f.eval(bounds.lambda_max);
            }
            approx.sort_by_distance();
            Ok(approx)
        }
    }
}

/// Smallest `p` whose uniform error is at most `delta_target`.
pub fn min_poles_for_tolerance(bounds: SpectralBounds, f: &StieltjesFunction, delta_target: f64) -> Result<usize> {
    if !(delta_target > 0.0) {
        return Err(KrylovError::invalid("delta_target", "must be positive"));
    }
    let mut best = f64::INFINITY;
    for p in 1..=MAX_POLES {
        let approx = rational_approximation(bounds, f, p)?;
        if approx.error_bound <= delta_target {
            return Ok(p);
        }
        best = best.min(approx.error_bound);
    }
    Err(KrylovError::NotConverged {
        method: "pole count search",
        iterations: MAX_POLES,
        best,
    })
}

/// Absolute residual tolerances with `Σ |ω_i| ‖r_i‖ / (λmin - ζ_i) <= ε/2`.
pub fn residual_tolerances(approx: &RationalApproximation, bounds: SpectralBounds, eps: f64) -> Vec<f64> {
    let p = approx.len() as f64;
    approx
        .poles
        .iter()
        .zip(&approx.weights)
        .map(|(&zeta, &w)| eps * (bounds.lambda_min - zeta) / (2.0 * p * w.abs()))
        .collect()
}

/// Knobs of [`multishift_cg`].
#[derive(Debug, Clone)]
pub struct MultishiftOptions {
    pub max_iter: usize,
    /// Accumulate `Σ ω_i x_i` directly instead of storing every `x_i`.
    pub combine_weights: Option<Vec<f64>>,
}

impl Default for MultishiftOptions {
    fn default() -> Self {
        MultishiftOptions {
            max_iter: 100_000,
            combine_weights: None,
        }
    }
}

/// Output of [`multishift_cg`].
#[derive(Debug, Clone)]
pub struct MultishiftOutcome {
    /// One iterate per shift, or a single combined vector.
    pub solutions: Vec<Vec<f64>>,
    /// `ζ^{(i)}_k` with `r_i = ζ^{(i)}_k r_seed` at exit (or at freezing).
    pub residual_scalars: Vec<f64>,
    pub seed_residual: Vec<f64>,
    pub seed_index: usize,
    /// Iteration at which each system was frozen.
    pub frozen_at: Vec<Option<usize>>,
    /// Active non-seed systems in every iteration.
    pub active_shifted_systems: Vec<usize>,
    pub converged: bool,
}

type StopCheck<'a> = &'a mut dyn FnMut(usize, &MultishiftState) -> bool;

/// Per-iteration view handed to the stop check.
pub struct MultishiftState<'a> {
    iterates: &'a [Vec<f64>],
    weights: Option<&'a [f64]>,
}

impl MultishiftState<'_> {
    /// `Σ ω_i x_i` for the given weights (or the stored combination).
    pub fn combination(&self, weights: &[f64]) -> Vec<f64> {
        if self.weights.is_some() {
            return self.iterates[0].clone();
        }
        let n = self.iterates.first().map_or(0, Vec::len);
        let mut out = vec![0.0; n];
        for (x, &w) in self.iterates.iter().zip(weights) {
            axpy(w, x, &mut out);
        }
        out
    }
}

/// Solves `(A - ζ_i I) x_i = b` for all shifts with one matvec per iteration.
///
/// The seed is the algebraically largest shift (the worst-conditioned
/// system); system `i` is the seed plus `δ_i = ζ_seed - ζ_i >= 0`.
/// Systems are frozen once `‖r_i‖ <= tols[i]`.
pub fn multishift_cg<A: LinearOperator + ?Sized>(
    op: &A,
    b: &[f64],
    shifts: &[f64],
    tols: &[f64],
    options: &MultishiftOptions,
) -> Result<MultishiftOutcome> {
    run_multishift(op, b, shifts, tols, options, None)
}

fn run_multishift<A: LinearOperator + ?Sized>(
    op: &A,
    b: &[f64],
    shifts: &[f64],
    tols: &[f64],
    options: &MultishiftOptions,
    mut stop_check: Option<StopCheck<'_>>,
) -> Result<MultishiftOutcome> {
    let n = op.dim();
    if b.len() != n {
        return Err(KrylovError::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    if shifts.is_empty() || shifts.len() != tols.len() {
        return Err(KrylovError::invalid("shifts", "need one tolerance per shift"));
    }
    if let Some(w) = &options.combine_weights {
        if w.len() != shifts.len() {
            return Err(KrylovError::invalid("combine_weights", "need one weight per shift"));
        }
    }
    let ns = shifts.len();
    let seed = (0..ns).max_by(|&i, &j| shifts[i].total_cmp(&shifts[j])).unwrap_or(0);
    let zeta_seed = shifts[seed];
    let delta: Vec<f64> = shifts.iter().map(|&z| zeta_seed - z).collect();
    let combined = options.combine_weights.as_deref();

    let mut iterates = match combined {
        Some(_) => vec![vec![0.0; n]],
        None => vec![vec![0.0; n]; ns],
    };
    let mut r = b.to_vec();
    let mut dirs = vec![b.to_vec(); ns];
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let mut zeta = vec![1.0; ns];
    let mut zeta_prev = vec![1.0; ns];
    let mut alpha_prev = 1.0;
    let mut beta_prev = 0.0;
    let mut active: Vec<bool> = (0..ns).map(|i| rr.sqrt() > tols[i]).collect();
    let mut frozen_at: Vec<Option<usize>> = active.iter().map(|&a| (!a).then_some(0)).collect();
    let mut frozen_scalars = vec![f64::NAN; ns];
    let mut active_history = Vec::new();
    let mut k = 0;
    let mut stopped = false;

    while active.iter().any(|&a| a) && k < options.max_iter {
        // Seed step on A - ζ_seed I, direction = dirs[seed].
        op.apply_into(&dirs[seed], &mut ap)?;
        axpy(-zeta_seed, &dirs[seed], &mut ap);
        let curvature = dot(&dirs[seed], &ap);
        if !(curvature > 0.0) {
            return Err(KrylovError::NegativeCurvature {
                shift: zeta_seed,
                curvature,
            });
        }
        let alpha = rr / curvature;
        active_history.push((0..ns).filter(|&i| i != seed && active[i]).count());

        let mut zeta_next = zeta.clone();
        for i in 0..ns {
            if !active[i] {
                continue;
            }
            let zn = if i == seed {
                1.0
            } else {
                let denom =
                    alpha_prev * zeta_prev[i] * (1.0 + alpha * delta[i]) + alpha * beta_prev * (zeta_prev[i] - zeta[i]);
                zeta[i] * zeta_prev[i] * alpha_prev / denom
            };
            let alpha_i = alpha * zn / zeta[i];
            match combined {
                Some(w) => axpy(w[i] * alpha_i, &dirs[i], &mut iterates[0]),
                None => axpy(alpha_i, &dirs[i], &mut iterates[i]),
            }
            zeta_next[i] = zn;
        }
        axpy(-alpha, &ap, &mut r);
        let rr_next = dot(&r, &r);
        let beta = rr_next / rr;
        let rnorm = rr_next.sqrt();
        for i in 0..ns {
            if !active[i] {
                continue;
            }
            let ratio = zeta_next[i] / zeta[i];
            let beta_i = beta * ratio * ratio;
            let zn = zeta_next[i];
            for (d, &ri) in dirs[i].iter_mut().zip(&r) {
                *d = zn * ri + beta_i * *d;
            }
            zeta_prev[i] = zeta[i];
            zeta[i] = zn;
            if zn.abs() * rnorm <= tols[i] || !zn.is_finite() || zn == 0.0 {
                active[i] = false;
                frozen_at[i] = Some(k + 1);
                frozen_scalars[i] = zn;
            }
        }
        // The seed recurrence must run while any system is active.
        if !active[seed] && active.iter().any(|&a| a) {
            let seed_dir = &mut dirs[seed];
            for (d, &ri) in seed_dir.iter_mut().zip(&r) {
                *d = ri + beta * *d;
            }
        }
        rr = rr_next;
        alpha_prev = alpha;
        beta_prev = beta;
        k += 1;
        if let Some(check) = stop_check.as_mut() {
            let view = MultishiftState {
                iterates: &iterates,
                weights: combined,
            };
            if check(k, &view) {
                stopped = true;
                break;
            }
        }
        if rr == 0.0 {
            break;
        }
    }
    let converged = stopped || !active.iter().any(|&a| a);
    let residual_scalars = (0..ns)
        .map(|i| {
            if frozen_scalars[i].is_nan() {
                zeta[i]
            } else {
                frozen_scalars[i]
            }
        })
        .collect();
    Ok(MultishiftOutcome {
        solutions: iterates,
        residual_scalars,
        seed_residual: r,
        seed_index: seed,
        frozen_at,
        active_shifted_systems: active_history,
        converged,
    })
}

/// Knobs of [`mscg_fab`].
#[derive(Debug, Clone, Default)]
pub struct MscgOptions {
    /// Fixed pole count; `None` picks the smallest meeting `ε/2`.
    pub poles: Option<usize>,
    /// Keep one combined iterate instead of one per shift.
    pub single_vector: bool,
    pub max_iter: Option<usize>,
}

/// `f(A) b ≈ Σ ω_i x_i` with `x_i` from multi-shift CG.
///
/// `ε = tol · ‖f(A)b‖`, the norm taken from the oracle reference when there
/// is one and from the lower bound `f(λmax)‖b‖` otherwise. The rational
/// error and the solve error each get `ε/2`. With an oracle, iteration also
/// stops as soon as the combined iterate meets the tolerance.
pub fn mscg_fab<A: LinearOperator + ?Sized>(
    op: &A,
    f: &StieltjesFunction,
    b: &[f64],
    stopping: &Stopping,
    bounds: SpectralBounds,
    options: &MscgOptions,
) -> Result<(Vec<f64>, MethodReport)> {
    let norm_b = norm2(b);
    if !(norm_b > 0.0) {
        return Err(KrylovError::invalid("b", "must be nonzero"));
    }
    let eps = stopping.abs_tol(f.eval(bounds.lambda_max) * norm_b);
    let p = match options.poles {
        Some(p) => p,
        None => min_poles_for_tolerance(bounds, f, eps / (2.0 * norm_b))?,
    };
    let approx = rational_approximation(bounds, f, p)?;
    let tols = residual_tolerances(&approx, bounds, eps);
    let ms_options = MultishiftOptions {
        max_iter: options.max_iter.unwrap_or(100_000),
        combine_weights: options.single_vector.then(|| approx.weights.clone()),
    };
    let count0 = op.matvec_count();
    let mut history = Vec::new();
    let outcome = match stopping {
        Stopping::Oracle { reference, rel_tol } => {
            let mut check = |_: usize, state: &MultishiftState| {
                let err = relative_error(&state.combination(&approx.weights), reference);
                history.push(err);
                err <= *rel_tol
            };
            run_multishift(op, b, &approx.poles, &tols, &ms_options, Some(&mut check))?
        }
        Stopping::Estimate { .. } => run_multishift(op, b, &approx.poles, &tols, &ms_options, None)?,
    };
    if !outcome.converged {
        return Err(KrylovError::NotConverged {
            method: "multi-shift CG",
            iterations: outcome.active_shifted_systems.len(),
            best: history.iter().copied().fold(f64::INFINITY, f64::min),
        });
    }
    let result = if options.single_vector {
        outcome.solutions[0].clone()
    } else {
        let mut out = vec![0.0; b.len()];
        for (x, &w) in outcome.solutions.iter().zip(&approx.weights) {
            axpy(w, x, &mut out);
        }
        out
    };

    let iterations = outcome.active_shifted_systems.len();
    let mut report = MethodReport::new("mscg");
    report.iterations = iterations;
    report.matvecs = op.matvec_count() - count0;
    report.vector_ops =
        12.0 * iterations as f64 + 5.0 * outcome.active_shifted_systems.iter().sum::<usize>() as f64 + (p as f64 - 1.0);
    // Directions, iterates (or one combination), residual, A p, result.
    report.peak_vectors = if options.single_vector { p + 3 } else { 2 * p + 3 };
    report.poles = p;
    report.active_shifted_systems = outcome.active_shifted_systems;
    let scale = eps / stopping.rel_tol();
    report.estimated_error = approx.error_bound * norm_b / scale + stopping.rel_tol() / 2.0;
    report.relative_error = stopping.reference().map(|r| relative_error(&result, r));
    report.history = history;
    report.converged = true;
    Ok((result, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::DiagonalOperator;
    use approx::assert_relative_eq;

    fn table2() -> SpectralBounds {
        SpectralBounds::new(0.1, 200.1).unwrap()
    }

    #[test]
    fn zolotarev_bound_holds_on_dense_samples() {
        let f = StieltjesFunction::inv_sqrt();
        for p in [1, 3, 9, 15] {
            let r = zolotarev_inv_sqrt(table2(), p).unwrap();
            assert!(r.poles.iter().all(|&z| z < 0.0));
            let sampled = r.sampled_relative_error(&f, VERIFICATION_SAMPLES);
            assert!(sampled <= r.relative_error_bound * (1.0 + 1e-8), "p={p}");
            // Equioscillation: the sampled maximum is essentially attained.
            assert!(sampled >= 0.999 * r.relative_error_bound, "p={p}");
        }
    }

    #[test]
    fn narrow_interval_single_pole_is_nearly_exact() {
        let mut prev = f64::INFINITY;
        for w in [1.0, 0.1, 0.01] {
            let r = zolotarev_inv_sqrt(SpectralBounds::new(1.0, 1.0 + w).unwrap(), 1).unwrap();
            assert!(r.error_bound < prev);
            prev = r.error_bound;
        }
        assert!(prev < 1e-5);
    }

    #[test]
    fn pole_count_monotone_in_target() {
        let f = StieltjesFunction::inv_sqrt();
        let mut last = 0;
        for k in 1..8 {
            let p = min_poles_for_tolerance(table2(), &f, 10f64.powi(-k)).unwrap();
            assert!(p >= last);
            last = p;
        }
        assert_eq!(min_poles_for_tolerance(table2(), &f, 10.0).unwrap(), 1);
    }

    #[test]
    fn single_zero_shift_is_plain_cg() {
        let op = DiagonalOperator::new((1..=30).map(f64::from).collect()).unwrap();
        let b = vec![1.0; 30];
        let ms = multishift_cg(&op, &b, &[0.0], &[1e-10], &MultishiftOptions::default()).unwrap();
        let cg = crate::cg::conjugate_gradient(&op, &b, 1e-10, 1000, None).unwrap();
        assert_relative_eq!(relative_error(&ms.solutions[0], &cg.solution), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn resolvent_is_exact_with_one_pole() {
        let f = StieltjesFunction::resolvent(1.0).unwrap();
        let r = rational_approximation(table2(), &f, 7).unwrap();
        assert_eq!(r.poles, vec![-1.0]);
        assert_eq!(r.error_bound, 0.0);
    }

    #[test]
    fn fallback_rule_converges_for_log() {
        let f = StieltjesFunction::log1p_over_z();
        let e8 = rational_approximation(table2(), &f, 8).unwrap().error_bound;
        let e16 = rational_approximation(table2(), &f, 16).unwrap().error_bound;
        let e32 = rational_approximation(table2(), &f, 32).unwrap().error_bound;
        assert!(e16 < 0.1 * e8 && e32 < 0.1 * e16);
        assert!(e32 < 1e-7);
    }

    #[test]
    fn positive_shift_beyond_spectrum_is_rejected() {
        let op = DiagonalOperator::new(vec![1.0, 2.0, 3.0]).unwrap();
        let r = multishift_cg(&op, &[1.0; 3], &[5.0], &[1e-12], &MultishiftOptions::default());
        assert!(matches!(r, Err(KrylovError::NegativeCurvature { .. })));
    }
}
