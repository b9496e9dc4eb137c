//! Restarted Lanczos for Stieltjes functions.
//!
//! After `M` total steps the error is `e_M(A) v_{M+1}` with
//! `e_M(z) = (-1)^M ‖b‖ γ_M ∫ 1/w_M(t) · 1/(z + t) dμ(t)`,
//! `w_M(t) = Π (t + θ_i)` over every Ritz value of every cycle and
//! `γ_M = Π β_{i+1}`. Each cycle approximates that error by Lanczos on
//! `v_{M+1}` and adds the result.

use crate::error::{KrylovError, Result};
use crate::lanczos::{alpha_m, coefficients_from_eigen, lanczos_error_bound, lanczos_extend, LanczosDecomposition};
use crate::linalg::{axpy, norm2, relative_error};
use crate::operators::LinearOperator;
use crate::report::{MethodReport, Stopping};
use crate::stieltjes::StieltjesFunction;
use crate::tridiag::TridiagonalEigen;

/// Tightest relative tolerance requested from the error-function quadrature.
const QUADRATURE_TOL_FLOOR: f64 = 1e-12;
/// Bound on `|ln(t + θ)|` over quadrature nodes and Ritz values.
const LOG_MAGNITUDE: f64 = 40.0;
/// Quadrature is asked for at least this multiple of the weight rounding.
const QUADRATURE_NOISE_MARGIN: f64 = 10.0;

/// Everything carried from one cycle to the next.
#[derive(Debug, Clone)]
pub struct RestartState {
    pub cycle: usize,
    pub restart_length: usize,
    pub approximation: Vec<f64>,
    /// `θ_1 … θ_M` over all finished cycles.
    ritz_values: Vec<f64>,
    log_gamma: f64,
    norm_b: f64,
    /// `v_{M+1}`, unit norm.
    start: Vec<f64>,
}

impl RestartState {
    pub fn new(b: &[f64], restart_length: usize) -> Result<Self> {
        if restart_length == 0 {
            return Err(KrylovError::invalid("restart_length", "must be at least 1"));
        }
        let norm_b = norm2(b);
        if !(norm_b > 0.0) {
            return Err(KrylovError::invalid("b", "must be nonzero"));
        }
        Ok(RestartState {
            cycle: 0,
            restart_length,
            approximation: vec![0.0; b.len()],
            ritz_values: Vec::new(),
            log_gamma: 0.0,
            norm_b,
            start: b.iter().map(|x| x / norm_b).collect(),
        })
    }

    /// Total Lanczos steps `M` so far.
    pub fn total_steps(&self) -> usize {
        self.ritz_values.len()
    }

    pub fn ritz_values(&self) -> &[f64] {
        &self.ritz_values
    }

    pub fn log_gamma(&self) -> f64 {
        self.log_gamma
    }

    pub fn start_vector(&self) -> &[f64] {
        &self.start
    }

    /// `(-1)^M`, with `β > 0` throughout.
    pub fn sign(&self) -> f64 {
        if self.total_steps().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Relative rounding of `exp(log_weight(t))`: the exponent sums `M`
    /// logarithms, each up to `LOG_MAGNITUDE` on the quadrature nodes.
    fn weight_rounding(&self) -> f64 {
        f64::EPSILON * (self.log_gamma.abs() + LOG_MAGNITUDE * self.total_steps() as f64)
    }

    /// `ln(‖b‖ γ_M / w_M(t))`.
    fn log_weight(&self, t: f64) -> f64 {
        let log_w: f64 = self.ritz_values.iter().map(|&theta| (t + theta).ln()).sum();
        self.norm_b.ln() + self.log_gamma - log_w
    }

    /// Scalar error function `e_M(z)`.
    pub fn error_function(&self, f: &StieltjesFunction, z: f64, tol: f64) -> Result<f64> {
        let sign = self.sign();
        f.integrate_measure(|t| sign * self.log_weight(t).exp() / (z + t), tol)
    }

    /// `e_M(T) e_1` for the new cycle's `T = Q Θ Q^T`.
    ///
    /// With no finished cycle this is `‖b‖ f(T) e_1`.
    pub fn error_function_apply(&self, f: &StieltjesFunction, eig: &TridiagonalEigen, tol: f64) -> Result<Vec<f64>> {
        if self.ritz_values.is_empty() {
            return coefficients_from_eigen(eig, f, self.norm_b);
        }
        if let Some(&bad) = self.ritz_values.iter().find(|&&theta| !(theta > 0.0)) {
            return Err(KrylovError::NonPositiveRitzValue { value: bad });
        }
        let min = eig.min_value();
        if !(min > 0.0) {
            return Err(KrylovError::NonPositiveRitzValue { value: min });
        }
        let sign = self.sign();
        let theta = eig.values();
        let q1 = eig.first_row();
        // (T + tI)^{-1} e_1 = Q diag(1/(θ_j + t)) Q^T e_1, integrated per eigen-index.
        let mut z = f.integrate_measure_vec(
            theta.len(),
            |t, out| {
                let w = sign * self.log_weight(t).exp();
                for ((o, &th), &q) in out.iter_mut().zip(theta).zip(q1) {
                    *o = w * q / (th + t);
                }
            },
            tol,
        )?;
        eig.apply_q(&mut z);
        Ok(z)
    }

    /// Runs one cycle of `restart_length` plain Lanczos steps from `v_{M+1}`
    /// and adds `V e_M(T) e_1` to the approximation. Returns the norm of the
    /// update and whether an invariant subspace was hit.
    pub fn advance<A: LinearOperator + ?Sized>(
        &mut self,
        op: &A,
        f: &StieltjesFunction,
        quad_tol: f64,
    ) -> Result<(f64, bool)> {
        let mut dec = LanczosDecomposition::new_plain_recurrence(&self.start)?;
        lanczos_extend(op, &mut dec, self.restart_length)?;
        let eig = dec.eigen()?;
        let quad_tol = quad_tol.max(QUADRATURE_NOISE_MARGIN * self.weight_rounding());
        let y = self.error_function_apply(f, &eig, quad_tol)?;
        for (v, &c) in dec.basis().unwrap_or(&[]).iter().zip(&y) {
            axpy(c, v, &mut self.approximation);
        }
        self.absorb(&eig, &dec);
        Ok((norm2(&y), dec.is_invariant()))
    }

    /// Folds a finished cycle into the state.
    fn absorb(&mut self, eig: &TridiagonalEigen, dec: &LanczosDecomposition) {
        self.ritz_values.extend_from_slice(eig.values());
        self.log_gamma += dec.log_gamma();
        self.start = dec.next_vector().to_vec();
        self.cycle += 1;
    }
}

/// Restarted Lanczos with restart length `m_re`; `matvecs = cycles · m_re`.
pub fn restarted_lanczos_fab<A: LinearOperator + ?Sized>(
    op: &A,
    f: &StieltjesFunction,
    b: &[f64],
    m_re: usize,
    stopping: &Stopping,
    max_cycles: usize,
) -> Result<(Vec<f64>, MethodReport)> {
    let n = op.dim();
    if b.len() != n {
        return Err(KrylovError::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    if max_cycles == 0 {
        return Err(KrylovError::invalid("max_cycles", "must be at least 1"));
    }
    let mut state = RestartState::new(b, m_re)?;
    let bounds = op.spectral_bounds();
    // Quadrature error is relative to each update, and the updates shrink
    // with the error; below the floor the rule asks for more than
    // double-precision quadrature can give.
    let quad_tol = (stopping.rel_tol() / (10.0 * max_cycles as f64)).max(QUADRATURE_TOL_FLOOR);
    let ratio = bounds.map(|bd| alpha_m(bd, f.support_start(), m_re as f64));
    let count0 = op.matvec_count();
    let mut report = MethodReport::new("restarted");
    // Basis, the recurrence's next and work vectors, the running approximation.
    report.peak_vectors = m_re.min(n) + 3;
    let mut best = f64::INFINITY;

    while state.cycle < max_cycles {
        let steps_before = state.total_steps();
        let (update, invariant) = state.advance(op, f, quad_tol)?;
        let steps = state.total_steps() - steps_before;
        report.vector_ops += 9.0 * steps as f64 + 2.0 * m_re as f64;

        let err = match stopping {
            Stopping::Oracle { reference, .. } => relative_error(&state.approximation, reference),
            Stopping::Estimate { .. } => {
                let scale = norm2(&state.approximation);
                // Next error ≈ update · ρ; the tail of a geometric series at rate ρ.
                let mut est = match ratio {
                    Some(rho) if rho < 1.0 => update * rho / (1.0 - rho),
                    _ => update,
                };
                if let Some(bd) = bounds {
                    let guard = lanczos_error_bound(bd, f, 0, state.norm_b)
                        * ratio.unwrap_or(1.0).powi(state.cycle as i32)
                        / bd.lambda_min.sqrt();
                    est = est.min(guard);
                }
                est / scale
            }
        };
        report.history.push(err);
        best = best.min(err);
        if err <= stopping.rel_tol() || invariant {
            report.cycles = state.cycle;
            report.iterations = state.total_steps();
            report.matvecs = op.matvec_count() - count0;
            report.estimated_error = err;
            report.relative_error = stopping.reference().map(|r| relative_error(&state.approximation, r));
            report.converged = true;
            return Ok((state.approximation, report));
        }
    }
    Err(KrylovError::NotConverged {
        method: "restarted Lanczos",
        iterations: state.cycle,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lanczos::lanczos_fab;
    use crate::operators::{make_diagonal_chebyshev, normalized_ones, DiagonalOperator, SpectralBounds};

    #[test]
    fn first_cycle_is_plain_lanczos() {
        let bounds = SpectralBounds::new(0.5, 40.0).unwrap();
        let op = make_diagonal_chebyshev(40, bounds).unwrap();
        let b = normalized_ones(40);
        let f = StieltjesFunction::inv_sqrt();
        let reference = op.exact_function_times(&f, &b);
        let stop = Stopping::Oracle {
            reference,
            rel_tol: 1.0,
        };
        let (x, report) = restarted_lanczos_fab(&op, &f, &b, 10, &stop, 3).unwrap();
        assert_eq!(report.cycles, 1);
        let y = lanczos_fab(&DiagonalOperator::new(op.diagonal().to_vec()).unwrap(), &f, &b, 10).unwrap();
        assert!(relative_error(&x, &y) < 1e-13);
    }

    #[test]
    fn log_weight_stays_finite_for_long_histories() {
        let mut state = RestartState::new(&[1.0, 0.0], 1).unwrap();
        state.ritz_values = (0..200).map(|i| 0.1 + i as f64).collect();
        state.log_gamma = 200.0 * 50f64.ln();
        let w = state.log_weight(0.0);
        assert!(w.is_finite());
        let e = state.error_function(&StieltjesFunction::inv_sqrt(), 1.0, 1e-8).unwrap();
        assert!(e.is_finite());
    }

    #[test]
    fn rejects_zero_restart_length() {
        assert!(RestartState::new(&[1.0], 0).is_err());
    }
}
