//! Shift-and-invert Lanczos with inexact CG solves.
//!
//! `g(y) = f(1/y + ξ)` satisfies `g(B) = f(A)` for `B = (A - ξI)^{-1}`, and
//! `g(y) = y h(y)` with `h(y) = ∫ dμ(t) / (1 + (ξ + t) y)`. The corrected
//! approximation integrates the Galerkin solutions `x_m(t)` of
//! `(I + (ξ + t)B) x = b` after one more multiplication by `B`:
//! `ĝ_m = ‖b‖ V_m g(H_m) e_1 + ‖b‖ h_{m+1,m} (e_m^T h(H_m) e_1) v_{m+1}`.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{em_norm_bound, optimal_shift, InnerSolveConfig};
use crate::cg::conjugate_gradient;
use crate::error::{KrylovError, Result};
use crate::linalg::{axpy, dot, norm2, relative_error, solve_hessenberg_shifted};
use crate::operators::{LinearOperator, ShiftedOperator, SpectralBounds};
use crate::predict::{convergence_factor, FactorKind};
use crate::report::{MethodReport, Stopping};
use crate::stieltjes::StieltjesFunction;

/// Relative asymmetry of `H_m` below which the eigen route is used.
const SYMMETRY_TOL: f64 = 1e-12;

/// Arnoldi decomposition `B̃ V_m = V_{m+1} H̲_m` with `B̃` the inexact inverse.
#[derive(Debug, Clone)]
pub struct InexactDecomposition {
    shift: f64,
    norm_b: f64,
    /// `v_1 … v_{m+1}`.
    basis: Vec<Vec<f64>>,
    /// Column `j` holds `h_{1,j} … h_{j+1,j}`.
    columns: Vec<Vec<f64>>,
    residual_norms: Vec<f64>,
    inner_iterations: Vec<usize>,
    /// `‖B‖ = 1/(λmin - ξ)`.
    norm_b_op: f64,
    em_bounds: Vec<f64>,
    invariant: bool,
}

impl InexactDecomposition {
    pub fn new(b: &[f64], shift: f64, bounds: SpectralBounds) -> Result<Self> {
        let norm_b = norm2(b);
        if !(norm_b > 0.0) {
            return Err(KrylovError::invalid("b", "must be nonzero"));
        }
        if !(shift < bounds.lambda_min) {
            return Err(KrylovError::invalid("shift", "A - ξI must be positive definite"));
        }
        Ok(InexactDecomposition {
            shift,
            norm_b,
            basis: vec![b.iter().map(|x| x / norm_b).collect()],
            columns: Vec::new(),
            residual_norms: Vec::new(),
            inner_iterations: Vec::new(),
            norm_b_op: 1.0 / (bounds.lambda_min - shift),
            em_bounds: Vec::new(),
            invariant: false,
        })
    }

    pub fn order(&self) -> usize {
        self.columns.len()
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn residual_norms(&self) -> &[f64] {
        &self.residual_norms
    }

    pub fn inner_iterations(&self) -> &[usize] {
        &self.inner_iterations
    }

    /// Tracked `‖E_j‖` bound after every step.
    pub fn em_bounds(&self) -> &[f64] {
        &self.em_bounds
    }

    pub fn is_invariant(&self) -> bool {
        self.invariant
    }

    /// `h_{m+1,m}`.
    pub fn next_beta(&self) -> f64 {
        self.columns.last().and_then(|c| c.last().copied()).unwrap_or(0.0)
    }

    /// Square `H_m`, row-major.
    pub fn hessenberg(&self) -> Vec<Vec<f64>> {
        let m = self.order();
        let mut h = vec![vec![0.0; m]; m];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate().take(m) {
                h[i][j] = v;
            }
        }
        h
    }

    /// `max |H - H^T| / max |H|`.
    pub fn asymmetry(&self) -> f64 {
        let h = self.hessenberg();
        let m = h.len();
        let mut scale: f64 = 0.0;
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                scale = scale.max(h[i][j].abs());
                worst = worst.max((h[i][j] - h[j][i]).abs());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    /// One outer step: `w ≈ (A - ξI)^{-1} v_m` by CG to `tol`, then Arnoldi
    /// with two rounds of Gram-Schmidt.
    pub fn extend<A: LinearOperator + ?Sized>(&mut self, op: &A, tol: f64, max_inner: usize) -> Result<()> {
        if self.invariant {
            return Ok(());
        }
        let shifted = ShiftedOperator::new(op, self.shift);
        let v = self.basis.last().ok_or(KrylovError::RankLoss { dimension: 0 })?;
        let solve = conjugate_gradient(&shifted, v, tol, max_inner, None)?;
        self.residual_norms.push(solve.residual_norm);
        self.inner_iterations.push(solve.iterations);
        self.em_bounds.push(em_norm_bound(&self.residual_norms, self.norm_b_op));
        let mut w = solve.solution;
        let mut col = vec![0.0; self.basis.len() + 1];
        for _ in 0..2 {
            for (c, vi) in col.iter_mut().zip(&self.basis) {
                let h = dot(vi, &w);
                axpy(-h, vi, &mut w);
                *c += h;
            }
        }
        let beta = norm2(&w);
        let scale: f64 = col.iter().map(|c| c.abs()).sum::<f64>() + beta;
        let last = col.len() - 1;
        col[last] = beta;
        self.columns.push(col);
        if beta <= 1e-13 * scale || self.basis.len() == op.dim() {
            self.invariant = true;
            if let Some(c) = self.columns.last_mut() {
                c[last] = 0.0;
            }
            self.basis.push(vec![0.0; w.len()]);
        } else {
            w.iter_mut().for_each(|x| *x /= beta);
            self.basis.push(w);
        }
        Ok(())
    }

    /// `(g(H_m) e_1, h(H_m) e_1)`, by eigendecomposition when `H_m` is
    /// symmetric and by resolvent quadrature otherwise.
    fn function_columns(&self, f: &StieltjesFunction, quad_tol: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let h = self.hessenberg();
        let m = h.len();
        let xi = self.shift;
        if self.asymmetry() <= SYMMETRY_TOL {
            let dense = DMatrix::from_fn(m, m, |i, j| 0.5 * (h[i][j] + h[j][i]));
            let eig = SymmetricEigen::new(dense);
            let mut gcol = vec![0.0; m];
            let mut hcol = vec![0.0; m];
            for (k, &theta) in eig.eigenvalues.iter().enumerate() {
                if !(theta > 0.0 && 1.0 / theta + xi > 0.0) {
                    return Err(KrylovError::NonPositiveRitzValue {
                        value: 1.0 / theta + xi,
                    });
                }
                let g = f.eval(1.0 / theta + xi);
                let q1 = eig.eigenvectors[(0, k)];
                for i in 0..m {
                    let qi = eig.eigenvectors[(i, k)];
                    gcol[i] += qi * g * q1;
                    hcol[i] += qi * (g / theta) * q1;
                }
            }
            return Ok((gcol, hcol));
        }
        let mut e1 = vec![0.0; m];
        e1[0] = 1.0;
        let mut failure = None;
        let hcol = f.integrate_measure_vec(
            m,
            |t, out| match solve_hessenberg_shifted(&h, xi + t, &e1) {
                Ok(x) => out.copy_from_slice(&x),
                Err(e) => failure = Some(e),
            },
            quad_tol,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        let gcol = (0..m).map(|i| dot(&h[i], &hcol)).collect();
        Ok((gcol, hcol))
    }

    /// Coefficients of `v_1 … v_{m+1}` in the approximation; the last one is
    /// the correction term (zero for the standard approximation).
    pub fn coefficients(&self, f: &StieltjesFunction, corrected: bool, quad_tol: f64) -> Result<Vec<f64>> {
        let m = self.order();
        if m == 0 {
            return Ok(vec![0.0]);
        }
        let (gcol, hcol) = self.function_columns(f, quad_tol)?;
        let mut c: Vec<f64> = gcol.iter().map(|g| self.norm_b * g).collect();
        c.push(if corrected {
            self.norm_b * self.next_beta() * hcol[m - 1]
        } else {
            0.0
        });
        Ok(c)
    }

    /// `V_{m+1} c`.
    pub fn combine(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.basis[0].len()];
        for (v, &ci) in self.basis.iter().zip(c) {
            axpy(ci, v, &mut out);
        }
        out
    }
}

/// Options of [`si_lanczos_fab`].
#[derive(Debug, Clone)]
pub struct SiOptions {
    pub inner: InnerSolveConfig,
    /// Defaults to the optimal shift `-√(λmin λmax)`.
    pub shift: Option<f64>,
    /// Corrected approximation (default) or the plain `‖b‖ V_m g(H_m) e_1`.
    pub corrected: bool,
    pub max_outer: usize,
}

impl SiOptions {
    pub fn new(inner: InnerSolveConfig) -> Self {
        SiOptions {
            inner,
            shift: None,
            corrected: true,
            max_outer: 500,
        }
    }
}

/// Shift-and-invert Lanczos for `f(A) b` with inexact inner solves.
///
/// `matvecs` counts the inner CG products; `history` is the error (oracle)
/// or estimate per outer iteration.
pub fn si_lanczos_fab<A: LinearOperator + ?Sized>(
    op: &A,
    f: &StieltjesFunction,
    b: &[f64],
    stopping: &Stopping,
    bounds: SpectralBounds,
    options: &SiOptions,
) -> Result<(Vec<f64>, MethodReport)> {
    if b.len() != op.dim() {
        return Err(KrylovError::DimensionMismatch {
            expected: op.dim(),
            got: b.len(),
        });
    }
    let xi = options.shift.unwrap_or_else(|| optimal_shift(bounds));
    let mut dec = InexactDecomposition::new(b, xi, bounds)?;
    let rate = convergence_factor(FactorKind::ShiftInvertOrExtended, bounds, 0.0);
    let quad_tol = (stopping.rel_tol() * 1e-3).max(1e-13);
    let count0 = op.matvec_count();
    let mut report = MethodReport::new("si");
    let mut prev: Vec<f64> = Vec::new();
    let mut best = f64::INFINITY;

    for j in 1..=options.max_outer {
        dec.extend(op, options.inner.tolerance(j), options.inner.max_inner_iterations)?;
        let c = dec.coefficients(f, options.corrected, quad_tol)?;
        let (err, approx) = match stopping {
            Stopping::Oracle { reference, .. } => {
                let x = dec.combine(&c);
                (relative_error(&x, reference), Some(x))
            }
            Stopping::Estimate { .. } => {
                let diff: f64 = c
                    .iter()
                    .enumerate()
                    .map(|(i, ci)| (ci - prev.get(i).copied().unwrap_or(0.0)).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let tail = if rate > 0.0 && rate < 1.0 {
                    rate / (1.0 - rate)
                } else {
                    1.0
                };
                (diff * tail / norm2(&c), None)
            }
        };
        prev = c;
        report.history.push(err);
        best = best.min(err);
        if err <= stopping.rel_tol() || dec.is_invariant() {
            let x = approx.unwrap_or_else(|| dec.combine(&prev));
            report.iterations = dec.order();
            report.matvecs = op.matvec_count() - count0;
            report.inner_iterations = dec.inner_iterations().to_vec();
            report.perturbation_bounds = dec.em_bounds().to_vec();
            // Basis, the CG solution, residual, direction and product.
            report.peak_vectors = dec.basis().len() + 4;
            report.estimated_error = err;
            report.relative_error = stopping.reference().map(|r| relative_error(&x, r));
            report.converged = true;
            return Ok((x, report));
        }
    }
    Err(KrylovError::NotConverged {
        method: "shift-and-invert Lanczos",
        iterations: options.max_outer,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{make_diagonal_chebyshev, normalized_ones};

    #[test]
    fn exact_solves_keep_h_symmetric() {
        let bounds = SpectralBounds::new(0.5, 50.0).unwrap();
        let op = make_diagonal_chebyshev(40, bounds).unwrap();
        let mut dec = InexactDecomposition::new(&normalized_ones(40), optimal_shift(bounds), bounds).unwrap();
        for _ in 0..10 {
            dec.extend(&op, 1e-14, 1000).unwrap();
        }
        assert!(dec.asymmetry() < 1e-12);
    }

    #[test]
    fn full_space_is_exact() {
        let bounds = SpectralBounds::new(0.5, 50.0).unwrap();
        let op = make_diagonal_chebyshev(12, bounds).unwrap();
        let b = normalized_ones(12);
        let f = StieltjesFunction::inv_sqrt();
        let reference = op.exact_function_times(&f, &b);
        let mut dec = InexactDecomposition::new(&b, optimal_shift(bounds), bounds).unwrap();
        for _ in 0..12 {
            dec.extend(&op, 1e-15, 1000).unwrap();
        }
        let x = dec.combine(&dec.coefficients(&f, true, 1e-12).unwrap());
        assert!(relative_error(&x, &reference) < 1e-10);
    }

    #[test]
    fn resolvent_quadrature_matches_eigen_route_for_exact_solves() {
        use nalgebra::{DMatrix, SymmetricEigen};
        let bounds = SpectralBounds::new(0.1, 200.1).unwrap();
        let op = make_diagonal_chebyshev(200, bounds).unwrap();
        let b = normalized_ones(200);
        let f = StieltjesFunction::inv_sqrt();
        let xi = optimal_shift(bounds);
        let mut dec = InexactDecomposition::new(&b, xi, bounds).unwrap();
        for _ in 0..15 {
            dec.extend(&op, 1e-15, 10_000).unwrap();
        }
        let c = dec.coefficients(&f, false, 1e-13).unwrap();
        let h = dec.hessenberg();
        let m = dec.order();
        let sym = DMatrix::from_fn(m, m, |i, j| 0.5 * (h[i][j] + h[j][i]));
        let eig = SymmetricEigen::new(sym);
        // g(θ) = f(1/θ + ξ) on the Ritz values of (A - ξI)^{-1}.
        let mut expected = vec![0.0; m];
        for (k, &theta) in eig.eigenvalues.iter().enumerate() {
            let w = f.eval(1.0 / theta + xi) * eig.eigenvectors[(0, k)];
            for (i, e) in expected.iter_mut().enumerate() {
                *e += eig.eigenvectors[(i, k)] * w;
            }
        }
        let scale = expected.iter().map(|x| x * x).sum::<f64>().sqrt();
        let diff = c[..m]
            .iter()
            .zip(&expected)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(diff / scale < 1e-12, "{}", diff / scale);
    }
}
