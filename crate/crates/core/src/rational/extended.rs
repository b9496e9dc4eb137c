//! Extended Krylov method on `span{b, A^{-1}b, Ab, A^{-2}b, …}`.
//!
//! Each iteration adds `A v_{2m-1}` and `A^{-1} v_{2m}` (one CG solve), both
//! orthonormalized against the whole basis. The image `A v` of every basis
//! vector is kept, one matvec each, so `T = V^T A V` grows by one row and
//! column per vector and `A v_{2m-1}` costs nothing extra.

use nalgebra::{DMatrix, SymmetricEigen};

use super::InnerSolveConfig;
use crate::cg::conjugate_gradient;
use crate::error::{KrylovError, Result};
use crate::linalg::{axpy, dot, norm2, relative_error};
use crate::operators::{LinearOperator, SpectralBounds};
use crate::predict::{convergence_factor, FactorKind};
use crate::report::{MethodReport, Stopping};
use crate::stieltjes::StieltjesFunction;

/// Basis of the extended Krylov space with the images `A v_i`.
#[derive(Debug, Clone)]
pub struct ExtendedDecomposition {
    norm_b: f64,
    basis: Vec<Vec<f64>>,
    images: Vec<Vec<f64>>,
    /// Symmetric compression, row-major.
    compression: Vec<Vec<f64>>,
    inner_iterations: Vec<usize>,
    iterations: usize,
    invariant: bool,
}

impl ExtendedDecomposition {
    /// `span{b, A^{-1} b}`: one matvec and one solve to `tol`.
    pub fn new<A: LinearOperator + ?Sized>(op: &A, b: &[f64], tol: f64, max_inner: usize) -> Result<Self> {
        let norm_b = norm2(b);
        if !(norm_b > 0.0) {
            return Err(KrylovError::invalid("b", "must be nonzero"));
        }
        if b.len() != op.dim() {
            return Err(KrylovError::DimensionMismatch {
                expected: op.dim(),
                got: b.len(),
            });
        }
        let v1: Vec<f64> = b.iter().map(|x| x / norm_b).collect();
        let av1 = op.apply(&v1)?;
        let mut dec = ExtendedDecomposition {
            norm_b,
            basis: Vec::new(),
            images: Vec::new(),
            compression: Vec::new(),
            inner_iterations: Vec::new(),
            iterations: 1,
            invariant: false,
        };
        dec.push(v1, av1);
        let solve = conjugate_gradient(op, &dec.basis[0], tol, max_inner, None)?;
        dec.inner_iterations.push(solve.iterations);
        if !dec.add(op, solve.solution)? {
            dec.invariant = true;
        }
        Ok(dec)
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Completed iterations `m`; the space has dimension `2m` unless invariant.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn inner_iterations(&self) -> &[usize] {
        &self.inner_iterations
    }

    pub fn is_invariant(&self) -> bool {
        self.invariant
    }

    /// Appends a vector already orthonormal to the basis.
    fn push(&mut self, v: Vec<f64>, av: Vec<f64>) {
        let k = self.basis.len();
        let mut row: Vec<f64> = Vec::with_capacity(k + 1);
        for i in 0..k {
            let t = 0.5 * (dot(&self.basis[i], &av) + dot(&v, &self.images[i]));
            row.push(t);
            self.compression[i].push(t);
        }
        row.push(dot(&v, &av));
        self.compression.push(row);
        self.basis.push(v);
        self.images.push(av);
    }

    /// Orthonormalizes `y` twice against the basis, then appends it with its
    /// image; false if nothing new remains.
    ///
    /// The image is a fresh product with the unit vector. Updating a carried
    /// image through the orthogonalization would divide its rounding by the
    /// remaining norm and can leave `T` indefinite.
    fn add<A: LinearOperator + ?Sized>(&mut self, op: &A, mut y: Vec<f64>) -> Result<bool> {
        if self.basis.len() >= op.dim() {
            return Ok(false);
        }
        let size = norm2(&y);
        for _ in 0..2 {
            for v in &self.basis {
                let c = dot(v, &y);
                axpy(-c, v, &mut y);
            }
        }
        let h = norm2(&y);
        if !(h > 1e-10 * size) {
            return Ok(false);
        }
        y.iter_mut().for_each(|x| *x /= h);
        let ay = op.apply(&y)?;
        self.push(y, ay);
        Ok(true)
    }

    /// Adds `A v_{2m-1}` and `A^{-1} v_{2m}`, the latter by CG to `tol`.
    pub fn extend<A: LinearOperator + ?Sized>(&mut self, op: &A, tol: f64, max_inner: usize) -> Result<()> {
        if self.invariant {
            return Ok(());
        }
        let k = self.basis.len();
        let odd = k.saturating_sub(2);
        let even = k - 1;
        let y1 = self.images[odd].clone();
        let solve = conjugate_gradient(op, &self.basis[even], tol, max_inner, None)?;
        self.inner_iterations.push(solve.iterations);
        let added_positive = self.add(op, y1)?;
        let added_negative = self.add(op, solve.solution)?;
        self.iterations += 1;
        if !added_positive && !added_negative {
            self.invariant = true;
        }
        Ok(())
    }

    /// `‖b‖ f(T) e_1` in the basis.
    pub fn coefficients(&self, f: &StieltjesFunction) -> Result<Vec<f64>> {
        let d = self.basis.len();
        let t = DMatrix::from_fn(d, d, |i, j| self.compression[i][j]);
        let eig = SymmetricEigen::new(t);
        let mut c = vec![0.0; d];
        for (k, &theta) in eig.eigenvalues.iter().enumerate() {
            if !(theta > 0.0) {
                return Err(KrylovError::NonPositiveRitzValue { value: theta });
            }
            let w = f.eval(theta) * eig.eigenvectors[(0, k)] * self.norm_b;
            for (i, ci) in c.iter_mut().enumerate() {
                *ci += eig.eigenvectors[(i, k)] * w;
            }
        }
        Ok(c)
    }

    pub fn combine(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.basis[0].len()];
        for (v, &ci) in self.basis.iter().zip(c) {
            axpy(ci, v, &mut out);
        }
        out
    }
}

/// Options of [`extended_krylov_fab`].
#[derive(Debug, Clone)]
pub struct ExtendedKrylovOptions {
    pub inner: InnerSolveConfig,
    pub max_iterations: usize,
}

impl ExtendedKrylovOptions {
    pub fn new(inner: InnerSolveConfig) -> Self {
        ExtendedKrylovOptions {
            inner,
            max_iterations: 500,
        }
    }
}

/// Extended Krylov approximation `‖b‖ V f(T) e_1` with inexact solves.
///
/// Iteration `j` solves to `inner.tolerance(j)`; `matvecs` counts the
/// products with `A` plus every inner CG product.
pub fn extended_krylov_fab<A: LinearOperator + ?Sized>(
    op: &A,
    f: &StieltjesFunction,
    b: &[f64],
    stopping: &Stopping,
    bounds: SpectralBounds,
    options: &ExtendedKrylovOptions,
) -> Result<(Vec<f64>, MethodReport)> {
    let count0 = op.matvec_count();
    let max_inner = options.inner.max_inner_iterations;
    let mut dec = ExtendedDecomposition::new(op, b, options.inner.tolerance(1), max_inner)?;
    let alpha0 = convergence_factor(FactorKind::ShiftInvertOrExtended, bounds, 0.0);
    let rate = alpha0 * alpha0;
    let mut report = MethodReport::new("eksm");
    let mut prev: Vec<f64> = Vec::new();
    let mut best = f64::INFINITY;

    for j in 1..=options.max_iterations {
        if j > 1 {
            dec.extend(op, options.inner.tolerance(j), max_inner)?;
        }
        let c = dec.coefficients(f)?;
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
            report.iterations = dec.iterations();
            report.matvecs = op.matvec_count() - count0;
            report.inner_iterations = dec.inner_iterations().to_vec();
            // Basis and images, plus the CG solution, residual, direction and product.
            report.peak_vectors = 2 * dec.dimension() + 4;
            report.estimated_error = err;
            report.relative_error = stopping.reference().map(|r| relative_error(&x, r));
            report.converged = true;
            return Ok((x, report));
        }
    }
    Err(KrylovError::NotConverged {
        method: "extended Krylov",
        iterations: options.max_iterations,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{make_diagonal_chebyshev, normalized_ones};

    #[test]
    fn inverse_is_exact_after_one_iteration() {
        let bounds = SpectralBounds::new(0.5, 50.0).unwrap();
        let op = make_diagonal_chebyshev(30, bounds).unwrap();
        let b = normalized_ones(30);
        let f = StieltjesFunction::resolvent(0.0).unwrap();
        let dec = ExtendedDecomposition::new(&op, &b, 1e-14, 1000).unwrap();
        assert_eq!(dec.dimension(), 2);
        let x = dec.combine(&dec.coefficients(&f).unwrap());
        let reference = op.exact_shifted_solve(0.0, &b);
        assert!(relative_error(&x, &reference) < 1e-12);
    }

    #[test]
    fn basis_stays_orthonormal() {
        let bounds = SpectralBounds::new(0.1, 200.1).unwrap();
        let op = make_diagonal_chebyshev(200, bounds).unwrap();
        let mut dec = ExtendedDecomposition::new(&op, &normalized_ones(200), 1e-12, 2000).unwrap();
        for _ in 0..10 {
            dec.extend(&op, 1e-12, 2000).unwrap();
        }
        let v = dec.basis();
        for i in 0..v.len() {
            for j in 0..v.len() {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&v[i], &v[j]) - target).abs() < 1e-10);
            }
        }
    }
}
