//! Hermitian (real symmetric) operators with matvec counting.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{KrylovError, Result};
use crate::stieltjes::StieltjesFunction;

/// Shared, thread-safe matvec counter. Clones observe the same count.
#[derive(Debug, Clone, Default)]
pub struct MatvecCounter(Arc<AtomicUsize>);

impl MatvecCounter {
    pub fn new() -> Self {
        Self::default()
    }
    pub fn get(&self) -> usize {
        self.0.load(Ordering::Relaxed)
    }
    pub fn bump(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }
    pub fn reset(&self) {
        self.0.store(0, Ordering::Relaxed);
    }
}

/// Spectral interval of an HPD operator.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SpectralBounds {
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl SpectralBounds {
    pub fn new(lambda_min: f64, lambda_max: f64) -> Result<Self> {
        if !(lambda_min > 0.0) || !lambda_max.is_finite() {
            return Err(KrylovError::invalid(
                "lambda_min",
                format!("need 0 < lambda_min, finite lambda_max; got [{lambda_min}, {lambda_max}]"),
            ));
        }
        if lambda_min > lambda_max {
            return Err(KrylovError::invalid(
                "lambda_max",
                format!("lambda_max {lambda_max} < lambda_min {lambda_min}"),
            ));
        }
        Ok(SpectralBounds { lambda_min, lambda_max })
    }

    pub fn kappa(&self) -> f64 {
        self.lambda_max / self.lambda_min
    }

    pub fn geometric_mean(&self) -> f64 {
        (self.lambda_min * self.lambda_max).sqrt()
    }
}

/// A real symmetric operator with counted applications.
///
/// Implementors provide `raw_apply`; callers use `apply`/`apply_into`, which
/// check dimensions and bump the counter exactly once.
pub trait LinearOperator: Send + Sync {
    fn dim(&self) -> usize;
    fn counter(&self) -> &MatvecCounter;
    fn raw_apply(&self, v: &[f64], out: &mut [f64]);

    /// Sorted eigenvalues when known.
    fn spectrum(&self) -> Option<&[f64]> {
        None
    }

    fn apply_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.dim();
        if v.len() != n {
            return Err(KrylovError::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
        if out.len() != n {
            return Err(KrylovError::DimensionMismatch {
                expected: n,
                got: out.len(),
            });
        }
        self.raw_apply(v, out);
        self.counter().bump();
        Ok(())
    }

    fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(v, &mut out)?;
        Ok(out)
    }

    fn matvec_count(&self) -> usize {
        self.counter().get()
    }

    /// Bounds from the known spectrum.
    fn spectral_bounds(&self) -> Option<SpectralBounds> {
        let s = self.spectrum()?;
        SpectralBounds::new(*s.first()?, *s.last()?).ok()
    }
}

/// `diag(λ_1, …, λ_N)` in the standard basis.
#[derive(Debug, Clone)]
pub struct DiagonalOperator {
    diagonal: Vec<f64>,
    sorted: Vec<f64>,
    counter: MatvecCounter,
}

impl DiagonalOperator {
    pub fn new(diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() {
            return Err(KrylovError::invalid("diagonal", "empty"));
        }
        if diagonal.iter().any(|x| !x.is_finite()) {
            return Err(KrylovError::invalid("diagonal", "non-finite entry"));
        }
        let mut sorted = diagonal.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(DiagonalOperator {
            diagonal,
            sorted,
            counter: MatvecCounter::new(),
        })
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// Exact `f(A) b`, evaluated elementwise. Not counted as a matvec.
    pub fn exact_function_times(&self, f: &StieltjesFunction, b: &[f64]) -> Vec<f64> {
        self.diagonal.iter().zip(b).map(|(&l, &bi)| f.eval(l) * bi).collect()
    }

    /// Exact `(A - ζ I)^{-1} b`. Not counted as a matvec.
    pub fn exact_shifted_solve(&self, zeta: f64, b: &[f64]) -> Vec<f64> {
        self.diagonal.iter().zip(b).map(|(&l, &bi)| bi / (l - zeta)).collect()
    }

    /// A-norm of `x`.
    pub fn a_norm(&self, x: &[f64]) -> f64 {
        self.diagonal
            .iter()
            .zip(x)
            .map(|(&l, &xi)| l * xi * xi)
            .sum::<f64>()
            .sqrt()
    }
}

impl LinearOperator for DiagonalOperator {
    fn dim(&self) -> usize {
        self.diagonal.len()
    }
    fn counter(&self) -> &MatvecCounter {
        &self.counter
    }
    fn raw_apply(&self, v: &[f64], out: &mut [f64]) {
        for ((o, &l), &x) in out.iter_mut().zip(&self.diagonal).zip(v) {
            *o = l * x;
        }
    }
    fn spectrum(&self) -> Option<&[f64]> {
        Some(&self.sorted)
    }
}

/// Dense symmetric matrix. Symmetry is enforced on construction.
#[derive(Debug, Clone)]
pub struct DenseSymmetricOperator {
    matrix: DMatrix<f64>,
    spectrum: Vec<f64>,
    counter: MatvecCounter,
}

impl DenseSymmetricOperator {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(KrylovError::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let scale = matrix.amax().max(1.0);
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(KrylovError::invalid(
                "matrix",
                format!("not symmetric (max |A - A^T| = {asym:e})"),
            ));
        }
        let sym = (&matrix + matrix.transpose()) * 0.5;
        let mut spectrum: Vec<f64> = sym.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        spectrum.sort_by(f64::total_cmp);
        Ok(DenseSymmetricOperator {
            matrix: sym,
            spectrum,
            counter: MatvecCounter::new(),
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Exact `f(A) b` via a dense eigendecomposition.
    pub fn exact_function_times(&self, f: &StieltjesFunction, b: &[f64]) -> Vec<f64> {
        let eig = self.matrix.clone().symmetric_eigen();
        let bv = nalgebra::DVector::from_column_slice(b);
        let coeffs = eig.eigenvectors.transpose() * bv;
        let scaled = nalgebra::DVector::from_iterator(
            coeffs.len(),
            coeffs.iter().zip(eig.eigenvalues.iter()).map(|(c, &l)| c * f.eval(l)),
        );
        (eig.eigenvectors * scaled).iter().copied().collect()
    }
}

impl LinearOperator for DenseSymmetricOperator {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }
    fn counter(&self) -> &MatvecCounter {
        &self.counter
    }
    fn raw_apply(&self, v: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in 0..n {
                acc += self.matrix[(i, j)] * v[j];
            }
            *o = acc;
        }
    }
    fn spectrum(&self) -> Option<&[f64]> {
        Some(&self.spectrum)
    }
}

/// `A - σ I`. Applications are counted on the inner operator's counter.
pub struct ShiftedOperator<'a, A: LinearOperator + ?Sized> {
    inner: &'a A,
    shift: f64,
}

impl<'a, A: LinearOperator + ?Sized> ShiftedOperator<'a, A> {
    pub fn new(inner: &'a A, shift: f64) -> Self {
        ShiftedOperator { inner, shift }
    }
    pub fn shift(&self) -> f64 {
        self.shift
    }
}

impl<A: LinearOperator + ?Sized> LinearOperator for ShiftedOperator<'_, A> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn counter(&self) -> &MatvecCounter {
        self.inner.counter()
    }
    fn raw_apply(&self, v: &[f64], out: &mut [f64]) {
        self.inner.raw_apply(v, out);
        for (o, x) in out.iter_mut().zip(v) {
            *o -= self.shift * x;
        }
    }
}

/// Diagonal operator with the `n` first-kind Chebyshev points of the
/// interval as eigenvalues, sorted ascending.
pub fn make_diagonal_chebyshev(n: usize, bounds: SpectralBounds) -> Result<DiagonalOperator> {
    if n == 0 {
        return Err(KrylovError::invalid("n", "must be at least 1"));
    }
    let mid = 0.5 * (bounds.lambda_min + bounds.lambda_max);
    let half = 0.5 * (bounds.lambda_max - bounds.lambda_min);
    let mut eig: Vec<f64> = (1..=n)
        .map(|j| {
            let theta = (2 * j - 1) as f64 * std::f64::consts::PI / (2 * n) as f64;
            (mid + half * theta.cos()).clamp(bounds.lambda_min, bounds.lambda_max)
        })
        .collect();
    eig.sort_by(f64::total_cmp);
    DiagonalOperator::new(eig)
}

/// Diagonal operator whose interior eigenvalues cluster at `lambda_min` as
/// `gamma` decreases. Endpoints are pinned to the bounds.
pub fn make_diagonal_clustered(n: usize, bounds: SpectralBounds, gamma: f64) -> Result<DiagonalOperator> {
    if n < 2 {
        return Err(KrylovError::invalid("n", "must be at least 2"));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(KrylovError::invalid("gamma", format!("{gamma} not in (0, 1]")));
    }
    let width = bounds.lambda_max - bounds.lambda_min;
    let mut eig = Vec::with_capacity(n);
    eig.push(bounds.lambda_min);
    for j in 2..n {
        let frac = (j - 1) as f64 / (n - 1) as f64;
        eig.push(bounds.lambda_min + frac * width * gamma.powi((n - j) as i32));
    }
    eig.push(bounds.lambda_max);
    eig.sort_by(f64::total_cmp);
    DiagonalOperator::new(eig)
}

/// Normalized all-ones vector.
pub fn normalized_ones(n: usize) -> Vec<f64> {
    vec![1.0 / (n as f64).sqrt(); n]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_apply_counts() {
        let op = DiagonalOperator::new(vec![1.0; 3]).unwrap();
        assert_eq!(op.apply(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(op.matvec_count(), 1);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let op = DiagonalOperator::new(vec![2.0, 3.0]).unwrap();
        assert!(matches!(
            op.apply(&[1.0]),
            Err(KrylovError::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert_eq!(op.matvec_count(), 0);
    }

    #[test]
    fn shifted_shares_counter() {
        let op = DiagonalOperator::new(vec![2.0, 3.0]).unwrap();
        let s = ShiftedOperator::new(&op, -1.0);
        assert_eq!(s.apply(&[1.0, 1.0]).unwrap(), vec![3.0, 4.0]);
        assert_eq!(op.matvec_count(), 1);
    }

    #[test]
    fn single_chebyshev_node_is_midpoint() {
        let op = make_diagonal_chebyshev(1, SpectralBounds::new(0.1, 200.1).unwrap()).unwrap();
        assert!((op.diagonal()[0] - 100.1).abs() < 1e-12);
    }

    #[test]
    fn clustered_gamma_one_is_equispaced() {
        let op = make_diagonal_clustered(5, SpectralBounds::new(1.0, 5.0).unwrap(), 1.0).unwrap();
        assert_eq!(op.diagonal(), &[1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn clustered_rejects_bad_gamma() {
        let b = SpectralBounds::new(1.0, 5.0).unwrap();
        assert!(make_diagonal_clustered(5, b, 0.0).is_err());
        assert!(make_diagonal_clustered(5, b, 1.5).is_err());
    }

    #[test]
    fn dense_rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(DenseSymmetricOperator::new(m).is_err());
    }
}
