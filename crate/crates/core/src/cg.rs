//! Conjugate gradients with a zero initial guess.

use crate::error::{KrylovError, Result};
use crate::linalg::{axpy, dot, norm2};
use crate::operators::LinearOperator;

/// Result of one CG solve.
#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// Recursively updated residual `b - A x`.
    pub residual: Vec<f64>,
    pub residual_norm: f64,
    /// Residual norm before each iteration and at exit.
    pub residual_history: Vec<f64>,
}

/// Callback `(k, x_k)` for each CG iterate.
pub type IterateObserver<'a> = &'a mut dyn FnMut(usize, &[f64]);

/// Solves `A x = rhs` until `‖r‖ <= tol` (absolute).
///
/// `observer(k, x_k)` runs after every iteration.
pub fn conjugate_gradient<A: LinearOperator + ?Sized>(
    op: &A,
    rhs: &[f64],
    tol: f64,
    max_iter: usize,
    mut observer: Option<IterateObserver<'_>>,
) -> Result<CgOutcome> {
    let n = op.dim();
    if rhs.len() != n {
        return Err(KrylovError::DimensionMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    if !(tol >= 0.0) {
        return Err(KrylovError::invalid("tol", "must be nonnegative"));
    }
    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let mut history = vec![rr.sqrt()];
    let mut k = 0;
    while rr.sqrt() > tol {
        if k == max_iter {
            return Err(KrylovError::InnerSolveFailed {
                iterations: k,
                residual: rr.sqrt(),
                tolerance: tol,
            });
        }
        op.apply_into(&p, &mut ap)?;
        let curvature = dot(&p, &ap);
        if !(curvature > 0.0) {
            return Err(KrylovError::NegativeCurvature { shift: 0.0, curvature });
        }
        let alpha = rr / curvature;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        let rr_next = dot(&r, &r);
        let beta = rr_next / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_next;
        k += 1;
        history.push(rr.sqrt());
        if let Some(obs) = observer.as_mut() {
            obs(k, &x);
        }
    }
    let residual_norm = norm2(&r);
    Ok(CgOutcome {
        solution: x,
        iterations: k,
        residual: r,
        residual_norm,
        residual_history: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::DiagonalOperator;
    use approx::assert_relative_eq;

    #[test]
    fn solves_diagonal_system() {
        let op = DiagonalOperator::new(vec![1.0, 2.0, 4.0, 8.0]).unwrap();
        let out = conjugate_gradient(&op, &[1.0; 4], 1e-14, 10, None).unwrap();
        assert!(out.iterations <= 4);
        for (x, d) in out.solution.iter().zip([1.0, 2.0, 4.0, 8.0]) {
            assert_relative_eq!(*x, 1.0 / d, epsilon = 1e-13);
        }
        assert_eq!(op.matvec_count(), out.iterations);
    }

    #[test]
    fn zero_rhs_needs_no_iterations() {
        let op = DiagonalOperator::new(vec![1.0, 2.0]).unwrap();
        let out = conjugate_gradient(&op, &[0.0, 0.0], 1e-10, 10, None).unwrap();
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn iteration_cap_is_an_error() {
        let op = DiagonalOperator::new((1..=50).map(f64::from).collect()).unwrap();
        let r = conjugate_gradient(&op, &[1.0; 50], 1e-14, 3, None);
        assert!(matches!(r, Err(KrylovError::InnerSolveFailed { iterations: 3, .. })));
    }
}
