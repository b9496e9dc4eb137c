//! Symmetric tridiagonal eigensolver (implicit QL with Wilkinson shifts).
//!
//! The eigenvector matrix is never formed. Every Givens rotation is recorded,
//! so `Q x` and `e_1^T Q` cost O(#rotations) = O(m^2). That makes
//! `f(T) e_1 = Q f(Θ) Q^T e_1` an O(m^2) operation, cheap enough to evaluate
//! at every Lanczos step.

use crate::error::{KrylovError, Result};

#[derive(Debug, Clone, Copy)]
struct Rotation {
    i: usize,
    c: f64,
    s: f64,
}

/// Eigendecomposition `T = Q diag(values) Q^T` of a symmetric tridiagonal
/// matrix, with `Q` stored as a product of rotations.
#[derive(Debug, Clone)]
pub struct TridiagonalEigen {
    values: Vec<f64>,
    rotations: Vec<Rotation>,
    first_row: Vec<f64>,
}

impl TridiagonalEigen {
    /// `diag` has length m, `off` length m-1 (or m, in which case the last
    /// entry is ignored).
    pub fn new(diag: &[f64], off: &[f64]) -> Result<Self> {
        let n = diag.len();
        if off.len() + 1 < n {
            return Err(KrylovError::DimensionMismatch {
                expected: n.saturating_sub(1),
                got: off.len(),
            });
        }
        let mut d = diag.to_vec();
        let mut e = vec![0.0; n];
        e[..n.saturating_sub(1)].copy_from_slice(&off[..n.saturating_sub(1)]);
        let mut rotations = Vec::new();

        for l in 0..n {
            let mut iter = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= f64::EPSILON * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                iter += 1;
                if iter > 60 {
                    return Err(KrylovError::NotConverged {
                        method: "tridiagonal QL",
                        iterations: iter,
                        best: e[l].abs(),
                    });
                }
                let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                let mut r = g.hypot(1.0);
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let mut s = 1.0;
                let mut c = 1.0;
                let mut p = 0.0;
                let mut i = m;
                let mut underflow = false;
                while i > l {
                    i -= 1;
                    let f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == 0.0 {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    rotations.push(Rotation { i, c, s });
                }
                if underflow {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }

        let mut first_row = vec![0.0; n];
        if n > 0 {
            first_row[0] = 1.0;
        }
        for rot in &rotations {
            let (a, b) = (first_row[rot.i], first_row[rot.i + 1]);
            first_row[rot.i + 1] = rot.s * a + rot.c * b;
            first_row[rot.i] = rot.c * a - rot.s * b;
        }
        Ok(TridiagonalEigen {
            values: d,
            rotations,
            first_row,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Eigenvalues in the solver's internal (unsorted) order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `Q^T e_1`, i.e. the first components of the eigenvectors.
    pub fn first_row(&self) -> &[f64] {
        &self.first_row
    }

    /// Overwrites `x` with `Q x`.
    pub fn apply_q(&self, x: &mut [f64]) {
        for rot in self.rotations.iter().rev() {
            let (a, b) = (x[rot.i], x[rot.i + 1]);
            x[rot.i] = rot.c * a + rot.s * b;
            x[rot.i + 1] = -rot.s * a + rot.c * b;
        }
    }

    /// Overwrites `x` with `Q^T x`.
    pub fn apply_qt(&self, x: &mut [f64]) {
        for rot in &self.rotations {
            let (a, b) = (x[rot.i], x[rot.i + 1]);
            x[rot.i] = rot.c * a - rot.s * b;
            x[rot.i + 1] = rot.s * a + rot.c * b;
        }
    }

    /// `h(T) e_1 = Q h(Θ) Q^T e_1` for a scalar function `h`.
    pub fn function_times_e1(&self, h: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut z: Vec<f64> = self
            .values
            .iter()
            .zip(&self.first_row)
            .map(|(&theta, &q)| h(theta) * q)
            .collect();
        self.apply_q(&mut z);
        z
    }

    /// Dense eigenvector matrix, column k belonging to `values()[k]`.
    /// Row-major `m x m`.
    pub fn eigenvectors(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut q = vec![vec![0.0; n]; n];
        for k in 0..n {
            let mut col = vec![0.0; n];
            col[k] = 1.0;
            self.apply_q(&mut col);
            for (i, v) in col.into_iter().enumerate() {
                q[i][k] = v;
            }
        }
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tridiag_dense(diag: &[f64], off: &[f64]) -> nalgebra::DMatrix<f64> {
        let n = diag.len();
        nalgebra::DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else if i + 1 == j {
                off[i]
            } else if j + 1 == i {
                off[j]
            } else {
                0.0
            }
        })
    }

    #[test]
    fn eigenvalues_match_nalgebra() {
        let diag: Vec<f64> = (0..40).map(|i| 2.0 + (i as f64 * 0.37).sin()).collect();
        let off: Vec<f64> = (0..39).map(|i| 0.5 + 0.3 * (i as f64 * 1.1).cos()).collect();
        let eig = TridiagonalEigen::new(&diag, &off).unwrap();
        let mut reference: Vec<f64> = tridiag_dense(&diag, &off)
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        reference.sort_by(f64::total_cmp);
        for (a, b) in eig.sorted_values().iter().zip(&reference) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn rotations_reproduce_matrix() {
        let diag = [1.0, 3.0, -2.0, 5.0, 0.5];
        let off = [0.7, 1.2, 0.1, 2.0];
        let eig = TridiagonalEigen::new(&diag, &off).unwrap();
        let q = eig.eigenvectors();
        let t = tridiag_dense(&diag, &off);
        for i in 0..5 {
            for j in 0..5 {
                let v: f64 = (0..5).map(|k| q[i][k] * eig.values()[k] * q[j][k]).sum();
                assert!((v - t[(i, j)]).abs() < 1e-12);
            }
        }
        for k in 0..5 {
            assert!((q[0][k] - eig.first_row()[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn inverse_times_e1_matches_thomas() {
        let diag = [4.0, 4.5, 5.0, 6.0];
        let off = [1.0, 1.0, 0.5];
        let eig = TridiagonalEigen::new(&diag, &off).unwrap();
        let x = eig.function_times_e1(|t| 1.0 / t);
        let y = crate::linalg::solve_tridiagonal_shifted(&diag, &off, 0.0, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert_relative_eq!(a, b, epsilon = 1e-13);
        }
    }

    #[test]
    fn one_by_one() {
        let eig = TridiagonalEigen::new(&[3.0], &[]).unwrap();
        assert_eq!(eig.values(), &[3.0]);
        assert_eq!(eig.function_times_e1(|t| t * t), vec![9.0]);
    }
}
