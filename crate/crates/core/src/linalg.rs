//! Small dense kernels on slices. Length-N work lives here so drivers can
//! count vector operations in one place.

use crate::error::{KrylovError, Result};

#[inline]
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[inline]
pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// y += a x
#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[inline]
pub fn scale(a: f64, x: &mut [f64]) {
    for xi in x.iter_mut() {
        *xi *= a;
    }
}

pub fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn relative_error(approx: &[f64], reference: &[f64]) -> f64 {
    let nr = norm2(reference);
    let diff = norm2(&sub(approx, reference));
    if nr == 0.0 {
        diff
    } else {
        diff / nr
    }
}

/// Solves the symmetric tridiagonal system `(T + shift I) x = rhs` by
/// Thomas elimination. `diag` has length m, `off` length m-1.
pub fn solve_tridiagonal_shifted(diag: &[f64], off: &[f64], shift: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    let m = diag.len();
    if rhs.len() != m {
        return Err(KrylovError::DimensionMismatch {
            expected: m,
            got: rhs.len(),
        });
    }
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut piv = diag[0] + shift;
    if piv == 0.0 {
        return Err(KrylovError::Singular);
    }
    c[0] = if m > 1 { off[0] / piv } else { 0.0 };
    d[0] = rhs[0] / piv;
    for i in 1..m {
        piv = diag[i] + shift - off[i - 1] * c[i - 1];
        if piv == 0.0 {
            return Err(KrylovError::Singular);
        }
        if i + 1 < m {
            c[i] = off[i] / piv;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / piv;
    }
    for i in (0..m - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Solves `(I + s H) x = rhs` for upper Hessenberg `H` (row-major, m x m)
/// with partial pivoting between adjacent rows. O(m^2).
pub fn solve_hessenberg_shifted(h: &[Vec<f64>], s: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    let m = rhs.len();
    let mut a: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let id = if i == j { 1.0 } else { 0.0 };
                    id + s * h[i][j]
                })
                .collect()
        })
        .collect();
    let mut b = rhs.to_vec();
    for k in 0..m {
        if k + 1 < m && a[k + 1][k].abs() > a[k][k].abs() {
            a.swap(k, k + 1);
            b.swap(k, k + 1);
        }
        if a[k][k] == 0.0 {
            return Err(KrylovError::Singular);
        }
        if k + 1 < m {
            let l = a[k + 1][k] / a[k][k];
            if l != 0.0 {
                for j in k..m {
                    a[k + 1][j] -= l * a[k][j];
                }
                b[k + 1] -= l * b[k];
            }
        }
    }
    for k in (0..m).rev() {
        let mut acc = b[k];
        for j in k + 1..m {
            acc -= a[k][j] * b[j];
        }
        b[k] = acc / a[k][k];
    }
    Ok(b)
}

/// Matrix-vector product with a row-major dense matrix.
pub fn dense_matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| dot(&row[..x.len()], x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_matches_dense() {
        let diag = [4.0, 5.0, 6.0, 7.0];
        let off = [1.0, -2.0, 0.5];
        let rhs = [1.0, 2.0, 3.0, 4.0];
        let x = solve_tridiagonal_shifted(&diag, &off, 0.5, &rhs).unwrap();
        for i in 0..4 {
            let mut r = (diag[i] + 0.5) * x[i];
            if i > 0 {
                r += off[i - 1] * x[i - 1];
            }
            if i < 3 {
                r += off[i] * x[i + 1];
            }
            assert!((r - rhs[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn hessenberg_solve_residual() {
        let h = vec![vec![2.0, 1.0, 0.3], vec![-3.0, 0.5, 1.0], vec![0.0, 4.0, -1.0]];
        let rhs = [1.0, -1.0, 2.0];
        let s = 0.7;
        let x = solve_hessenberg_shifted(&h, s, &rhs).unwrap();
        let hx = dense_matvec(&h, &x);
        for i in 0..3 {
            assert!((x[i] + s * hx[i] - rhs[i]).abs() < 1e-13);
        }
    }
}
