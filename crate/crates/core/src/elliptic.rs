//! Complete elliptic integral and Jacobi elliptic functions.
//!
//! Everything is parameterized by the complementary parameter `m1 = 1 - m`,
//! which is the quantity known exactly when `m` is close to 1.

use std::f64::consts::FRAC_PI_2;

use crate::error::{KrylovError, Result};

const MAX_AGM_STEPS: usize = 64;

/// Arithmetic-geometric mean of `a` and `b`, both positive.
fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..MAX_AGM_STEPS {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    a
}

/// `K(m)` with `m = 1 - m1`, via `K = π / (2 AGM(1, √m1))`.
pub fn complete_k(m1: f64) -> Result<f64> {
    if !(m1 > 0.0 && m1 <= 1.0) {
        return Err(KrylovError::Elliptic(format!(
            "complementary parameter {m1} not in (0, 1]"
        )));
    }
    Ok(FRAC_PI_2 / agm(1.0, m1.sqrt()))
}

/// `(sn, cn, dn)(u | m)` by descending Landen transformation (AGM scale).
fn sncndn_landen(u: f64, m1: f64) -> Result<(f64, f64, f64)> {
    let m = 1.0 - m1;
    if m < 1e-16 {
        return Ok((u.sin(), u.cos(), 1.0));
    }
    let mut a = vec![1.0];
    let mut c = vec![m.sqrt()];
    let mut b = m1.sqrt();
    while c.last().copied().unwrap_or(0.0).abs() > 1e-16 {
        if a.len() > MAX_AGM_STEPS {
            return Err(KrylovError::Elliptic("AGM scale did not converge".into()));
        }
        let an = *a.last().unwrap_or(&1.0);
        let next_a = 0.5 * (an + b);
        let next_c = 0.5 * (an - b);
        b = (an * b).sqrt();
        a.push(next_a);
        c.push(next_c);
    }
    let levels = a.len() - 1;
    let mut phi = 2f64.powi(levels as i32) * a[levels] * u;
    for n in (1..=levels).rev() {
        phi = 0.5 * (phi + (c[n] / a[n] * phi.sin()).asin());
    }
    let sn = phi.sin();
    let cn = phi.cos();
    // 1 - m sn² = m1 + m cn², free of cancellation near u = K.
    let dn = (m1 + m * cn * cn).sqrt();
    Ok((sn, cn, dn))
}

/// `sn²(u)/cn²(u)` for `u ∈ (0, K)`, accurate up to `u → K`.
///
/// For `u > K/2` the reflection `u = K - v` gives
/// `sn/cn = cn(v) / (√m1 sn(v))`, which keeps full relative precision.
pub fn sc_squared(u: f64, m1: f64) -> Result<f64> {
    let k = complete_k(m1)?;
    if !(u > 0.0 && u < k) {
        return Err(KrylovError::Elliptic(format!("argument {u} not in (0, K = {k})")));
    }
    if u <= 0.5 * k {
        let (sn, cn, _) = sncndn_landen(u, m1)?;
        Ok((sn / cn).powi(2))
    } else {
        let (sn, cn, _) = sncndn_landen(k - u, m1)?;
        Ok((cn / (m1.sqrt() * sn)).powi(2))
    }
}

/// `(sn, cn, dn)(u | 1 - m1)`.
pub fn jacobi_sncndn(u: f64, m1: f64) -> Result<(f64, f64, f64)> {
    if !(m1 > 0.0 && m1 <= 1.0) {
        return Err(KrylovError::Elliptic(format!(
            "complementary parameter {m1} not in (0, 1]"
        )));
    }
    sncndn_landen(u, m1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn k_reference_values() {
        assert_relative_eq!(complete_k(1.0).unwrap(), FRAC_PI_2, epsilon = 1e-15);
        // K(1/2) = Γ(1/4)² / (4√π).
        assert_relative_eq!(complete_k(0.5).unwrap(), 1.854_074_677_301_372, epsilon = 1e-14);
        assert!(complete_k(0.0).is_err());
    }

    #[test]
    fn pythagorean_identities() {
        for &m1 in &[0.9, 0.5, 1e-3, 1.0 / 2001.0] {
            let k = complete_k(m1).unwrap();
            for i in 1..10 {
                let u = k * i as f64 / 10.0;
                let (sn, cn, dn) = jacobi_sncndn(u, m1).unwrap();
                assert_relative_eq!(sn * sn + cn * cn, 1.0, epsilon = 1e-13);
                assert_relative_eq!(dn * dn + (1.0 - m1) * sn * sn, 1.0, epsilon = 1e-13);
            }
            let (sn, cn, dn) = jacobi_sncndn(k, m1).unwrap();
            assert_relative_eq!(sn, 1.0, epsilon = 1e-12);
            assert!(cn.abs() < 1e-7);
            assert_relative_eq!(dn, m1.sqrt(), max_relative = 1e-6);
        }
    }

    #[test]
    fn reflected_ratio_is_continuous() {
        let m1 = 1.0 / 2001.0;
        let k = complete_k(m1).unwrap();
        let below = sc_squared(0.5 * k * (1.0 - 1e-9), m1).unwrap();
        let above = sc_squared(0.5 * k * (1.0 + 1e-9), m1).unwrap();
        assert_relative_eq!(below, above, max_relative = 1e-6);
        // sc²(K/2) = 1/√m1.
        assert_relative_eq!(sc_squared(0.5 * k, m1).unwrap(), 2001f64.sqrt(), max_relative = 1e-10);
    }
}
