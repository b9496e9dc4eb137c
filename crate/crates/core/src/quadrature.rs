//! Composite Gauss-Legendre quadrature on (-1, 1) with panel doubling.
//!
//! Integrands may be vector valued; convergence is judged on the Euclidean
//! norm of the change between successive levels.

use std::sync::OnceLock;

use crate::error::{KrylovError, Result};
use crate::linalg::norm2;

/// Points per panel.
pub const PANEL_ORDER: usize = 16;
/// Hard cap on integrand evaluations in a single level.
pub const MAX_NODES: usize = 1 << 15;
const MIN_PANELS: usize = 4;

/// Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on P_n from Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    fn panel_rule() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(PANEL_ORDER))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn composite_level(
    panels: usize,
    dim: usize,
    integrand: &mut impl FnMut(f64, &mut [f64]),
    buf: &mut [f64],
) -> Vec<f64> {
    let rule = GaussLegendre::panel_rule();
    let h = 2.0 / panels as f64;
    let mut acc = vec![0.0; dim];
    for p in 0..panels {
        let a = -1.0 + p as f64 * h;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let xx = a + 0.5 * h * (x + 1.0);
            buf.iter_mut().for_each(|v| *v = 0.0);
            integrand(xx, buf);
            let ww = 0.5 * h * w;
            for (s, v) in acc.iter_mut().zip(buf.iter()) {
                if v.is_finite() {
                    *s += ww * v;
                }
            }
        }
    }
    acc
}

/// Integrates a vector-valued function over (-1, 1).
///
/// `integrand(x, out)` writes the value at `x` into `out` (pre-zeroed).
/// Panels double until the relative change between levels is below `tol`.
pub fn integrate_vec(dim: usize, mut integrand: impl FnMut(f64, &mut [f64]), tol: f64) -> Result<Vec<f64>> {
    if !(tol > 0.0) {
        return Err(KrylovError::invalid("tol", "must be positive"));
    }
    let mut buf = vec![0.0; dim];
    let mut panels = MIN_PANELS;
    let mut prev = composite_level(panels, dim, &mut integrand, &mut buf);
    let mut change = f64::INFINITY;
    while panels * 2 * PANEL_ORDER <= MAX_NODES {
        panels *= 2;
        let cur = composite_level(panels, dim, &mut integrand, &mut buf);
        let diff: Vec<f64> = cur.iter().zip(&prev).map(|(a, b)| a - b).collect();
        let scale = norm2(&cur);
        let dn = norm2(&diff);
        change = if scale > 0.0 { dn / scale } else { dn };
        if scale == 0.0 && dn == 0.0 {
            return Ok(cur);
        }
        if change <= tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(KrylovError::QuadratureNotConverged {
        nodes: panels * PANEL_ORDER,
        change,
    })
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate(mut integrand: impl FnMut(f64) -> f64, tol: f64) -> Result<f64> {
    integrate_vec(1, |x, out| out[0] = integrand(x), tol).map(|v| v[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(PANEL_ORDER);
        let s: f64 = rule.weights.iter().sum();
        assert_relative_eq!(s, 2.0, epsilon = 1e-14);
        let x30: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(30)).sum();
        assert_relative_eq!(x30, 2.0 / 31.0, epsilon = 1e-13);
    }

    #[test]
    fn smooth_integral() {
        let v = integrate(|x| x.exp(), 1e-12).unwrap();
        assert_relative_eq!(v, 1f64.exp() - (-1f64).exp(), epsilon = 1e-13);
    }

    #[test]
    fn zero_integrand() {
        assert_eq!(integrate(|_| 0.0, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn rough_integrand_fails_explicitly() {
        let r = integrate(|x| if x > 0.1234567 { 1.0 / x.abs().sqrt() } else { 0.0 }, 1e-15);
        assert!(matches!(r, Err(KrylovError::QuadratureNotConverged { .. })));
    }
}
