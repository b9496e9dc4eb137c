//! Stieltjes functions `f(z) = ∫ dμ(t) / (t + z)` and integration against
//! their measures.
//!
//! Every measure is pulled back to `σ ∈ (0, ∞)` by a substitution that makes
//! the density smooth at both ends, then to `x ∈ (-1, 1)` through
//! `σ = (1 - x) / (1 + x)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{KrylovError, Result};
use crate::quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StieltjesFunction {
    /// `z^{-α}`, `α ∈ (0, 1)`, density `sin(απ) / (π t^α)` on `(0, ∞)`.
    InvPower { alpha: f64 },
    /// `log(1 + z) / z`, density `1/t` on `(1, ∞)`.
    Log1pOverZ,
    /// `1 / (z + s)`, unit point mass at `t = s ≥ 0`.
    Resolvent { shift: f64 },
}

impl StieltjesFunction {
    pub fn inv_sqrt() -> Self {
        StieltjesFunction::InvPower { alpha: 0.5 }
    }

    pub fn inv_power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(KrylovError::invalid("alpha", format!("{alpha} not in (0, 1)")));
        }
        Ok(StieltjesFunction::InvPower { alpha })
    }

    pub fn log1p_over_z() -> Self {
        StieltjesFunction::Log1pOverZ
    }

    pub fn resolvent(shift: f64) -> Result<Self> {
        if !(shift >= 0.0) || !shift.is_finite() {
            return Err(KrylovError::invalid("shift", format!("{shift} must be >= 0")));
        }
        Ok(StieltjesFunction::Resolvent { shift })
    }

    /// Parses `inv_sqrt`, `inv_power:<alpha>`, `log1p_over_z`, `resolvent:<s>`.
    pub fn from_tag(tag: &str) -> Result<Self> {
        let (name, arg) = match tag.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (tag, None),
        };
        let parse = |a: Option<&str>| -> Result<f64> {
            a.ok_or_else(|| KrylovError::UnknownMethod(tag.to_string()))?
                .parse::<f64>()
                .map_err(|e| KrylovError::invalid("function", e.to_string()))
        };
        match name {
            "inv_sqrt" => Ok(Self::inv_sqrt()),
            "inv_power" => Self::inv_power(parse(arg)?),
            "log1p_over_z" => Ok(Self::log1p_over_z()),
            "resolvent" => Self::resolvent(parse(arg)?),
            _ => Err(KrylovError::UnknownMethod(tag.to_string())),
        }
    }

    pub fn tag(&self) -> String {
        match *self {
            StieltjesFunction::InvPower { alpha: 0.5 } => "inv_sqrt".into(),
            StieltjesFunction::InvPower { alpha } => format!("inv_power:{alpha}"),
            StieltjesFunction::Log1pOverZ => "log1p_over_z".into(),
            StieltjesFunction::Resolvent { shift } => format!("resolvent:{shift}"),
        }
    }

    pub fn eval(&self, z: f64) -> f64 {
        match *self {
            StieltjesFunction::InvPower { alpha } => {
                if alpha == 0.5 {
                    1.0 / z.sqrt()
                } else {
                    z.powf(-alpha)
                }
            }
            StieltjesFunction::Log1pOverZ => {
                if z.abs() < 1e-4 {
                    1.0 - z / 2.0 + z * z / 3.0 - z * z * z / 4.0
                } else {
                    z.ln_1p() / z
                }
            }
            StieltjesFunction::Resolvent { shift } => 1.0 / (z + shift),
        }
    }

    pub fn derivative(&self, z: f64) -> f64 {
        match *self {
            StieltjesFunction::InvPower { alpha } => -alpha * z.powf(-alpha - 1.0),
            StieltjesFunction::Log1pOverZ => {
                if z.abs() < 1e-4 {
                    -0.5 + 2.0 * z / 3.0 - 0.75 * z * z
                } else {
                    1.0 / (z * (1.0 + z)) - z.ln_1p() / (z * z)
                }
            }
            StieltjesFunction::Resolvent { shift } => -1.0 / ((z + shift) * (z + shift)),
        }
    }

    /// Left endpoint of the support of μ.
    pub fn support_start(&self) -> f64 {
        match *self {
            StieltjesFunction::InvPower { .. } => 0.0,
            StieltjesFunction::Log1pOverZ => 1.0,
            StieltjesFunction::Resolvent { shift } => shift,
        }
    }

    /// Density `w(t)` of μ; `None` for the point-mass case.
    pub fn density(&self, t: f64) -> Option<f64> {
        match *self {
            StieltjesFunction::InvPower { alpha } => Some(if t > 0.0 {
                (alpha * PI).sin() / (PI * t.powf(alpha))
            } else {
                0.0
            }),
            StieltjesFunction::Log1pOverZ => Some(if t > 1.0 { 1.0 / t } else { 0.0 }),
            StieltjesFunction::Resolvent { .. } => None,
        }
    }

    /// Maps `x ∈ (-1, 1)` to `(t, weight)` with `∫ g dμ = ∫_{-1}^{1} g(t(x)) weight(x) dx`.
    fn pullback(&self, x: f64) -> (f64, f64) {
        self.pullback_scaled(x, 1.0)
    }

    /// As [`Self::pullback`] with `σ = c (1 - x)/(1 + x)`.
    fn pullback_scaled(&self, x: f64, c: f64) -> (f64, f64) {
        let sigma = c * (1.0 - x) / (1.0 + x);
        let dsigma = 2.0 * c / ((1.0 + x) * (1.0 + x));
        match *self {
            StieltjesFunction::InvPower { alpha } => {
                // t = σ^q with q = 1 / min(α, 1-α): exact smoothness for α = 1/n, 1 - 1/n.
                let q = 1.0 / alpha.min(1.0 - alpha);
                let t = sigma.powf(q);
                let dens = q * (alpha * PI).sin() / PI * sigma.powf(q * (1.0 - alpha) - 1.0);
                (t, dens * dsigma)
            }
            StieltjesFunction::Log1pOverZ => (1.0 + sigma, dsigma / (1.0 + sigma)),
            StieltjesFunction::Resolvent { shift } => (shift, 0.0),
        }
    }

    /// `n`-point Gauss-Legendre rule for μ, `(t_q, w_q)` with every `t_q > 0`.
    /// The pullback is scaled so that `x = 0` lands on `t = center - t0`
    /// for the continuous measures; the point mass yields itself.
    pub fn node_rule(&self, n: usize, center: f64) -> Vec<(f64, f64)> {
        if let StieltjesFunction::Resolvent { shift } = *self {
            return vec![(shift, 1.0)];
        }
        let c = match *self {
            StieltjesFunction::InvPower { alpha } => center.max(f64::MIN_POSITIVE).powf(alpha.min(1.0 - alpha)),
            _ => (center - self.support_start()).max(1e-3),
        };
        let rule = quadrature::GaussLegendre::new(n);
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| {
                let (t, dens) = self.pullback_scaled(x, c);
                (t, w * dens)
            })
            .collect()
    }

    /// `∫ g(t) dμ(t)` to relative tolerance `tol`.
    pub fn integrate_measure(&self, g: impl Fn(f64) -> f64, tol: f64) -> Result<f64> {
        if let StieltjesFunction::Resolvent { shift } = *self {
            return Ok(g(shift));
        }
        quadrature::integrate(
            |x| {
                let (t, w) = self.pullback(x);
                if w == 0.0 {
                    0.0
                } else {
                    g(t) * w
                }
            },
            tol,
        )
    }

    /// `(∫_{t < split} g dμ, ∫_{t > split} g dμ)`.
    ///
    /// The lower part is integrated on its own finite interval with a
    /// substitution that removes the `t^{-α}` endpoint singularity; the
    /// upper part is the total minus the lower part.
    pub fn integrate_measure_split(&self, g: impl Fn(f64) -> f64, split: f64, tol: f64) -> Result<(f64, f64)> {
        if let StieltjesFunction::Resolvent { shift } = *self {
            let v = g(shift);
            return Ok(if shift <= split { (v, 0.0) } else { (0.0, v) });
        }
        let total = self.integrate_measure(&g, tol)?;
        let t0 = self.support_start();
        if split <= t0 {
            return Ok((0.0, total));
        }
        let lower = match *self {
            StieltjesFunction::InvPower { alpha } => {
                // t = split u^q, q = 1/(1-α): t^{-α} dt = q split^{1-α} du.
                let q = 1.0 / (1.0 - alpha);
                let c = (alpha * PI).sin() / PI * q * split.powf(1.0 - alpha);
                quadrature::integrate(
                    |x| {
                        let u = 0.5 * (1.0 + x);
                        0.5 * c * g(split * u.powf(q))
                    },
                    tol,
                )?
            }
            StieltjesFunction::Log1pOverZ => quadrature::integrate(
                |x| {
                    let t = t0 + 0.5 * (1.0 + x) * (split - t0);
                    0.5 * (split - t0) * g(t) / t
                },
                tol,
            )?,
            StieltjesFunction::Resolvent { .. } => 0.0,
        };
        Ok((lower, total - lower))
    }

    /// Vector-valued `∫ g(t) dμ(t)`; `g(t, out)` writes into a zeroed buffer.
    pub fn integrate_measure_vec(&self, dim: usize, mut g: impl FnMut(f64, &mut [f64]), tol: f64) -> Result<Vec<f64>> {
        if let StieltjesFunction::Resolvent { shift } = *self {
            let mut out = vec![0.0; dim];
            g(shift, &mut out);
            return Ok(out);
        }
        quadrature::integrate_vec(
            dim,
            |x, out| {
                let (t, w) = self.pullback(x);
                if w == 0.0 || !w.is_finite() {
                    return;
                }
                g(t, out);
                out.iter_mut().for_each(|v| *v *= w);
            },
            tol,
        )
    }
}

impl std::fmt::Display for StieltjesFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.tag())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn closed_forms() {
        let f = StieltjesFunction::inv_sqrt();
        assert_eq!(f.eval(4.0), 0.5);
        assert_eq!(f.derivative(1.0), -0.5);
        assert_relative_eq!(StieltjesFunction::log1p_over_z().eval(1.0), 2f64.ln());
        assert_eq!(StieltjesFunction::log1p_over_z().support_start(), 1.0);
    }

    #[test]
    fn tags_round_trip() {
        for f in [
            StieltjesFunction::inv_sqrt(),
            StieltjesFunction::inv_power(0.25).unwrap(),
            StieltjesFunction::log1p_over_z(),
            StieltjesFunction::resolvent(1.0).unwrap(),
        ] {
            assert_eq!(StieltjesFunction::from_tag(&f.tag()).unwrap(), f);
        }
        assert!(StieltjesFunction::from_tag("exp").is_err());
    }

    #[test]
    fn resolvent_integrates_point_mass() {
        let f = StieltjesFunction::resolvent(2.0).unwrap();
        assert_eq!(f.integrate_measure(|t| 1.0 / (t + 3.0), 1e-12).unwrap(), 0.2);
    }

    #[test]
    fn split_parts_add_up() {
        for f in [
            StieltjesFunction::inv_sqrt(),
            StieltjesFunction::inv_power(0.3).unwrap(),
            StieltjesFunction::log1p_over_z(),
        ] {
            let (lo, hi) = f.integrate_measure_split(|t| 1.0 / (t + 2.0), 4.0, 1e-12).unwrap();
            assert!(lo > 0.0 && hi > 0.0);
            assert_relative_eq!(lo + hi, f.eval(2.0), max_relative = 1e-10);
        }
        // ∫_0^s dt/(π√t (t+1)) = (2/π) atan(√s).
        let (lo, _) = StieltjesFunction::inv_sqrt()
            .integrate_measure_split(|t| 1.0 / (t + 1.0), 4.0, 1e-13)
            .unwrap();
        assert_relative_eq!(lo, 2.0 / PI * 2f64.atan(), max_relative = 1e-11);
    }

    #[test]
    fn general_alpha_reproduces_power() {
        for alpha in [0.25, 1.0 / 3.0, 0.75] {
            let f = StieltjesFunction::inv_power(alpha).unwrap();
            for z in [0.01, 1.0, 50.0] {
                let q = f.integrate_measure(|t| 1.0 / (t + z), 1e-12).unwrap();
                assert_relative_eq!(q, f.eval(z), max_relative = 1e-10);
            }
        }
    }
}
