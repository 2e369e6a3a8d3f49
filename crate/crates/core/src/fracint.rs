//! Riemann-Liouville fractional integrals I_{a±}^α.

use crate::error::{Error, Result};
use crate::functions::{FunctionSpec, RealFn};
use crate::quad::adaptive_split_smooth;
use crate::specfun::{gamma, rgamma};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntSign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracIntSpec {
    pub alpha: f64,
    pub a: f64,
    pub sign: IntSign,
    #[serde(default = "default_tol")]
    pub quad_tol: f64,
}

fn default_tol() -> f64 {
    1e-10
}

impl FracIntSpec {
    pub fn new(alpha: f64, a: f64, sign: IntSign) -> Self {
        FracIntSpec { alpha, a, sign, quad_tol: default_tol() }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.quad_tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::OrderOutOfRange(format!("integration order must be positive, got {}", self.alpha)));
        }
        if !(self.quad_tol > 0.0) {
            return Err(Error::Config("quad_tol must be positive".into()));
        }
        Ok(())
    }
}

struct Mirror<'a, F: RealFn + ?Sized>(&'a F);

impl<F: RealFn + ?Sized> RealFn for Mirror<'_, F> {
    fn eval(&self, x: f64) -> f64 {
        self.0.eval(-x)
    }
    fn knots(&self) -> Vec<f64> {
        self.0.knots().into_iter().map(|v| -v).collect()
    }
    fn support(&self) -> (f64, f64) {
        let (l, r) = self.0.support();
        (-r, -l)
    }
}

/// I_{a±}^α f(x). Errors when x lies on the excluded side of a.
pub fn rl_integral<F: RealFn + ?Sized>(spec: &FracIntSpec, f: &F, x: f64) -> Result<f64> {
    spec.validate()?;
    match spec.sign {
        IntSign::Plus => {
            if x < spec.a {
                return Err(Error::WrongSide { x, a: spec.a });
            }
            plus_integral(spec.alpha, spec.a, f, x, spec.quad_tol)
        }
        IntSign::Minus => {
            if x > spec.a {
                return Err(Error::WrongSide { x, a: spec.a });
            }
            plus_integral(spec.alpha, -spec.a, &Mirror(f), -x, spec.quad_tol)
        }
    }
}

/// Like `rl_integral` but zero on the excluded side, where f vanishes.
pub fn rl_integral_total<F: RealFn + ?Sized>(spec: &FracIntSpec, f: &F, x: f64) -> Result<f64> {
    let wrong = match spec.sign {
        IntSign::Plus => x < spec.a,
        IntSign::Minus => x > spec.a,
    };
    if wrong {
        spec.validate()?;
        return Ok(0.0);
    }
    rl_integral(spec, f, x)
}

/// Specialized entry for `FunctionSpec`: factors out constant multiples and
/// uses the closed form for indicators.
pub fn rl_integral_spec(spec: &FracIntSpec, f: &FunctionSpec, x: f64) -> Result<f64> {
    spec.validate()?;
    match f {
        FunctionSpec::Zero => Ok(0.0),
        FunctionSpec::Scaled { factor, inner } => Ok(factor * rl_integral_spec(spec, inner, x)?),
        FunctionSpec::Indicator { l, r } => {
            let wrong = match spec.sign {
                IntSign::Plus => x < spec.a,
                IntSign::Minus => x > spec.a,
            };
            if wrong {
                return Err(Error::WrongSide { x, a: spec.a });
            }
            let (lo, hi, y) = match spec.sign {
                IntSign::Plus => (l.max(spec.a), *r, x),
                IntSign::Minus => (-r.min(spec.a), -l, -x),
            };
            if hi <= lo {
                return Ok(0.0);
            }
            let p = |d: f64| if d > 0.0 { d.powf(spec.alpha) } else { 0.0 };
            Ok((p(y - lo) - p(y - hi)) * rgamma(spec.alpha + 1.0))
        }
        _ => rl_integral(spec, f, x),
    }
}

fn plus_integral<F: RealFn + ?Sized>(alpha: f64, a: f64, f: &F, x: f64, tol: f64) -> Result<f64> {
    let (sl, sr) = f.support();
    let lo = a.max(sl);
    let hi = x.min(sr);
    if !(hi > lo) {
        return Ok(0.0);
    }
    let knots = f.knots();
    if alpha < 1.0 {
        // kernel is smooth on the lower half; t = (x - y)^α on the upper half
        let mid = if hi < x { hi } else { 0.5 * (lo + hi) };
        let e = alpha - 1.0;
        let near = adaptive_split_smooth(|y| (x - y).powf(e) * f.eval(y), lo, mid, &knots, 0.5 * tol)?;
        let mut far = 0.0;
        if hi > mid {
            let inv = 1.0 / alpha;
            let t1 = (x - mid).powf(alpha);
            let breaks: Vec<f64> = knots
                .iter()
                .filter(|&&k| k > mid && k < hi)
                .map(|&k| (x - k).powf(alpha))
                .collect();
            far = adaptive_split_smooth(|t| f.eval(x - t.powf(inv)), 0.0, t1, &breaks, 0.5 * tol)?;
        }
        Ok(near * rgamma(alpha) + far * rgamma(alpha + 1.0))
    } else {
        let e = alpha - 1.0;
        let v = adaptive_split_smooth(|y| (x - y).powf(e) * f.eval(y), lo, hi, &knots, tol * gamma(alpha)?.max(1.0))?;
        Ok(v * rgamma(alpha))
    }
}

/// Γ(β+1)/Γ(β+1+α) x^{β+α}, the integral I_{0+}^α of y^β.
pub fn rl_power_rule(beta: f64, alpha: f64, x: f64) -> Result<f64> {
    if !(beta > -1.0) {
        return Err(Error::Domain(format!("power rule needs beta > -1, got {beta}")));
    }
    if !(x > 0.0) {
        return Err(Error::Domain(format!("power rule needs x > 0, got {x}")));
    }
    Ok(gamma(beta + 1.0)? * rgamma(beta + 1.0 + alpha) * x.powf(beta + alpha))
}

struct Lifted<'a, F: RealFn + ?Sized> {
    spec: FracIntSpec,
    f: &'a F,
}

impl<F: RealFn + ?Sized> RealFn for Lifted<'_, F> {
    fn eval(&self, y: f64) -> f64 {
        rl_integral_total(&self.spec, self.f, y).unwrap_or(f64::NAN)
    }
    fn knots(&self) -> Vec<f64> {
        self.f.knots()
    }
    fn support(&self) -> (f64, f64) {
        let (l, _) = self.f.support();
        (l.max(self.spec.a), f64::INFINITY)
    }
}

/// |f(x) - (1/(Γ(1-α)Γ(α))) d/dx ∫_0^x (x-y)^{-α} Γ(α) I_{0+}^α f(y) dy|.
pub fn inversion_residual<F: RealFn + ?Sized>(alpha: f64, f: &F, x: f64, quad_tol: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OrderOutOfRange(format!("inversion needs 0 < alpha < 1, got {alpha}")));
    }
    if !(x > 0.0) {
        return Err(Error::Domain(format!("inversion needs x > 0, got {x}")));
    }
    let inner = FracIntSpec::new(alpha, 0.0, IntSign::Plus).with_tol(quad_tol * 1e-2);
    let outer = FracIntSpec::new(1.0 - alpha, 0.0, IntSign::Plus).with_tol(quad_tol);
    let lifted = Lifted { spec: inner, f };
    // ∫_0^x (x-y)^{-α} g = Γ(1-α) I^{1-α} g, so the prefactor cancels against Γ(α)Γ(1-α)
    let h = quad_tol.cbrt().min(0.5 * x);
    let up = rl_integral_total(&outer, &lifted, x + h)?;
    let dn = rl_integral_total(&outer, &lifted, x - h)?;
    let deriv = (up - dn) / (2.0 * h);
    if !deriv.is_finite() {
        return Err(Error::Quadrature { a: 0.0, b: x, err: f64::INFINITY });
    }
    Ok((f.eval(x) - deriv).abs())
}

/// |I^α I^β f(x) - I^{α+β} f(x)| with base point 0 (plus side).
pub fn semigroup_residual<F: RealFn + ?Sized>(alpha: f64, beta: f64, f: &F, x: f64, quad_tol: f64) -> Result<f64> {
    let inner = FracIntSpec::new(beta, 0.0, IntSign::Plus).with_tol(quad_tol * 1e-2);
    let outer = FracIntSpec::new(alpha, 0.0, IntSign::Plus).with_tol(quad_tol);
    let both = FracIntSpec::new(alpha + beta, 0.0, IntSign::Plus).with_tol(quad_tol);
    let lifted = Lifted { spec: inner, f };
    let lhs = rl_integral(&outer, &lifted, x)?;
    let rhs = rl_integral(&both, f, x)?;
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_integral_of_constant() {
        let spec = FracIntSpec::new(0.5, 0.0, IntSign::Plus);
        let one = |y: f64| if y >= 0.0 { 1.0 } else { 0.0 };
        let v = rl_integral(&spec, &one, 2.0).unwrap();
        assert!((v - 2.0 * (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-9);
        assert!(matches!(rl_integral(&spec, &one, -1.0), Err(Error::WrongSide { .. })));
    }
}
