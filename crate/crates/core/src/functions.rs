//! Test functions fed to the fractional integrals and the coefficient engine.

use crate::error::{Error, Result};
use crate::splines::{bspline_natural, causal_value};
use serde::{Deserialize, Serialize};

/// A real function of one variable with known breakpoints.
pub trait RealFn: Sync {
    fn eval(&self, x: f64) -> f64;

    /// Points where the function or one of its low derivatives jumps.
    fn knots(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Closed interval outside of which the function vanishes.
    fn support(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}

impl<F: Fn(f64) -> f64 + Sync> RealFn for F {
    fn eval(&self, x: f64) -> f64 {
        self(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineTerm {
    pub coef: f64,
    /// natural orders use B_n, others the causal fractional spline
    pub order: f64,
    #[serde(default)]
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    Zero,
    Indicator {
        l: f64,
        r: f64,
    },
    /// x_+^β (1-x)_+^δ on [0, 1]
    PowerBump {
        beta: f64,
        delta: f64,
    },
    SplineCombo {
        terms: Vec<SplineTerm>,
    },
    /// piecewise linear through (xs, ys), zero outside [xs[0], xs[last]]
    Tabulated {
        xs: Vec<f64>,
        ys: Vec<f64>,
    },
    Scaled {
        factor: f64,
        inner: Box<FunctionSpec>,
    },
    /// x ↦ inner(-x)
    Reflected {
        inner: Box<FunctionSpec>,
    },
}

impl FunctionSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            FunctionSpec::Indicator { l, r } if !(l < r) => {
                Err(Error::Config(format!("indicator needs l < r, got [{l}, {r}]")))
            }
            FunctionSpec::PowerBump { beta, delta } if *beta < 0.0 || *delta < 0.0 => {
                Err(Error::Config("power_bump exponents must be nonnegative".into()))
            }
            FunctionSpec::Tabulated { xs, ys } => {
                if xs.len() < 2 || xs.len() != ys.len() {
                    return Err(Error::Config("tabulated function needs >= 2 matching points".into()));
                }
                if xs.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::Config("tabulated abscissae must increase".into()));
                }
                Ok(())
            }
            FunctionSpec::SplineCombo { terms } => {
                if terms.iter().any(|t| !(t.order >= 0.0)) {
                    return Err(Error::Config("spline orders must be >= 0".into()));
                }
                Ok(())
            }
            FunctionSpec::Scaled { inner, .. } | FunctionSpec::Reflected { inner } => inner.validate(),
            _ => Ok(()),
        }
    }

    pub fn scaled(self, factor: f64) -> FunctionSpec {
        FunctionSpec::Scaled { factor, inner: Box::new(self) }
    }

    pub fn reflected(self) -> FunctionSpec {
        FunctionSpec::Reflected { inner: Box::new(self) }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FunctionSpec::Zero => true,
            FunctionSpec::Scaled { factor, inner } => *factor == 0.0 || inner.is_zero(),
            FunctionSpec::Reflected { inner } => inner.is_zero(),
            FunctionSpec::SplineCombo { terms } => terms.iter().all(|t| t.coef == 0.0),
            _ => false,
        }
    }
}

impl RealFn for FunctionSpec {
    fn eval(&self, x: f64) -> f64 {
        match self {
            FunctionSpec::Zero => 0.0,
            FunctionSpec::Indicator { l, r } => {
                if x >= *l && x < *r {
                    1.0
                } else {
                    0.0
                }
            }
            FunctionSpec::PowerBump { beta, delta } => {
                if (0.0..=1.0).contains(&x) {
                    x.powf(*beta) * (1.0 - x).powf(*delta)
                } else {
                    0.0
                }
            }
            FunctionSpec::SplineCombo { terms } => terms
                .iter()
                .map(|t| {
                    let y = x - t.shift;
                    let v = if t.order == t.order.round() {
                        bspline_natural(t.order as usize, y)
                    } else {
                        causal_value(t.order, y, 1 << 20, 1e-12).unwrap_or(f64::NAN)
                    };
                    t.coef * v
                })
                .sum(),
            FunctionSpec::Tabulated { xs, ys } => {
                if x < xs[0] || x > xs[xs.len() - 1] {
                    return 0.0;
                }
                let i = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
                let (x0, x1) = (xs[i - 1], xs[i]);
                let t = (x - x0) / (x1 - x0);
                ys[i - 1] * (1.0 - t) + ys[i] * t
            }
            FunctionSpec::Scaled { factor, inner } => factor * inner.eval(x),
            FunctionSpec::Reflected { inner } => inner.eval(-x),
        }
    }

    fn knots(&self) -> Vec<f64> {
        match self {
            FunctionSpec::Zero => Vec::new(),
            FunctionSpec::Indicator { l, r } => vec![*l, *r],
            FunctionSpec::PowerBump { .. } => vec![0.0, 1.0],
            FunctionSpec::SplineCombo { terms } => {
                let mut k = Vec::new();
                for t in terms {
                    if t.order == t.order.round() {
                        for j in 0..=(t.order as usize + 1) {
                            k.push(t.shift + j as f64);
                        }
                    } else {
                        k.push(t.shift);
                    }
                }
                k
            }
            FunctionSpec::Tabulated { xs, .. } => xs.clone(),
            FunctionSpec::Scaled { inner, .. } => inner.knots(),
            FunctionSpec::Reflected { inner } => inner.knots().into_iter().map(|v| -v).collect(),
        }
    }

    fn support(&self) -> (f64, f64) {
        match self {
            FunctionSpec::Zero => (0.0, 0.0),
            FunctionSpec::Indicator { l, r } => (*l, *r),
            FunctionSpec::PowerBump { .. } => (0.0, 1.0),
            FunctionSpec::SplineCombo { terms } => {
                let lo = terms.iter().map(|t| t.shift).fold(f64::INFINITY, f64::min);
                let hi = terms
                    .iter()
                    .map(|t| {
                        if t.order == t.order.round() {
                            t.shift + t.order + 1.0
                        } else {
                            f64::INFINITY
                        }
                    })
                    .fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            }
            FunctionSpec::Tabulated { xs, .. } => (xs[0], xs[xs.len() - 1]),
            FunctionSpec::Scaled { inner, .. } => inner.support(),
            FunctionSpec::Reflected { inner } => {
                let (l, r) = inner.support();
                (-r, -l)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_interpolates() {
        let f = FunctionSpec::Tabulated { xs: vec![0.0, 1.0, 3.0], ys: vec![0.0, 2.0, 0.0] };
        assert_eq!(f.eval(0.5), 1.0);
        assert_eq!(f.eval(2.0), 1.0);
        assert_eq!(f.eval(3.5), 0.0);
    }

    #[test]
    fn reflection_maps_support() {
        let f = FunctionSpec::Indicator { l: 0.0, r: 1.0 }.reflected();
        assert_eq!(f.support(), (-1.0, 0.0));
        assert_eq!(f.eval(-0.5), 1.0);
    }
}
