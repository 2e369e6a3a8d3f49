//! Natural B-splines and fractional B-splines of causal, anticausal and symmetric type.

use crate::error::{Error, Result};
use crate::quad::Neumaier;
use crate::specfun::{gamma, gbinom};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub(crate) fn as_natural(alpha: f64) -> Option<usize> {
    if alpha >= 0.0 && alpha == alpha.round() && alpha < 1e6 {
        Some(alpha as usize)
    } else {
        None
    }
}

/// B_n by the two-term recursion, B_0 = χ_[0,1).
pub fn bspline_natural(n: usize, x: f64) -> f64 {
    if !(0.0..n as f64 + 1.0).contains(&x) {
        return 0.0;
    }
    let mut b: Vec<f64> = (0..=n)
        .map(|i| {
            let y = x - i as f64;
            if (0.0..1.0).contains(&y) {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    for m in 1..=n {
        let mf = m as f64;
        for i in 0..=(n - m) {
            let y = x - i as f64;
            b[i] = (y / mf) * b[i] + ((mf + 1.0 - y) / mf) * b[i + 1];
        }
    }
    b[0]
}

/// γ-th derivative of B_n, as a γ-fold backward difference of B_{n-γ}.
pub fn bspline_natural_deriv(n: usize, order: usize, x: f64) -> f64 {
    if order > n {
        return 0.0;
    }
    let mut s = 0.0;
    for j in 0..=order {
        let c = gbinom(order as f64, j as i64);
        let sg = if j % 2 == 0 { 1.0 } else { -1.0 };
        s += sg * c * bspline_natural(n - order, x - j as f64);
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerKind {
    Plus,
    Minus,
    Star,
}

fn is_even_int(a: f64) -> bool {
    a == a.round() && (a as i64) % 2 == 0
}

/// x_+^α, x_-^α or |x|_*^α. For even α the star branch uses x^α log|x|.
pub fn truncated_power(x: f64, alpha: f64, kind: PowerKind) -> f64 {
    match kind {
        PowerKind::Plus => {
            if x >= 0.0 {
                x.powf(alpha)
            } else {
                0.0
            }
        }
        PowerKind::Minus => truncated_power(-x, alpha, PowerKind::Plus),
        PowerKind::Star => star_power(x, alpha),
    }
}

fn star_power(x: f64, alpha: f64) -> f64 {
    let ax = x.abs();
    if is_even_int(alpha) {
        if ax == 0.0 {
            return 0.0;
        }
        let m = (alpha / 2.0) as i64;
        let sg = if (m + 1) % 2 == 0 { 1.0 } else { -1.0 };
        ax.powf(alpha) * ax.ln() / (sg * PI)
    } else {
        ax.powf(alpha) / (-2.0 * (PI * alpha / 2.0).sin())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplineVariant {
    Causal,
    Anticausal,
    Symmetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalSpline {
    pub alpha: f64,
    pub variant: SplineVariant,
    #[serde(default)]
    pub shift_k: i64,
    #[serde(default = "default_trunc")]
    pub trunc_terms: usize,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
}

fn default_trunc() -> usize {
    1 << 20
}

fn default_tail_tol() -> f64 {
    1e-12
}

/// Safety factor applied to the |x|^{-α-2} tail estimate.
pub const TAIL_SAFETY: f64 = 10.0;

impl FractionalSpline {
    pub fn new(alpha: f64, variant: SplineVariant) -> Result<Self> {
        let s = FractionalSpline {
            alpha,
            variant,
            shift_k: 0,
            trunc_terms: default_trunc(),
            tail_tol: default_tail_tol(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn causal(alpha: f64) -> Result<Self> {
        Self::new(alpha, SplineVariant::Causal)
    }

    pub fn with_shift(mut self, k: i64) -> Self {
        self.shift_k = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::Domain(format!("spline order must be positive, got {}", self.alpha)));
        }
        if self.trunc_terms == 0 || !(self.tail_tol > 0.0) {
            return Err(Error::Domain("trunc_terms >= 1 and tail_tol > 0 required".into()));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let y = x - self.shift_k as f64;
        match self.variant {
            SplineVariant::Causal => causal_value(self.alpha, y, self.trunc_terms, self.tail_tol),
            SplineVariant::Anticausal => {
                causal_value(self.alpha, -y, self.trunc_terms, self.tail_tol)
            }
            SplineVariant::Symmetric => symmetric_value(self.alpha, y),
        }
    }

    /// D^γ of the spline via the lowered-order difference formula.
    pub fn derivative(&self, order: usize, x: f64) -> Result<f64> {
        if order == 0 {
            return self.eval(x);
        }
        let lowered = self.alpha - order as f64;
        if lowered <= -0.5 {
            return Err(Error::OrderOutOfRange(format!(
                "derivative of order {order} needs alpha - order > -1/2, alpha = {}",
                self.alpha
            )));
        }
        let y = x - self.shift_k as f64;
        let (arg, sign) = match self.variant {
            SplineVariant::Causal => (y, 1.0),
            SplineVariant::Anticausal => (-y, if order % 2 == 0 { 1.0 } else { -1.0 }),
            SplineVariant::Symmetric => {
                return Err(Error::Unsupported(
                    "derivatives of the symmetric spline are not implemented".into(),
                ))
            }
        };
        let mut s = 0.0;
        for j in 0..=order {
            let c = gbinom(order as f64, j as i64);
            let sg = if j % 2 == 0 { 1.0 } else { -1.0 };
            s += sg * c * causal_value(lowered, arg - j as f64, self.trunc_terms, self.tail_tol)?;
        }
        Ok(sign * s)
    }
}

/// (-1)^k binom(α+1, k) for k = 0..n.
pub fn alternating_binomials(alpha: f64, n: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(n);
    let mut v = 1.0;
    for k in 0..n {
        c.push(v);
        v *= -(alpha + 1.0 - k as f64) / (k as f64 + 1.0);
    }
    c
}

/// β_+^α(x) from the causal series. Orders in (-1/2, 0) are accepted for derivative use.
pub fn causal_value(alpha: f64, x: f64, trunc_terms: usize, tail_tol: f64) -> Result<f64> {
    if x < 0.0 {
        return Ok(0.0);
    }
    if let Some(n) = as_natural(alpha) {
        return Ok(bspline_natural(n, x));
    }
    let m = x.floor() as usize;
    if m + 1 > trunc_terms {
        let tail = TAIL_SAFETY * x.powf(-alpha - 2.0);
        if tail <= tail_tol {
            return Ok(0.0);
        }
        return Err(Error::TruncationNotConverged { terms: trunc_terms, tail, tol: tail_tol });
    }
    let g = gamma(alpha + 1.0)?;
    let mut acc = Neumaier::default();
    let mut c = 1.0;
    for k in 0..=m {
        let d = x - k as f64;
        if d > 0.0 {
            acc.add(c * d.powf(alpha));
        }
        c *= -(alpha + 1.0 - k as f64) / (k as f64 + 1.0);
    }
    Ok(acc.value() / g)
}

/// β_+^α(j + t) for j = 0..count, t in [0, 1).
pub fn causal_lattice(alpha: f64, t: f64, count: usize) -> Result<Vec<f64>> {
    if let Some(n) = as_natural(alpha) {
        return Ok((0..count).map(|j| bspline_natural(n, j as f64 + t)).collect());
    }
    let g = gamma(alpha + 1.0)?;
    let c = alternating_binomials(alpha, count);
    let pw: Vec<f64> = (0..count)
        .map(|i| {
            let d = i as f64 + t;
            if d > 0.0 {
                d.powf(alpha)
            } else {
                0.0
            }
        })
        .collect();
    Ok((0..count)
        .into_par_iter()
        .map(|j| {
            let mut acc = Neumaier::default();
            for i in 0..=j {
                acc.add(c[j - i] * pw[i]);
            }
            acc.value() / g
        })
        .collect())
}

/// Coefficients (-1)^k binom(α+1, k + (α+1)/2) for k = 0..n (symmetric in k).
pub fn symmetric_coeffs(alpha: f64, n: usize) -> Result<Vec<f64>> {
    let g = alpha + 1.0;
    let h = g / 2.0;
    let mut c = Vec::with_capacity(n);
    let mut v = gamma(g + 1.0)? / (gamma(h + 1.0)?.powi(2));
    for k in 0..n {
        c.push(v);
        v *= -(h - k as f64) / (h + k as f64 + 1.0);
    }
    Ok(c)
}

fn symmetric_partial(alpha: f64, x: f64, c: &[f64], kmax: usize) -> f64 {
    let mut acc = Neumaier::default();
    acc.add(c[0] * star_power(x, alpha));
    for k in 1..=kmax {
        let kf = k as f64;
        acc.add(c[k] * (star_power(x - kf, alpha) + star_power(x + kf, alpha)));
    }
    acc.value()
}

const SYM_K0: usize = 64;

/// β_*^α(x) from the bilateral series, with the truncation error removed by
/// extrapolation in the cutoff K.
pub fn symmetric_value(alpha: f64, x: f64) -> Result<f64> {
    if let Some(n) = as_natural(alpha) {
        if n % 2 == 1 {
            return Ok(bspline_natural(n, x + (n as f64 + 1.0) / 2.0));
        }
    }
    let g = gamma(alpha + 1.0)?;
    let even = is_even_int(alpha);
    let levels = if even { 6 } else { 5 };
    let kmax = SYM_K0 << (levels - 1);
    let c = symmetric_coeffs(alpha, kmax + 1)?;
    let ks: Vec<usize> = (0..levels).map(|i| SYM_K0 << i).collect();
    // partial sums at each cutoff, accumulated incrementally
    let mut sums = Vec::with_capacity(levels);
    let mut acc = Neumaier::default();
    acc.add(c[0] * star_power(x, alpha));
    let mut next = 0;
    for k in 1..=kmax {
        let kf = k as f64;
        acc.add(c[k] * (star_power(x - kf, alpha) + star_power(x + kf, alpha)));
        if k == ks[next] {
            sums.push(acc.value());
            next += 1;
        }
    }
    let v = if even {
        // tail expands in (log K)/K^i and 1/K^i
        let mut a = DMatrix::<f64>::zeros(levels, levels);
        for (r, &k) in ks.iter().enumerate() {
            let kf = k as f64;
            let l = kf.ln();
            a[(r, 0)] = 1.0;
            for col in 1..levels {
                let p = ((col + 1) / 2) as i32;
                a[(r, col)] = if col % 2 == 1 { l / kf.powi(p) } else { 1.0 / kf.powi(p) };
            }
        }
        let b = DVector::from_vec(sums.clone());
        let sol = a
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::Domain("singular extrapolation system".into()))?;
        sol[0]
    } else {
        neville_at_zero(&ks.iter().map(|&k| 1.0 / k as f64).collect::<Vec<_>>(), &sums)
    };
    Ok(v / g)
}

/// Polynomial extrapolation of (h_i, y_i) to h = 0.
pub fn neville_at_zero(h: &[f64], y: &[f64]) -> f64 {
    let n = h.len();
    let mut p = y.to_vec();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (h[i + m] * p[i] - h[i] * p[i + 1]) / (h[i + m] - h[i]);
        }
    }
    p[0]
}

/// Raw partial sum of the symmetric series with cutoff K, no extrapolation.
pub fn symmetric_partial_sum(alpha: f64, x: f64, kmax: usize) -> Result<f64> {
    let c = symmetric_coeffs(alpha, kmax + 1)?;
    Ok(symmetric_partial(alpha, x, &c, kmax) / gamma(alpha + 1.0)?)
}

/// Moments μ_j = ∫ x^j β_+^α(x) dx for j = 0..=jmax, from the Taylor expansion of
/// ((1 - e^{-z})/z)^{α+1}.
pub fn causal_moments(alpha: f64, jmax: usize) -> Vec<f64> {
    // log((1-e^{-z})/z) = -z/2 + Σ_{k≥1} B_{2k} z^{2k} / (2k (2k)!)
    const B2K: [f64; 5] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
    let n = jmax + 1;
    let mut l = vec![0.0; n];
    if n > 1 {
        l[1] = -0.5;
    }
    let mut fact = 1.0;
    for i in 1..n {
        fact *= i as f64;
        if i % 2 == 0 && i / 2 - 1 < B2K.len() {
            l[i] = B2K[i / 2 - 1] / (i as f64 * fact);
        }
    }
    let scaled: Vec<f64> = l.iter().map(|v| v * (alpha + 1.0)).collect();
    let e = series_exp(&scaled);
    let mut out = Vec::with_capacity(n);
    let mut f = 1.0;
    for (j, v) in e.iter().enumerate() {
        if j > 0 {
            f *= j as f64;
        }
        let sg = if j % 2 == 0 { 1.0 } else { -1.0 };
        out.push(sg * f * v);
    }
    out
}

/// exp of a power series with zero constant term.
fn series_exp(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut e = vec![0.0; n];
    e[0] = 1.0;
    for m in 1..n {
        let mut s = 0.0;
        for k in 1..=m {
            s += k as f64 * a[k] * e[m - k];
        }
        e[m] = s / m as f64;
    }
    e
}

/// |Σ_{|τ|≤K} β(x-τ) - 1|.
pub fn partition_of_unity_residual(spec: &FractionalSpline, x: f64, k: i64) -> Result<f64> {
    let mut acc = Neumaier::default();
    for tau in -k..=k {
        acc.add(spec.eval(x - tau as f64)?);
    }
    Ok((acc.value() - 1.0).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub k_alpha: f64,
    pub c_alpha: f64,
}

fn dist_power(x: f64, alpha: f64) -> f64 {
    let d = (x - x.round()).abs();
    d.powf(alpha)
}

/// Fit K_α, C_α ≥ 0 so that |β(x)|(1+|x|^{α+2}) ≤ K_α d(x)^α + C_α on the grid,
/// d(x) the distance to the nearest integer. The fitted constants carry a 10% margin.
pub fn fit_decay_envelope(spec: &FractionalSpline, grid: &[f64]) -> Result<DecayFit> {
    let a = spec.alpha;
    let mut pts = Vec::with_capacity(grid.len());
    for &x in grid {
        let v = spec.eval(x)?.abs() * (1.0 + x.abs().powf(a + 2.0));
        pts.push((dist_power(x, a), v));
    }
    let n = pts.len() as f64;
    let (ms, mv) = pts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0 / n, acc.1 + p.1 / n));
    let (mut cov, mut var) = (0.0, 0.0);
    for &(s, v) in &pts {
        cov += (s - ms) * (v - mv);
        var += (s - ms) * (s - ms);
    }
    let k = if var > 0.0 { (cov / var).max(0.0) } else { 0.0 };
    let c = pts.iter().map(|&(s, v)| v - k * s).fold(0.0f64, f64::max);
    Ok(DecayFit { k_alpha: 1.1 * k, c_alpha: 1.1 * c + 1e-14 })
}

pub fn decay_envelope_residual(spec: &FractionalSpline, fit: &DecayFit, x: f64) -> Result<f64> {
    let a = spec.alpha;
    let v = spec.eval(x)?.abs() * (1.0 + x.abs().powf(a + 2.0));
    Ok(v - (fit.k_alpha * dist_power(x, a) + fit.c_alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_values() {
        assert_eq!(bspline_natural(0, 0.5), 1.0);
        assert_eq!(bspline_natural(1, 1.0), 1.0);
        assert!((bspline_natural(2, 1.5) - 0.75).abs() < 1e-15);
        assert_eq!(bspline_natural(3, 4.0), 0.0);
    }

    #[test]
    fn moments_of_natural() {
        // B_1 on [0,2]: mean 1, second moment 7/6
        let m = causal_moments(1.0, 2);
        assert!((m[0] - 1.0).abs() < 1e-15);
        assert!((m[1] - 1.0).abs() < 1e-15);
        assert!((m[2] - 7.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn odd_symmetric_is_centered_bspline() {
        let v = symmetric_value(3.0, 0.3).unwrap();
        assert!((v - bspline_natural(3, 2.3)).abs() < 1e-15);
    }
}
