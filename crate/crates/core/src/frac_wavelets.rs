//! Fractional wavelets ψ_±^α, the combinations Ψ_±^α, spline sums in general,
//! and grid certification of the smooth-molecule conditions.

use crate::battle_lemarie::{lambda_coeffs, euler_frobenius_roots, BLSystem, PsiSign};
use crate::error::{Error, Result};
use crate::quad::Neumaier;
use crate::specfun::{gbinom, hurwitz_zeta};
use crate::splines::{
    as_natural, bspline_natural, bspline_natural_deriv, causal_lattice, causal_moments, causal_value,
    FractionalSpline, SplineVariant,
};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const SERIES_TRUNC: usize = 1 << 20;
const SERIES_TOL: f64 = 1e-12;

/// The generating spline of a system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Spline {
    Natural { n: usize },
    Causal { alpha: f64 },
    Anticausal { alpha: f64 },
}

impl Spline {
    pub fn order(&self) -> f64 {
        match *self {
            Spline::Natural { n } => n as f64,
            Spline::Causal { alpha } | Spline::Anticausal { alpha } => alpha,
        }
    }

    pub fn is_fractional(&self) -> bool {
        !matches!(self, Spline::Natural { .. })
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match *self {
            Spline::Natural { n } => Ok(bspline_natural(n, x)),
            Spline::Causal { alpha } => causal_value(alpha, x, SERIES_TRUNC, SERIES_TOL),
            Spline::Anticausal { alpha } => causal_value(alpha, -x, SERIES_TRUNC, SERIES_TOL),
        }
    }

    pub fn derivative(&self, order: usize, x: f64) -> Result<f64> {
        match *self {
            Spline::Natural { n } => Ok(bspline_natural_deriv(n, order, x)),
            Spline::Causal { alpha } => {
                FractionalSpline::new(alpha, SplineVariant::Causal)?.derivative(order, x)
            }
            Spline::Anticausal { alpha } => {
                FractionalSpline::new(alpha, SplineVariant::Anticausal)?.derivative(order, x)
            }
        }
    }

    /// μ_j = ∫ x^j S(x) dx, j = 0..=jmax.
    pub fn moments(&self, jmax: usize) -> Vec<f64> {
        match *self {
            Spline::Natural { n } => causal_moments(n as f64, jmax),
            Spline::Causal { alpha } => causal_moments(alpha, jmax),
            Spline::Anticausal { alpha } => causal_moments(alpha, jmax)
                .into_iter()
                .enumerate()
                .map(|(j, v)| if j % 2 == 0 { v } else { -v })
                .collect(),
        }
    }

    /// Range of integers d for which S(d + t), t ∈ [0,1), can be nonzero.
    pub fn d_range(&self) -> (i64, i64) {
        match *self {
            Spline::Natural { n } => (0, n as i64),
            Spline::Causal { .. } => (0, i64::MAX / 4),
            Spline::Anticausal { .. } => (i64::MIN / 4, 0),
        }
    }

    /// S^{(order)}(d + t) for d = d_lo..=d_hi.
    pub fn table(&self, order: usize, t: f64, d_lo: i64, d_hi: i64) -> Result<Vec<f64>> {
        if d_hi < d_lo {
            return Ok(Vec::new());
        }
        match *self {
            Spline::Natural { .. } | Spline::Causal { .. } => causal_table(self.order(), order, t, d_lo, d_hi),
            Spline::Anticausal { alpha } => {
                // S(d+t) = C(e + t') with -(d+t) = e + t'
                let (shift, tp) = if t == 0.0 { (0, 0.0) } else { (1, 1.0 - t) };
                let e_lo = -d_hi - shift;
                let e_hi = -d_lo - shift;
                let c = causal_table(alpha, order, tp, e_lo, e_hi)?;
                let sg = if order % 2 == 0 { 1.0 } else { -1.0 };
                Ok((d_lo..=d_hi)
                    .map(|d| sg * c[(-d - shift - e_lo) as usize])
                    .collect())
            }
        }
    }
}

/// C^{(order)}(e + t) for the causal spline of order a, e = e_lo..=e_hi.
fn causal_table(a: f64, order: usize, t: f64, e_lo: i64, e_hi: i64) -> Result<Vec<f64>> {
    let len = (e_hi - e_lo + 1) as usize;
    let mut out = vec![0.0; len];
    if e_hi < 0 {
        return Ok(out);
    }
    let lowered = a - order as f64;
    if let Some(n) = as_natural(a) {
        if order > n {
            return Ok(out);
        }
    } else if lowered <= -0.5 {
        return Err(Error::OrderOutOfRange(format!(
            "derivative of order {order} of a spline of order {a}"
        )));
    }
    let base = causal_lattice(lowered, t, (e_hi + 1) as usize)?;
    let c: Vec<f64> = (0..=order)
        .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 } * gbinom(order as f64, j as i64))
        .collect();
    for (idx, e) in (e_lo..=e_hi).enumerate() {
        if e < 0 {
            continue;
        }
        let mut s = 0.0;
        for (j, cj) in c.iter().enumerate() {
            let k = e - j as i64;
            if k >= 0 {
                s += cj * base[k as usize];
            }
        }
        out[idx] = s;
    }
    Ok(out)
}

/// F(y) = Σ_i coef[i] S(D y - (lo + i)) with dilation D ∈ {1, 2}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineSum {
    pub spline: Spline,
    pub dilation: u32,
    pub lo: i64,
    pub coef: Vec<f64>,
}

impl SplineSum {
    pub fn hi(&self) -> i64 {
        self.lo + self.coef.len() as i64 - 1
    }

    pub fn scaled(mut self, c: f64) -> SplineSum {
        for v in &mut self.coef {
            *v *= c;
        }
        self
    }

    /// x ↦ F(x - s).
    pub fn shifted(mut self, s: i64) -> SplineSum {
        self.lo += self.dilation as i64 * s;
        self
    }

    /// Indices m whose term can be nonzero at y.
    fn active(&self, y: f64) -> (i64, i64) {
        let u = self.dilation as f64 * y;
        let (dl, dh) = self.spline.d_range();
        // d = floor(u) - m must lie in [dl, dh]
        let fu = u.floor() as i64;
        let lo = fu.saturating_sub(dh).max(self.lo);
        let hi = fu.saturating_sub(dl).min(self.hi());
        (lo, hi)
    }

    pub fn eval(&self, y: f64) -> Result<f64> {
        self.derivative(0, y)
    }

    pub fn derivative(&self, order: usize, y: f64) -> Result<f64> {
        let (lo, hi) = self.active(y);
        let u = self.dilation as f64 * y;
        let mut acc = Neumaier::default();
        for m in lo..=hi {
            let c = self.coef[(m - self.lo) as usize];
            if c != 0.0 {
                acc.add(c * self.spline.derivative(order, u - m as f64)?);
            }
        }
        Ok(acc.value() * (self.dilation as f64).powi(order as i32))
    }

    /// F^{(order)} at y0 + i·step, i = 0..count. Requires dilation·step = 1/R for an integer R.
    pub fn sample(&self, order: usize, y0: f64, step: f64, count: usize) -> Result<Vec<f64>> {
        let dil = self.dilation as f64;
        let r_f = 1.0 / (dil * step);
        let r = r_f.round();
        if r < 1.0 || (r - r_f).abs() > 1e-9 * r_f {
            return Err(Error::Domain(format!(
                "lattice sampling needs dilation*step = 1/R, got step {step}"
            )));
        }
        let r = r as usize;
        let (dl, dh) = self.spline.d_range();
        let scale = dil.powi(order as i32);
        let mut out = vec![0.0; count];
        let per: Vec<Result<Vec<(usize, f64)>>> = (0..r.min(count))
            .into_par_iter()
            .map(|res| {
                // D y_i = u_res + j for i = res + R j
                let u = dil * y0 + res as f64 / r as f64;
                let b = u.floor();
                let t = u - b;
                let b = b as i64;
                let nj = (count - res).div_ceil(r) as i64;
                let d_lo = (b - self.hi()).max(dl);
                let d_hi = (b + nj - 1 - self.lo).min(dh);
                let tab = self.spline.table(order, t, d_lo, d_hi)?;
                let mut vals = Vec::with_capacity(nj as usize);
                for j in 0..nj {
                    // d = b + j - m ∈ [d_lo, d_hi]
                    let m_lo = (b + j - d_hi).max(self.lo);
                    let m_hi = (b + j - d_lo).min(self.hi());
                    let mut acc = Neumaier::default();
                    for m in m_lo..=m_hi {
                        let d = b + j - m;
                        acc.add(self.coef[(m - self.lo) as usize] * tab[(d - d_lo) as usize]);
                    }
                    vals.push((res + r * j as usize, acc.value() * scale));
                }
                Ok(vals)
            })
            .collect();
        for p in per {
            for (i, v) in p? {
                out[i] = v;
            }
        }
        Ok(out)
    }

    /// Σ_m coef_m m^k for k = 0..=kmax, with the algebraic tail of long
    /// fractional filters added from a fit of coef_m |m|^{α+2} at both ends.
    pub fn discrete_moments(&self, kmax: usize) -> Vec<f64> {
        let mut out = vec![0.0; kmax + 1];
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = Neumaier::default();
            for (i, c) in self.coef.iter().enumerate() {
                let m = (self.lo + i as i64) as f64;
                acc.add(c * m.powi(k as i32));
            }
            *o = acc.value();
        }
        if !self.spline.is_fractional() || self.coef.len() < 64 {
            return out;
        }
        let a = self.spline.order();
        let e = a + 2.0;
        let w = 8;
        let n = self.coef.len();
        let right: f64 = (n - w..n)
            .map(|i| self.coef[i] * ((self.lo + i as i64) as f64).abs().powf(e))
            .sum::<f64>()
            / w as f64;
        let left: f64 = (0..w)
            .map(|i| self.coef[i] * ((self.lo + i as i64) as f64).abs().powf(e))
            .sum::<f64>()
            / w as f64;
        let mr = self.hi() as f64 + 0.5;
        let ml = -(self.lo as f64) + 0.5;
        for (k, o) in out.iter_mut().enumerate() {
            let kf = k as f64;
            if kf >= a + 1.0 {
                continue;
            }
            if mr > 0.0 {
                *o += right * mr.powf(kf - a - 1.0) / (a + 1.0 - kf);
            }
            if ml > 0.0 {
                let sg = if k % 2 == 0 { 1.0 } else { -1.0 };
                *o += sg * left * ml.powf(kf - a - 1.0) / (a + 1.0 - kf);
            }
        }
        out
    }

    /// ∫ y^γ F(y) dy = D^{-γ-1} Σ_j binom(γ,j) μ_j(S) Σ_m coef_m m^{γ-j}.
    pub fn moment(&self, gamma: usize) -> f64 {
        let mu = self.spline.moments(gamma);
        let dm = self.discrete_moments(gamma);
        let mut s = 0.0;
        for j in 0..=gamma {
            s += gbinom(gamma as f64, j as i64) * mu[j] * dm[gamma - j];
        }
        s / (self.dilation as f64).powi(gamma as i32 + 1)
    }

    /// Interval outside of which F vanishes (infinite for fractional splines).
    pub fn support(&self) -> (f64, f64) {
        let d = self.dilation as f64;
        match self.spline {
            Spline::Natural { n } => (self.lo as f64 / d, (self.hi() + n as i64 + 1) as f64 / d),
            Spline::Causal { .. } => (self.lo as f64 / d, f64::INFINITY),
            Spline::Anticausal { .. } => (f64::NEG_INFINITY, self.hi() as f64 / d),
        }
    }
}

/// β_*^{2α+1}(m), m = 0..=m_max, as Fourier coefficients of
/// A(ω) = (2 sin(ω/2))^{2α+2} Σ_p |ω + 2πp|^{-2α-2}.
pub fn autocorrelation(alpha: f64, m_max: usize) -> Vec<f64> {
    let n = (4 * (m_max + 1)).next_power_of_two().max(1 << 15);
    let g2 = 2.0 * alpha + 2.0;
    let norm = (2.0 * PI).powf(-g2);
    let mut buf: Vec<Complex<f64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            if j == 0 {
                return Complex::new(1.0, 0.0);
            }
            let q = j as f64 / n as f64;
            let w = 2.0 * PI * q;
            let s = (2.0 * (w / 2.0).sin()).powf(g2);
            let z = hurwitz_zeta(g2, q) + hurwitz_zeta(g2, 1.0 - q);
            Complex::new(s * norm * z, 0.0)
        })
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    (0..=m_max).map(|m| buf[m].re / n as f64).collect()
}

/// Which side the fractional spline sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }
}

/// Filter g_k = (-1)^k 2^{-α} Σ_{l≥0} binom(α+1,l) β_*^{2α+1}(l+k-1) for |k| ≤ K.
/// Returns (g, tail bound on the neglected l-terms).
pub fn psi_filter(alpha: f64, half_width: usize) -> (Vec<f64>, f64) {
    let k = half_width as i64;
    let l_max = 4 * half_width + 64;
    let a = autocorrelation(alpha, l_max + half_width + 2);
    let binom: Vec<f64> = (0..=l_max).map(|l| gbinom(alpha + 1.0, l as i64)).collect();
    let pre = 2f64.powf(-alpha);
    let g: Vec<f64> = (-k..=k)
        .into_par_iter()
        .map(|kk| {
            let mut acc = Neumaier::default();
            for (l, b) in binom.iter().enumerate() {
                let idx = (l as i64 + kk - 1).unsigned_abs() as usize;
                acc.add(b * a[idx]);
            }
            let sg = if kk.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            sg * pre * acc.value()
        })
        .collect();
    let asum: f64 = a.iter().map(|v| v.abs()).sum::<f64>() * 2.0;
    let tail = pre * binom[l_max].abs() * asum;
    (g, tail)
}

/// ψ_±^α and Ψ_±^α of a fixed fractional order as spline sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FracWavelet {
    pub alpha: f64,
    pub side: Side,
    pub n: usize,
    pub half_width: usize,
    pub lambda: Vec<f64>,
    /// ψ as Σ g_m S(2x - m)
    pub psi: SplineSum,
    /// Ψ as Σ h_m S(2x - m), unshifted
    pub big_psi: SplineSum,
    pub tail_bound: f64,
}

impl FracWavelet {
    /// ψ_− is the mirror image of ψ_+, i.e. the reversed filter against β_−.
    pub fn new(alpha: f64, side: Side, n: usize, half_width: usize) -> Result<Self> {
        if !(alpha > 0.0) || as_natural(alpha).is_some() {
            return Err(Error::OrderOutOfRange(format!(
                "fractional wavelets need a positive non-integer order, got {alpha}"
            )));
        }
        if half_width < 8 {
            return Err(Error::Domain("filter half width must be at least 8".into()));
        }
        let roots = euler_frobenius_roots(n)?;
        let lambda = lambda_coeffs(&roots);
        let (g, tail) = psi_filter(alpha, half_width);
        let k = half_width as i64;
        let (spline, gcoef) = match side {
            Side::Plus => (Spline::Causal { alpha }, g),
            Side::Minus => (Spline::Anticausal { alpha }, g.into_iter().rev().collect()),
        };
        let psi = SplineSum { spline, dilation: 2, lo: -k, coef: gcoef };
        let big_psi = combine(&psi, &lambda, n);
        Ok(FracWavelet { alpha, side, n, half_width, lambda, psi, big_psi, tail_bound: tail })
    }

    pub fn psi(&self, x: f64) -> Result<f64> {
        self.psi.eval(x)
    }

    pub fn big_psi(&self, x: f64) -> Result<f64> {
        self.big_psi.eval(x)
    }
}

/// Ψ(x) = Σ_j λ_j/(2(-1)^j) [ψ(x+n+j) + ψ(x+n-j)] as a filter on S(2x - m).
pub fn combine(psi: &SplineSum, lambda: &[f64], n: usize) -> SplineSum {
    let n = n as i64;
    let lo = psi.lo - 4 * n;
    let hi = psi.hi();
    let mut h = vec![0.0; (hi - lo + 1) as usize];
    for (j, lj) in lambda.iter().enumerate() {
        let j = j as i64;
        let cj = lj / (2.0 * if j % 2 == 0 { 1.0 } else { -1.0 });
        for t in [n + j, n - j] {
            // ψ(x + t) = Σ_m g_{m+2t} S(2x - m)
            for (i, g) in psi.coef.iter().enumerate() {
                let m = psi.lo + i as i64 - 2 * t;
                h[(m - lo) as usize] += cj * g;
            }
        }
    }
    SplineSum { spline: psi.spline, dilation: 2, lo, coef: h }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoleculeParams {
    pub delta: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "N")]
    pub n: i64,
    #[serde(rename = "J")]
    pub j: f64,
    pub s: f64,
    pub p: f64,
    pub r_w: f64,
}

/// M upper bound allowed by a spline of order α for smoothness s.
pub fn m_branch_bound(alpha: f64, s: f64) -> f64 {
    if s >= -1.0 {
        alpha + 1.0 - s.floor()
    } else {
        alpha + 2.0 + s
    }
}

pub fn molecule_params_for(p: f64, _q: f64, s: f64, r_w: f64, alpha: f64) -> Result<MoleculeParams> {
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("p must be >= 1, got {p}")));
    }
    let j = if p > 1.0 { r_w / p + 1.0 - 1.0 / p } else { r_w };
    let n = ((j - s - 1.0).floor() as i64).max(-1);
    let delta = ((s - s.floor() + 1.0) / 2.0).min(1.0);
    let bound = m_branch_bound(alpha, s);
    if bound <= j {
        return Err(Error::Infeasible(format!(
            "M-bound: order {alpha} allows M <= {bound} but M > J = {j} is required"
        )));
    }
    let m = bound.min(j + 1.0);
    Ok(MoleculeParams { delta, m, n, j, s, p, r_w })
}

/// Uniform grid in the normalized variable y = 2^ν x - τ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoleculeGrid {
    pub y_min: f64,
    pub y_max: f64,
    /// spacing; 1/(2·step) must be an integer
    pub step: f64,
    /// pair separations for the Hölder conditions, in grid steps
    pub hoelder_offsets: Vec<usize>,
    pub moment_tol: f64,
}

impl Default for MoleculeGrid {
    fn default() -> Self {
        MoleculeGrid {
            y_min: -40.0,
            y_max: 40.0,
            step: 1.0 / 32.0,
            hoelder_offsets: vec![1, 2, 4, 8, 16, 32, 64],
            moment_tol: 1e-5,
        }
    }
}

impl MoleculeGrid {
    pub fn coarse() -> Self {
        MoleculeGrid {
            y_min: -24.0,
            y_max: 24.0,
            step: 1.0 / 16.0,
            hoelder_offsets: vec![1, 4, 16],
            moment_tol: 1e-5,
        }
    }

    fn count(&self) -> usize {
        ((self.y_max - self.y_min) / self.step).round() as usize + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub name: String,
    pub order: Option<usize>,
    /// max normalized violation (lhs / rhs); for M1 the absolute moment
    pub value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoleculeReport {
    pub nu: u32,
    pub tau: i64,
    pub params: MoleculeParams,
    pub conditions: Vec<ConditionResult>,
    pub pass: bool,
}

const SUP_POINTS: usize = 64;

/// Checks m_Q(x) = 2^{ν/2} F(2^ν x - τ) on the grid. ν = 0 uses the starred set.
pub fn molecule_check(
    f: &SplineSum,
    nu: u32,
    tau: i64,
    params: &MoleculeParams,
    grid: &MoleculeGrid,
) -> Result<MoleculeReport> {
    let mut conditions = Vec::new();
    let sc = 2f64.powi(nu as i32);
    let xq = tau as f64 / sc;
    let amp = sc.sqrt();
    let count = grid.count();
    let xs: Vec<f64> = (0..count).map(|i| (grid.y_min + i as f64 * grid.step + tau as f64) / sc).collect();
    let starred = nu == 0;
    let m = params.m;
    let s = params.s;
    let sfloor = s.floor();

    if !starred && params.n >= 0 {
        for g in 0..=params.n as usize {
            // ∫ x^γ m_Q = 2^{-ν/2-νγ} Σ_j binom(γ,j) τ^{γ-j} ∫ y^j F
            let mut acc = 0.0;
            for j in 0..=g {
                acc += gbinom(g as f64, j as i64) * (tau as f64).powi((g - j) as i32) * f.moment(j);
            }
            let v = (acc * amp.recip() * sc.powi(-(g as i32))).abs();
            conditions.push(ConditionResult {
                name: "M1".into(),
                order: Some(g),
                value: v,
                pass: v <= grid.moment_tol,
            });
        }
    }

    let vals = f.sample(0, grid.y_min, grid.step, count)?;
    let exp2 = if starred { m } else { m.max(m - s) };
    let r2 = xs
        .par_iter()
        .zip(vals.par_iter())
        .map(|(&x, &v)| {
            let lhs = (amp * v).abs();
            let rhs = if starred {
                (1.0 + (x - xq).abs()).powf(-exp2)
            } else {
                amp * (1.0 + sc * (x - xq).abs()).powf(-exp2)
            };
            lhs / rhs
        })
        .reduce(|| 0.0, f64::max);
    conditions.push(ConditionResult {
        name: if starred { "M2*".into() } else { "M2".into() },
        order: None,
        value: r2,
        pass: r2 <= 1.0,
    });

    if s >= 0.0 {
        let gmax = sfloor as usize;
        let first = if starred { 1 } else { 0 };
        let mut deriv_cache: Vec<Option<Vec<f64>>> = vec![None; gmax + 1];
        deriv_cache[0] = Some(vals.clone());
        for g in first..=gmax {
            let d = match &deriv_cache[g] {
                Some(d) => d.clone(),
                None => {
                    let d = f.sample(g, grid.y_min, grid.step, count)?;
                    deriv_cache[g] = Some(d.clone());
                    d
                }
            };
            let fac = amp * sc.powi(g as i32);
            let r3 = xs
                .par_iter()
                .zip(d.par_iter())
                .map(|(&x, &v)| {
                    let lhs = (fac * v).abs();
                    let rhs = if starred {
                        (1.0 + (x - xq).abs()).powf(-m)
                    } else {
                        fac * (1.0 + sc * (x - xq).abs()).powf(-m)
                    };
                    lhs / rhs
                })
                .reduce(|| 0.0, f64::max);
            conditions.push(ConditionResult {
                name: if starred { "M3*".into() } else { "M3".into() },
                order: Some(g),
                value: r3,
                pass: r3 <= 1.0,
            });
        }
        let g = gmax;
        let d = match &deriv_cache[g] {
            Some(d) => d.clone(),
            None => f.sample(g, grid.y_min, grid.step, count)?,
        };
        let fac = amp * sc.powi(g as i32);
        let delta = params.delta;
        let r4 = (0..count)
            .into_par_iter()
            .map(|i| {
                let mut worst = 0.0f64;
                for &o in &grid.hoelder_offsets {
                    let k = i + o;
                    if k >= count {
                        continue;
                    }
                    let (x, y) = (xs[i], xs[k]);
                    let h = (y - x).abs();
                    let lhs = fac * (d[i] - d[k]).abs();
                    let mut sup = 0.0f64;
                    for jz in 0..=SUP_POINTS {
                        let z = -h + 2.0 * h * jz as f64 / SUP_POINTS as f64;
                        let e = if starred {
                            (1.0 + (x - z - xq).abs()).powf(-m)
                        } else {
                            (1.0 + sc * (x - z - xq).abs()).powf(-m)
                        };
                        sup = sup.max(e);
                    }
                    let rhs = if starred {
                        h.powf(delta) * sup
                    } else {
                        fac * sc.powf(delta) * h.powf(delta) * sup
                    };
                    worst = worst.max(lhs / rhs);
                }
                worst
            })
            .reduce(|| 0.0, f64::max);
        conditions.push(ConditionResult {
            name: if starred { "M4*".into() } else { "M4".into() },
            order: Some(g),
            value: r4,
            pass: r4 <= 1.0,
        });
    }
    let pass = conditions.iter().all(|c| c.pass);
    Ok(MoleculeReport { nu, tau, params: *params, conditions, pass })
}

/// Largest c ∈ (0, 1] with margin 0.9 making the envelope conditions hold for c·F on the grid.
pub fn calibrate_constant(f: &SplineSum, nu: u32, params: &MoleculeParams, grid: &MoleculeGrid) -> Result<f64> {
    let rep = molecule_check(f, nu, 0, params, grid)?;
    let worst = rep
        .conditions
        .iter()
        .filter(|c| c.name != "M1")
        .map(|c| c.value)
        .fold(0.0f64, f64::max);
    if worst == 0.0 {
        return Ok(1.0);
    }
    Ok((0.9 / worst).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    NaturalBl,
    Fractional,
}

/// Normalized pair {Φ̃, Ψ̃} of one order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletSystem {
    pub kind: SystemKind,
    pub order: f64,
    pub shift_k: i64,
    pub shift_s: i64,
    /// Φ̃ as a dilation-1 spline sum
    pub phi: SplineSum,
    /// Ψ̃ as a dilation-2 spline sum
    pub psi: SplineSum,
    pub lambda_prime: Option<f64>,
    pub lambda_dprime: Option<f64>,
    pub c0: Option<f64>,
    pub c: Option<f64>,
    pub combination_n: usize,
    pub psi_sign: PsiSign,
}

impl WaveletSystem {
    pub fn natural(n: usize, shift_k: i64, shift_s: i64, sign: PsiSign) -> Result<Self> {
        let bl = BLSystem::new(n, shift_k, shift_s)?.with_sign(sign);
        let (lo, h) = bl.wavelet_filter();
        let spline = Spline::Natural { n };
        let phi = SplineSum { spline, dilation: 1, lo: shift_k, coef: vec![bl.beta_n / bl.lambda_prime] };
        let psi = SplineSum { spline, dilation: 2, lo, coef: h }.scaled(1.0 / bl.lambda_dprime);
        Ok(WaveletSystem {
            kind: SystemKind::NaturalBl,
            order: n as f64,
            shift_k,
            shift_s,
            phi,
            psi,
            lambda_prime: Some(bl.lambda_prime),
            lambda_dprime: Some(bl.lambda_dprime),
            c0: None,
            c: None,
            combination_n: n,
            psi_sign: sign,
        })
    }

    /// Fractional system with explicit constants c0, c.
    pub fn fractional(
        alpha: f64,
        side: Side,
        n: usize,
        shift_k: i64,
        shift_s: i64,
        c0: f64,
        c: f64,
        half_width: usize,
    ) -> Result<Self> {
        let fw = FracWavelet::new(alpha, side, n, half_width)?;
        let spline = fw.psi.spline;
        let phi = SplineSum { spline, dilation: 1, lo: shift_k, coef: vec![c0] };
        let psi = fw.big_psi.clone().shifted(shift_s).scaled(c);
        Ok(WaveletSystem {
            kind: SystemKind::Fractional,
            order: alpha,
            shift_k,
            shift_s,
            phi,
            psi,
            lambda_prime: None,
            lambda_dprime: None,
            c0: Some(c0),
            c: Some(c),
            combination_n: n,
            psi_sign: PsiSign::Plus,
        })
    }

    /// Fractional system with c0, c calibrated on the coarse molecule grid.
    pub fn fractional_calibrated(
        alpha: f64,
        side: Side,
        n: usize,
        shift_k: i64,
        shift_s: i64,
        params: &MoleculeParams,
        half_width: usize,
    ) -> Result<Self> {
        let fw = FracWavelet::new(alpha, side, n, half_width)?;
        let spline = fw.psi.spline;
        let grid = MoleculeGrid::coarse();
        let unit_phi = SplineSum { spline, dilation: 1, lo: 0, coef: vec![1.0] };
        let c0 = calibrate_constant(&unit_phi, 0, params, &grid)?;
        let c = calibrate_constant(&fw.big_psi, 1, params, &grid)?;
        let phi = SplineSum { spline, dilation: 1, lo: shift_k, coef: vec![c0] };
        let psi = fw.big_psi.shifted(shift_s).scaled(c);
        Ok(WaveletSystem {
            kind: SystemKind::Fractional,
            order: alpha,
            shift_k,
            shift_s,
            phi,
            psi,
            lambda_prime: None,
            lambda_dprime: None,
            c0: Some(c0),
            c: Some(c),
            combination_n: n,
            psi_sign: PsiSign::Plus,
        })
    }

    pub fn spline(&self) -> Spline {
        self.phi.spline
    }

    pub fn scaling(&self, x: f64) -> Result<f64> {
        self.phi.eval(x)
    }

    pub fn wavelet(&self, x: f64) -> Result<f64> {
        self.psi.eval(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_parameter_sets() {
        let a = molecule_params_for(2.0, 2.0, 0.0, 1.0, 5.0 / 3.0).unwrap();
        assert_eq!((a.j, a.n, a.m), (1.0, 0, 2.0));
        let b = molecule_params_for(2.0, 2.0, -1.0 / 3.0, 1.0, 4.0 / 3.0).unwrap();
        assert_eq!((b.j, b.n, b.m), (1.0, 0, 2.0));
        assert_eq!(m_branch_bound(5.0, -2.0), 5.0);
    }

    #[test]
    fn autocorrelation_at_zero_lag_of_odd_order() {
        // α = 1: β_*^3(0) = B_3(2) = 2/3
        let a = autocorrelation(1.0, 4);
        assert!((a[0] - 2.0 / 3.0).abs() < 1e-12, "{}", a[0]);
        assert!((a[1] - 1.0 / 6.0).abs() < 1e-12);
        assert!(a[2].abs() < 1e-12);
    }

    #[test]
    fn anticausal_table_mirrors_causal() {
        let s = Spline::Anticausal { alpha: 0.5 };
        let t = s.table(0, 0.25, -3, 0).unwrap();
        for (i, d) in (-3..=0).enumerate() {
            let x = d as f64 + 0.25;
            assert!((t[i] - s.eval(x).unwrap()).abs() < 1e-13);
        }
    }
}
