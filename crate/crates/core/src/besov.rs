//! Weights, wavelet coefficients on the dyadic grid and the weighted sequence norm b^s_pq(w).

use crate::error::{Error, Result};
use crate::frac_wavelets::WaveletSystem;
use crate::functions::RealFn;
use crate::quad::{adaptive_split_smooth, Neumaier, Rule};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    Constant {
        #[serde(default = "one")]
        c: f64,
    },
    /// |x|^γ
    Power { gamma: f64 },
    /// base^{|⌊x⌋|}; r_w is nominal since this weight is not doubling
    ExpCell {
        base: f64,
        #[serde(default = "one")]
        r_w: f64,
    },
    /// piecewise linear through (xs, ys), zero outside
    Tabulated { xs: Vec<f64>, ys: Vec<f64>, r_w: f64 },
    /// x ↦ inner(-x)
    Reflected { inner: Box<WeightSpec> },
    Scaled { factor: f64, inner: Box<WeightSpec> },
    /// x ↦ inner(x - shift)
    Shifted { shift: f64, inner: Box<WeightSpec> },
}

fn one() -> f64 {
    1.0
}

impl WeightSpec {
    pub fn constant() -> Self {
        WeightSpec::Constant { c: 1.0 }
    }

    pub fn reflected(self) -> Self {
        WeightSpec::Reflected { inner: Box::new(self) }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WeightSpec::Constant { c } if !(*c > 0.0) => Err(Error::Config("constant weight must be positive".into())),
            WeightSpec::Power { gamma } if !(*gamma > -1.0) => {
                Err(Error::Config(format!("power weight needs gamma > -1, got {gamma}")))
            }
            WeightSpec::ExpCell { base, .. } if !(*base > 0.0) => Err(Error::Config("exp_cell base must be positive".into())),
            WeightSpec::Tabulated { xs, ys, r_w } => {
                if xs.len() < 2 || xs.len() != ys.len() || xs.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::Config("tabulated weight needs >= 2 increasing abscissae".into()));
                }
                if ys.iter().any(|&y| !(y > 0.0)) {
                    return Err(Error::Config("tabulated weight values must be positive".into()));
                }
                if !(*r_w >= 1.0) {
                    return Err(Error::Config("tabulated weight needs r_w >= 1".into()));
                }
                Ok(())
            }
            WeightSpec::Scaled { factor, inner } => {
                if !(*factor > 0.0) {
                    return Err(Error::Config("weight scale factor must be positive".into()));
                }
                inner.validate()
            }
            WeightSpec::Reflected { inner } | WeightSpec::Shifted { inner, .. } => inner.validate(),
            _ => Ok(()),
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        match self {
            WeightSpec::Constant { c } => *c,
            WeightSpec::Power { gamma } => x.abs().powf(*gamma),
            WeightSpec::ExpCell { base, .. } => base.powf(x.floor().abs()),
            WeightSpec::Tabulated { xs, ys, .. } => {
                if x < xs[0] || x > xs[xs.len() - 1] {
                    return 0.0;
                }
                let i = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
                let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
                ys[i - 1] * (1.0 - t) + ys[i] * t
            }
            WeightSpec::Reflected { inner } => inner.density(-x),
            WeightSpec::Scaled { factor, inner } => factor * inner.density(x),
            WeightSpec::Shifted { shift, inner } => inner.density(x - shift),
        }
    }

    /// ∫_l^r w^e, +∞ when w^e is not integrable there.
    pub fn mass_pow(&self, l: f64, r: f64, e: f64) -> f64 {
        if !(r > l) {
            return 0.0;
        }
        match self {
            WeightSpec::Constant { c } => c.powf(e) * (r - l),
            WeightSpec::Power { gamma } => {
                let g = gamma * e;
                if g <= -1.0 && l <= 0.0 && r >= 0.0 {
                    return f64::INFINITY;
                }
                let prim = |x: f64| x.signum() * x.abs().powf(g + 1.0) / (g + 1.0);
                prim(r) - prim(l)
            }
            WeightSpec::ExpCell { base, .. } => {
                let mut acc = Neumaier::default();
                let mut c = l.floor();
                while c < r {
                    let a = l.max(c);
                    let b = r.min(c + 1.0);
                    acc.add(base.powf(e * c.abs()) * (b - a));
                    c += 1.0;
                }
                acc.value()
            }
            WeightSpec::Tabulated { xs, .. } => {
                let (x0, x1) = (xs[0], xs[xs.len() - 1]);
                if e < 0.0 && (l < x0 || r > x1) {
                    return f64::INFINITY;
                }
                let (a, b) = (l.max(x0), r.min(x1));
                if !(b > a) {
                    return 0.0;
                }
                if e == 1.0 {
                    // trapezoid is exact on each linear piece
                    let mut pts = vec![a];
                    pts.extend(xs.iter().copied().filter(|&v| v > a && v < b));
                    pts.push(b);
                    return pts
                        .windows(2)
                        .map(|w| 0.5 * (w[1] - w[0]) * (self.density(w[0]) + self.density(w[1])))
                        .sum();
                }
                adaptive_split_smooth(|x| self.density(x).powf(e), a, b, xs, 1e-12 * (b - a))
                    .unwrap_or(f64::NAN)
            }
            WeightSpec::Reflected { inner } => inner.mass_pow(-r, -l, e),
            WeightSpec::Scaled { factor, inner } => factor.powf(e) * inner.mass_pow(l, r, e),
            WeightSpec::Shifted { shift, inner } => inner.mass_pow(l - shift, r - shift, e),
        }
    }

    pub fn mass(&self, l: f64, r: f64) -> f64 {
        self.mass_pow(l, r, 1.0)
    }

    pub fn r_w(&self) -> f64 {
        match self {
            WeightSpec::Constant { .. } => 1.0,
            WeightSpec::Power { gamma } => (gamma + 1.0).max(1.0),
            WeightSpec::ExpCell { r_w, .. } | WeightSpec::Tabulated { r_w, .. } => *r_w,
            WeightSpec::Reflected { inner } | WeightSpec::Scaled { inner, .. } | WeightSpec::Shifted { inner, .. } => {
                inner.r_w()
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            WeightSpec::Constant { .. } => true,
            WeightSpec::Reflected { inner } | WeightSpec::Scaled { inner, .. } | WeightSpec::Shifted { inner, .. } => {
                inner.is_constant()
            }
            _ => false,
        }
    }
}

/// ∫ over [2^{-d}(r-1/2), 2^{-d}(r+1/2)] of v, divided by 2^{-d} v(2^{-d} r).
pub fn usl_residual(v: &WeightSpec, d: u32, r: i64) -> Result<f64> {
    let h = 2f64.powi(-(d as i32));
    let c = h * r as f64;
    let pv = v.density(c);
    if !(pv > 0.0) {
        return Err(Error::Domain(format!("weight vanishes at {c}")));
    }
    Ok(v.mass(c - 0.5 * h, c + 0.5 * h) / (h * pv))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApEstimate {
    pub value: f64,
    pub per_scale: Vec<f64>,
    pub divergent: bool,
}

/// Lower bound for the A_p constant over balls of radius 2^k, |k| ≤ 8,
/// centred at j·2^k, |j| ≤ ball_count.
pub fn ap_estimate(w: &WeightSpec, p: f64, ball_count: usize) -> Result<ApEstimate> {
    if !(p > 1.0) {
        return Err(Error::Domain(format!("A_p needs p > 1, got {p}")));
    }
    w.validate()?;
    let pp = p / (p - 1.0);
    let bc = ball_count as i64;
    let per_scale: Vec<f64> = (-8i32..=8)
        .map(|k| {
            let rad = 2f64.powi(k);
            (-bc..=bc)
                .map(|j| {
                    let c = j as f64 * rad;
                    let (l, r) = (c - rad, c + rad);
                    let len = r - l;
                    let a = w.mass(l, r) / len;
                    let b = w.mass_pow(l, r, 1.0 - pp) / len;
                    a * b.powf(p / pp)
                })
                .fold(0.0, |m: f64, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
        })
        .collect();
    let bad = per_scale.iter().any(|v| !v.is_finite());
    let n = per_scale.len();
    let growing = per_scale[n - 4..].windows(2).all(|w| w[1] > 1.5 * w[0]);
    let value = per_scale.iter().copied().fold(0.0, f64::max);
    Ok(ApEstimate { value, per_scale, divergent: bad || growing })
}

/// q ∈ (0, ∞]; serialized as a number or the string "inf".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Exponent(v)),
            Raw::Str(s) if s == "inf" || s == "infinity" => Ok(Exponent(f64::INFINITY)),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad exponent {s}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub p: f64,
    pub q: Exponent,
    pub s: f64,
}

impl BesovParams {
    pub fn new(p: f64, q: f64, s: f64) -> Self {
        BesovParams { p, q: Exponent(q), s }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(Error::Config(format!("p must lie in [1, inf), got {}", self.p)));
        }
        if !(self.q.0 > 0.0) {
            return Err(Error::Config("q must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffRow {
    pub nu: u32,
    pub tau: i64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientGrid {
    pub rows: Vec<CoeffRow>,
    pub base_offset: i64,
    pub nu_max: u32,
    /// (ν, τ) entries whose input samples failed
    pub flagged: Vec<(u32, i64)>,
}

impl CoefficientGrid {
    pub fn get(&self, nu: u32, tau: i64) -> Option<f64> {
        self.rows
            .binary_search_by(|r| (r.nu, r.tau).cmp(&(nu, tau)))
            .ok()
            .map(|i| self.rows[i].lambda)
    }

    pub fn level(&self, nu: u32) -> impl Iterator<Item = &CoeffRow> {
        self.rows.iter().filter(move |r| r.nu == nu)
    }

    pub fn scaled(mut self, c: f64) -> Self {
        for r in &mut self.rows {
            r.lambda *= c;
        }
        self
    }

    /// Keeps levels ν ≤ nu_max.
    pub fn truncated(&self, nu_max: u32) -> Self {
        CoefficientGrid {
            rows: self.rows.iter().filter(|r| r.nu <= nu_max).cloned().collect(),
            base_offset: self.base_offset,
            nu_max: nu_max.min(self.nu_max),
            flagged: self.flagged.iter().copied().filter(|f| f.0 <= nu_max).collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("nu,tau,lambda\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{:.17e}", r.nu, r.tau, r.lambda);
        }
        s
    }

    /// Cell Q paired with (ν, τ): [o + (τ-o)/2^ν, o + (τ-o+1)/2^ν] with o the base offset.
    pub fn cell(&self, nu: u32, tau: i64) -> (f64, f64) {
        let h = 2f64.powi(-(nu as i32));
        let o = self.base_offset as f64;
        (o + (tau - self.base_offset) as f64 * h, o + (tau - self.base_offset + 1) as f64 * h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffRequest {
    pub nu_max: u32,
    /// level-0 translation range; level ν uses the same physical span
    pub tau_min: i64,
    pub tau_max: i64,
    /// interval outside of which the input is treated as zero
    pub window: (f64, f64),
    #[serde(default)]
    pub base_offset: i64,
    #[serde(default = "default_nodes")]
    pub nodes: usize,
}

fn default_nodes() -> usize {
    20
}

impl CoeffRequest {
    pub fn tau_range(&self, nu: u32) -> (i64, i64) {
        let o = self.base_offset;
        let k = 1i64 << nu;
        (o + (self.tau_min - o) * k, o + (self.tau_max + 1 - o) * k - 1)
    }
}

/// P_ν(i) = ∫ G(x) S(2^ν x - i) dx for i = i_lo..=i_hi. Returns values and a failure mask.
fn projections(
    g: &(impl RealFn + ?Sized),
    sys: &WaveletSystem,
    nu: u32,
    i_lo: i64,
    i_hi: i64,
    req: &CoeffRequest,
    rule: &Rule,
) -> Result<(Vec<f64>, Vec<bool>)> {
    let spline = sys.spline();
    let sc = 2f64.powi(nu as i32);
    let j_lo = (req.window.0 * sc).floor() as i64;
    let j_hi = (req.window.1 * sc).ceil() as i64 - 1;
    let count = (i_hi - i_lo + 1) as usize;
    if j_hi < j_lo {
        return Ok((vec![0.0; count], vec![false; count]));
    }
    let nq = rule.nodes.len();
    let cells = (j_hi - j_lo + 1) as usize;
    let samples: Vec<f64> = (0..cells * nq)
        .into_par_iter()
        .map(|k| {
            let j = j_lo + (k / nq) as i64;
            let x = (j as f64 + rule.nodes[k % nq]) / sc;
            if x < req.window.0 || x > req.window.1 {
                0.0
            } else {
                g.eval(x)
            }
        })
        .collect();
    let bad_cell: Vec<bool> = (0..cells).map(|c| samples[c * nq..(c + 1) * nq].iter().any(|v| !v.is_finite())).collect();
    let (dl, dh) = spline.d_range();
    let d_lo = (j_lo - i_hi).max(dl);
    let d_hi = (j_hi - i_lo).min(dh);
    if d_hi < d_lo {
        return Ok((vec![0.0; count], vec![false; count]));
    }
    let tables: Vec<Vec<f64>> = rule
        .nodes
        .par_iter()
        .map(|&t| spline.table(0, t, d_lo, d_hi))
        .collect::<Result<_>>()?;
    let out: Vec<(f64, bool)> = (i_lo..=i_hi)
        .into_par_iter()
        .map(|i| {
            let a = j_lo.max(i + d_lo);
            let b = j_hi.min(i + d_hi);
            let mut acc = Neumaier::default();
            let mut bad = false;
            for j in a..=b {
                let c = (j - j_lo) as usize;
                if bad_cell[c] {
                    bad = true;
                    continue;
                }
                let d = (j - i - d_lo) as usize;
                let mut cell = 0.0;
                for q in 0..nq {
                    cell += rule.weights[q] * samples[c * nq + q] * tables[q][d];
                }
                acc.add(cell);
            }
            (acc.value() / sc, bad)
        })
        .collect();
    Ok(out.into_iter().unzip())
}

/// λ_{0τ} = ⟨G, Φ̃_τ⟩ and λ_{ντ} = 2^{ν/2}⟨G, Ψ̃_{(ν-1)τ}⟩ on the requested grid.
pub fn coefficients(g: &(impl RealFn + ?Sized), sys: &WaveletSystem, req: &CoeffRequest) -> Result<CoefficientGrid> {
    if !(req.window.1 > req.window.0) {
        return Err(Error::Config("coefficient window must have positive length".into()));
    }
    if req.tau_max < req.tau_min {
        return Err(Error::Config("empty translation range".into()));
    }
    if sys.phi.dilation != 1 || sys.psi.dilation != 2 {
        return Err(Error::Config("system must carry dilation 1 scaling and dilation 2 wavelet sums".into()));
    }
    let rule = Rule::smoothed(req.nodes.max(2));
    let mut rows = Vec::new();
    let mut flagged = Vec::new();
    for nu in 0..=req.nu_max {
        let (t0, t1) = req.tau_range(nu);
        let (f, lo, hi, pre, stride) = if nu == 0 {
            (&sys.phi, sys.phi.lo + t0, sys.phi.hi() + t1, 1.0, 1i64)
        } else {
            (&sys.psi, sys.psi.lo + 2 * t0, sys.psi.hi() + 2 * t1, 2f64.powf(nu as f64 - 0.5), 2i64)
        };
        let (p, bad) = projections(g, sys, nu, lo, hi, req, &rule)?;
        let level: Vec<(i64, f64, bool)> = (t0..=t1)
            .into_par_iter()
            .map(|tau| {
                let mut acc = Neumaier::default();
                let mut fl = false;
                for (m, c) in f.coef.iter().enumerate() {
                    let i = stride * tau + f.lo + m as i64;
                    let k = (i - lo) as usize;
                    acc.add(c * p[k]);
                    fl |= bad[k] && *c != 0.0;
                }
                (tau, pre * acc.value(), fl)
            })
            .collect();
        for (tau, v, fl) in level {
            if fl {
                flagged.push((nu, tau));
                rows.push(CoeffRow { nu, tau, lambda: f64::NAN });
            } else {
                rows.push(CoeffRow { nu, tau, lambda: v });
            }
        }
    }
    Ok(CoefficientGrid { rows, base_offset: req.base_offset, nu_max: req.nu_max, flagged })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSum {
    pub nu: u32,
    /// Σ_τ |λ_{ντ}|^p w(Q_{ντ})
    pub weighted_p_sum: f64,
}

/// (Σ_ν 2^{qνs} (Σ_τ |λ_{ντ}|^p w(Q_{ντ}))^{q/p})^{1/q}; sup over ν when q = ∞.
pub fn sequence_norm(grid: &CoefficientGrid, params: &BesovParams, w: &WeightSpec) -> Result<f64> {
    Ok(sequence_norm_levels(grid, params, w)?.0)
}

pub fn sequence_norm_levels(
    grid: &CoefficientGrid,
    params: &BesovParams,
    w: &WeightSpec,
) -> Result<(f64, Vec<LevelSum>)> {
    params.validate()?;
    if !grid.flagged.is_empty() {
        return Err(Error::Quadrature { a: f64::NAN, b: f64::NAN, err: grid.flagged.len() as f64 });
    }
    let p = params.p;
    let q = params.q.0;
    let mut levels: Vec<LevelSum> = Vec::new();
    for nu in 0..=grid.nu_max {
        let mut acc = Neumaier::default();
        for r in grid.level(nu) {
            if r.lambda == 0.0 {
                continue;
            }
            let (l, h) = grid.cell(r.nu, r.tau);
            acc.add(r.lambda.abs().powf(p) * w.mass(l, h));
        }
        levels.push(LevelSum { nu, weighted_p_sum: acc.value() });
    }
    let norm = if q.is_infinite() {
        levels
            .iter()
            .map(|l| 2f64.powf(l.nu as f64 * params.s) * l.weighted_p_sum.powf(1.0 / p))
            .fold(0.0, f64::max)
    } else {
        let mut acc = Neumaier::default();
        for l in &levels {
            acc.add(2f64.powf(q * l.nu as f64 * params.s) * l.weighted_p_sum.powf(q / p));
        }
        acc.value().powf(1.0 / q)
    };
    if !norm.is_finite() {
        return Err(Error::Divergent("sequence norm is not finite".into()));
    }
    Ok((norm, levels))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub norm: f64,
    pub levels: Vec<LevelSum>,
    pub entries: usize,
    pub flagged: usize,
}

pub fn besov_norm_proxy(
    g: &(impl RealFn + ?Sized),
    params: &BesovParams,
    w: &WeightSpec,
    sys: &WaveletSystem,
    req: &CoeffRequest,
) -> Result<(NormReport, CoefficientGrid)> {
    let grid = coefficients(g, sys, req)?;
    let (norm, levels) = sequence_norm_levels(&grid, params, w)?;
    Ok((NormReport { norm, levels, entries: grid.rows.len(), flagged: grid.flagged.len() }, grid))
}

/// Σ λ_{0τ} Φ̃_τ(x) + Σ_{ν≥1} λ_{ντ} 2^{(ν-1)/2} Ψ̃(2^{ν-1}x - τ), diagnostic only.
pub fn partial_sum(grid: &CoefficientGrid, sys: &WaveletSystem, x: f64) -> Result<f64> {
    let mut acc = Neumaier::default();
    for r in &grid.rows {
        if r.lambda == 0.0 {
            continue;
        }
        let v = if r.nu == 0 {
            sys.phi.eval(x - r.tau as f64)?
        } else {
            let sc = 2f64.powi(r.nu as i32 - 1);
            sc.sqrt() * sys.psi.eval(sc * x - r.tau as f64)?
        };
        acc.add(r.lambda * v);
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masses() {
        assert_eq!(WeightSpec::constant().mass(0.0, 1.0), 1.0);
        assert!((WeightSpec::Power { gamma: 1.0 }.mass(0.0, 2.0) - 2.0).abs() < 1e-15);
        let e = WeightSpec::ExpCell { base: 0.5, r_w: 1.0 };
        assert_eq!(e.mass(3.0, 4.0), 0.125);
    }

    #[test]
    fn exponent_parses_inf() {
        let p: BesovParams = serde_json::from_str(r#"{"p":2,"q":"inf","s":0}"#).unwrap();
        assert!(p.q.0.is_infinite());
    }
}
