//! Two-weight discrete Hardy constants 𝒩, ℳ and a brute-force lower bound for the
//! best constant of the discrete inequality they govern.

use crate::besov::WeightSpec;
use crate::error::{Error, Result};
use crate::fracint::IntSign;
use crate::quad::Neumaier;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Physical length appended beyond the truncation when summing tails.
const TAIL_SPAN: f64 = 256.0;
const TAIL_REL: f64 = 1e-13;

/// Where the r-th cell sits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CellScheme {
    /// [A + (r-A)/2^d, A + (r-A+1)/2^d], r ≥ A
    Anchored { anchor: i64, d: u32 },
    /// [r - 1/2, r + 1/2], r ≥ 0
    Centered,
}

impl CellScheme {
    fn first(&self) -> i64 {
        match *self {
            CellScheme::Anchored { anchor, .. } => anchor,
            CellScheme::Centered => 0,
        }
    }

    fn per_unit(&self) -> usize {
        match *self {
            CellScheme::Anchored { d, .. } => 1 << d,
            CellScheme::Centered => 1,
        }
    }

    /// Cell of the i-th index counted from the first one.
    pub fn cell(&self, i: usize) -> (f64, f64) {
        match *self {
            CellScheme::Anchored { anchor, d } => {
                let h = 2f64.powi(-(d as i32));
                (anchor as f64 + i as f64 * h, anchor as f64 + (i + 1) as f64 * h)
            }
            CellScheme::Centered => (i as f64 - 0.5, i as f64 + 0.5),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    pub constant: f64,
    /// truncation R, in unit lengths
    pub truncation: usize,
    pub tail_estimate: f64,
    pub sup_first: f64,
    pub sup_second: f64,
    pub argmax_first: i64,
    pub argmax_second: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brute_force_lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

impl HardyReport {
    pub fn accepted(&self) -> bool {
        self.tail_estimate < 0.01 * self.constant
    }

    pub fn with_lower_bound(mut self, lb: f64) -> Self {
        self.brute_force_lower = Some(lb);
        self.ratio = Some(if self.constant > 0.0 { lb / self.constant } else { 0.0 });
        self
    }
}

/// p^{1/p} p'^{1/p'}, the factor allowed between the lower bound and 𝒩 in the checks.
pub fn c_eq(p: f64) -> f64 {
    let pp = p / (p - 1.0);
    p.powf(1.0 / p) * pp.powf(1.0 / pp)
}

fn check_p(p: f64) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("Hardy constants need 1 < p < inf, got {p}")));
    }
    Ok(p / (p - 1.0))
}

/// w masses from the first cell on, extended past `count` cells until the kernel-weighted
/// terms are negligible.
fn extended_masses(w: &WeightSpec, cells: CellScheme, count: usize, grow: f64) -> Result<Vec<f64>> {
    let cap = count + (TAIL_SPAN * cells.per_unit() as f64) as usize;
    let mut out = Vec::with_capacity(count + 64);
    let mut acc = 0.0;
    let mut quiet = 0usize;
    for i in 0..cap {
        let (l, r) = cells.cell(i);
        let m = w.mass(l, r);
        if !m.is_finite() {
            return Err(Error::Divergent(format!("weight mass is not finite on [{l}, {r}]")));
        }
        acc += m;
        out.push(m);
        if i >= count {
            let term = m * ((i + 1) as f64).powf(grow.max(0.0) + 2.0);
            if term <= TAIL_REL * acc {
                quiet += 1;
                if quiet >= 16 {
                    return Ok(out);
                }
            } else {
                quiet = 0;
            }
        }
    }
    Err(Error::Divergent(format!(
        "tail sum of the weight does not settle within {} units past the truncation",
        TAIL_SPAN
    )))
}

struct TwoSup {
    first: f64,
    second: f64,
    arg_first: usize,
    arg_second: usize,
    profile: Vec<(f64, f64)>,
}

/// sup_τ (Σ_{r≥τ}(r-τ+1)^{e1} W_r)^{1/p} (Σ_{r≤τ} U_r)^{1/p'} and its partner with the
/// kernel (τ-r+1)^{e2} on the U side; τ ranges over the first `taus` indices.
fn two_sup(wm: &[f64], um: &[f64], taus: usize, e1: f64, e2: f64, p: f64) -> Result<TwoSup> {
    let pp = p / (p - 1.0);
    let mut suffix = vec![0.0; wm.len() + 1];
    for i in (0..wm.len()).rev() {
        suffix[i] = suffix[i + 1] + wm[i];
    }
    let mut prefix = vec![0.0; um.len() + 1];
    for i in 0..um.len() {
        prefix[i + 1] = prefix[i] + um[i];
    }
    let vals: Vec<(f64, f64)> = (0..taus)
        .into_par_iter()
        .map(|t| {
            let mut a = Neumaier::default();
            for (r, w) in wm.iter().enumerate().skip(t) {
                a.add(((r - t + 1) as f64).powf(e1) * w);
            }
            let mut b = Neumaier::default();
            for (r, u) in um.iter().enumerate().take(t + 1) {
                b.add(((t - r + 1) as f64).powf(e2) * u);
            }
            let f = a.value().powf(1.0 / p) * prefix[t + 1].powf(1.0 / pp);
            let s = suffix[t].powf(1.0 / p) * b.value().powf(1.0 / pp);
            (f, s)
        })
        .collect();
    let mut out = TwoSup { first: 0.0, second: 0.0, arg_first: 0, arg_second: 0, profile: Vec::new() };
    for (i, (f, s)) in vals.iter().enumerate() {
        if f.is_nan() || s.is_nan() {
            return Err(Error::Divergent("undefined product in the Hardy supremum".into()));
        }
        if *f > out.first {
            out.first = *f;
            out.arg_first = i;
        }
        if *s > out.second {
            out.second = *s;
            out.arg_second = i;
        }
    }
    if !out.first.is_finite() || !out.second.is_finite() {
        return Err(Error::Divergent("infinite Hardy supremum".into()));
    }
    // a sup still climbing at the edge of the τ range means the constant is infinite
    let tail = taus.saturating_sub((taus / 16).max(4));
    let climbing = |sel: fn(&(f64, f64)) -> f64, arg: usize| {
        arg + 1 >= taus && taus > 8 && vals[tail..].windows(2).all(|w| sel(&w[1]) > sel(&w[0]))
    };
    if climbing(|v| v.0, out.arg_first) || climbing(|v| v.1, out.arg_second) {
        return Err(Error::Divergent("partial suprema grow with the truncation".into()));
    }
    out.profile = vals;
    Ok(out)
}

/// Common evaluator: kernel exponents (e1, e2), cell scheme, prefactor.
#[allow(clippy::too_many_arguments)]
fn evaluate(
    p: f64,
    u_tilde: &WeightSpec,
    w: &WeightSpec,
    cells: CellScheme,
    e1: f64,
    e2: f64,
    prefactor: f64,
    r_trunc: usize,
) -> Result<(HardyReport, Vec<ProfileRow>)> {
    let pp = check_p(p)?;
    if r_trunc < 16 {
        return Err(Error::Config(format!("Hardy truncation must be >= 16, got {r_trunc}")));
    }
    u_tilde.validate()?;
    w.validate()?;
    let taus = r_trunc * cells.per_unit() + 1;
    let wm = extended_masses(w, cells, taus, e1)?;
    let um: Vec<f64> = (0..taus)
        .into_par_iter()
        .map(|i| {
            let (l, r) = cells.cell(i);
            u_tilde.mass(l, r).powf(1.0 - pp)
        })
        .collect();
    if um.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergent("a cell of the u weight has zero mass".into()));
    }
    let full = two_sup(&wm, &um, taus, e1, e2, p)?;
    let cut = two_sup(&wm[..taus.min(wm.len())], &um, taus, e1, e2, p)?;
    let constant = prefactor * (full.first + full.second);
    let truncated = prefactor * (cut.first + cut.second);
    let first = cells.first();
    let profile = full
        .profile
        .iter()
        .enumerate()
        .map(|(i, (f, s))| ProfileRow { tau: first + i as i64, first: prefactor * f, second: prefactor * s })
        .collect();
    let report = HardyReport {
        constant,
        truncation: r_trunc,
        tail_estimate: (constant - truncated).abs(),
        sup_first: prefactor * full.first,
        sup_second: prefactor * full.second,
        argmax_first: first + full.arg_first as i64,
        argmax_second: first + full.arg_second as i64,
        d: None,
        brute_force_lower: None,
        ratio: None,
    };
    Ok((report, profile))
}

/// Parameters shared by the 𝒩 constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardySetup {
    pub alpha: f64,
    pub p: f64,
    pub u: WeightSpec,
    /// minorant ũ ≤ u; defaults to u
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_tilde: Option<WeightSpec>,
    pub w: WeightSpec,
    #[serde(default)]
    pub a: f64,
    pub sign: IntSign,
    #[serde(default = "default_r")]
    pub r_trunc: usize,
}

fn default_r() -> usize {
    64
}

impl HardySetup {
    pub fn new(alpha: f64, p: f64, u: WeightSpec, w: WeightSpec, sign: IntSign) -> Self {
        HardySetup { alpha, p, u, u_tilde: None, w, a: 0.0, sign, r_trunc: default_r() }
    }

    fn ut(&self) -> &WeightSpec {
        self.u_tilde.as_ref().unwrap_or(&self.u)
    }

    /// The minus problem as the reflection of a plus problem.
    fn as_plus(&self) -> HardySetup {
        match self.sign {
            IntSign::Plus => self.clone(),
            IntSign::Minus => HardySetup {
                alpha: self.alpha,
                p: self.p,
                u: self.u.clone().reflected(),
                u_tilde: self.u_tilde.clone().map(WeightSpec::reflected),
                w: self.w.clone().reflected(),
                a: -self.a,
                sign: IntSign::Plus,
                r_trunc: self.r_trunc,
            },
        }
    }

    fn exponents(&self) -> (f64, f64) {
        let pp = self.p / (self.p - 1.0);
        (self.p * (2.0 * self.alpha - 1.0), pp * (2.0 * self.alpha - 1.0))
    }
}

/// One row per cut point τ: the two products inside the suprema.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub tau: i64,
    pub first: f64,
    pub second: f64,
}

pub fn profile_to_csv(rows: &[ProfileRow]) -> String {
    let mut s = String::from("tau,first,second\n");
    for r in rows {
        s.push_str(&format!("{},{:.17e},{:.17e}\n", r.tau, r.first, r.second));
    }
    s
}

/// 𝒩_{a±}^α(d) with prefactor 2^{-2dα}; at a = 0, d = 0 this is 𝒩_{0±}^α.
pub fn constant_nd(setup: &HardySetup, d: u32) -> Result<HardyReport> {
    Ok(constant_nd_profile(setup, d)?.0)
}

/// 𝒩_{a±}^α(d) together with its per-τ profile (τ in the original orientation).
pub fn constant_nd_profile(setup: &HardySetup, d: u32) -> Result<(HardyReport, Vec<ProfileRow>)> {
    if !(setup.alpha > 0.0) {
        return Err(Error::OrderOutOfRange(format!("alpha must be positive, got {}", setup.alpha)));
    }
    let s = setup.as_plus();
    let (e1, e2) = s.exponents();
    let cells = CellScheme::Anchored { anchor: s.a.floor() as i64, d };
    let pre = 2f64.powf(-2.0 * d as f64 * s.alpha);
    let (mut r, mut prof) = evaluate(s.p, s.ut(), &s.w, cells, e1, e2, pre, s.r_trunc)?;
    r.d = Some(d);
    if setup.sign == IntSign::Minus {
        // report τ in the original orientation
        r.argmax_first = -r.argmax_first - 1;
        r.argmax_second = -r.argmax_second - 1;
        for row in prof.iter_mut() {
            row.tau = -row.tau - 1;
        }
    }
    Ok((r, prof))
}

pub fn constant_n0(alpha: f64, p: f64, u: &WeightSpec, w: &WeightSpec, sign: IntSign, r_trunc: usize) -> Result<HardyReport> {
    let mut s = HardySetup::new(alpha, p, u.clone(), w.clone(), sign);
    s.r_trunc = r_trunc;
    constant_nd(&s, 0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupReport {
    pub constant: f64,
    pub argmax_d: u32,
    pub per_d: Vec<HardyReport>,
}

/// C_{a±}^α = sup_{0 ≤ d ≤ d_max} 𝒩_{a±}^α(d).
pub fn constant_c(setup: &HardySetup, d_max: u32) -> Result<SupReport> {
    let per_d: Vec<HardyReport> = (0..=d_max).map(|d| constant_nd(setup, d)).collect::<Result<_>>()?;
    let mut best = 0;
    for (i, r) in per_d.iter().enumerate() {
        if r.constant > per_d[best].constant {
            best = i;
        }
    }
    Ok(SupReport { constant: per_d[best].constant, argmax_d: best as u32, per_d })
}

/// ℳ_{0+}^{1/3}: centred unit cells, kernel exponents -2p/3 and -2p'/3, ū defaulting to u.
pub fn constant_m(p: f64, u_bar: &WeightSpec, w: &WeightSpec, r_trunc: usize) -> Result<HardyReport> {
    constant_m_profile(p, u_bar, w, r_trunc).map(|r| r.0)
}

pub fn constant_m_profile(p: f64, u_bar: &WeightSpec, w: &WeightSpec, r_trunc: usize) -> Result<(HardyReport, Vec<ProfileRow>)> {
    let pp = check_p(p)?;
    evaluate(p, u_bar, w, CellScheme::Centered, -2.0 * p / 3.0, -2.0 * pp / 3.0, 1.0, r_trunc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    pub value: f64,
    pub family: String,
    pub trials: usize,
}

/// (Σ_τ w_τ (Σ_{A≤r≤τ} (τ-r+1)^κ g_r)^p)^{1/p} / (Σ_r u_r g_r^p)^{1/p} for g on [A, A+len).
fn hardy_ratio(g: &[f64], wm: &[f64], um: &[f64], kappa: f64, p: f64) -> f64 {
    let mut den = Neumaier::default();
    for (gr, ur) in g.iter().zip(um) {
        den.add(ur * gr.abs().powf(p));
    }
    let mut num = Neumaier::default();
    for (t, wt) in wm.iter().enumerate() {
        let top = t.min(g.len() - 1);
        let mut inner = 0.0;
        for (r, gr) in g.iter().enumerate().take(top + 1) {
            inner += ((t - r + 1) as f64).powf(kappa) * gr.abs();
        }
        num.add(wt * inner.powf(p));
    }
    let d = den.value();
    if d > 0.0 {
        (num.value() / d).powf(1.0 / p)
    } else {
        0.0
    }
}

/// Max of the Hardy ratio over structured and seeded random nonnegative sequences.
pub fn discrete_hardy_best_constant_lb(setup: &HardySetup, trials: usize, seed: u64) -> Result<LowerBound> {
    if trials < 100 {
        return Err(Error::Config(format!("need at least 100 trials, got {trials}")));
    }
    let s = setup.as_plus();
    let pp = check_p(s.p)?;
    let kappa = 2.0 * s.alpha - 1.0;
    let cells = CellScheme::Anchored { anchor: s.a.floor() as i64, d: 0 };
    let len = s.r_trunc + 1;
    let wm = extended_masses(&s.w, cells, len, s.p * kappa)?;
    let um: Vec<f64> = (0..len)
        .map(|i| {
            let (l, r) = cells.cell(i);
            s.u.mass(l, r)
        })
        .collect();
    let mut cands: Vec<(String, Vec<f64>)> = Vec::new();
    for k in 0..len.min(32) {
        let mut g = vec![0.0; k + 1];
        g[k] = 1.0;
        cands.push((format!("coordinate[{k}]"), g));
    }
    for rho in [0.25, 0.5, 0.7, 0.8, 0.9, 0.95, 1.0, 1.05, 1.1] {
        cands.push((format!("geometric[{rho}]"), (0..len).map(|i| f64::powi(rho, i as i32)).collect()));
    }
    for m in [1usize, 2, 4, 8, 16, 32, 64] {
        if m <= len {
            cands.push((format!("plateau[{m}]"), vec![1.0; m]));
            // g = u^{1-p'} saturates Hölder in the denominator
            cands.push((format!("dual[{m}]"), um[..m].iter().map(|u| u.powf(1.0 - pp)).collect()));
        }
    }
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let m = rng.gen_range(1..=len);
        let shape: f64 = rng.gen_range(0.5..3.0);
        let g: Vec<f64> = (0..m).map(|_| rng.gen::<f64>().powf(shape)).collect();
        cands.push((format!("random[{t}]"), g));
    }
    let ratios: Vec<f64> = cands.par_iter().map(|(_, g)| hardy_ratio(g, &wm, &um, kappa, s.p)).collect();
    let mut best = 0;
    for (i, r) in ratios.iter().enumerate() {
        if *r > ratios[best] {
            best = i;
        }
    }
    Ok(LowerBound { value: ratios[best], family: cands[best].0.clone(), trials })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_eq_at_two() {
        assert!((c_eq(2.0) - 2.0).abs() < 1e-15);
    }
}
