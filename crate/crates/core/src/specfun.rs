//! Gamma, beta, generalized binomials and a few identities built on them.

use crate::error::{Error, Result};
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpos_int(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (z - 1)
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

pub fn gamma(x: f64) -> Result<f64> {
    if is_nonpos_int(x) {
        return Err(Error::Pole(x));
    }
    if x < 0.5 {
        return Ok(PI / ((PI * x).sin() * gamma(1.0 - x)?));
    }
    if x == x.floor() && x <= 171.0 {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return Ok(f);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let half = t.powf(0.5 * (z + 0.5));
    Ok((2.0 * PI).sqrt() * half * half * (-t).exp() * lanczos_sum(z))
}

/// Reciprocal gamma; zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpos_int(x) {
        0.0
    } else {
        let (l, s) = lgamma(x);
        s * (-l).exp()
    }
}

/// ln|Γ(x)| and the sign of Γ(x). Poles return (inf, 1).
pub fn lgamma(x: f64) -> (f64, f64) {
    if is_nonpos_int(x) {
        return (f64::INFINITY, 1.0);
    }
    if x < 0.5 {
        let s = (PI * x).sin();
        let (l, sg) = lgamma(1.0 - x);
        return ((PI / s.abs()).ln() - l, sg * s.signum());
    }
    if x == x.floor() && x <= 30.0 {
        return (gamma(x).unwrap().ln(), 1.0);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let l = 0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln();
    (l, 1.0)
}

pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    if a <= 0.0 || b <= 0.0 {
        return Err(Error::Domain(format!("beta({a}, {b}) needs positive arguments")));
    }
    // written symmetrically so beta(a,b) == beta(b,a) bit for bit
    if a + b < 20.0 {
        return Ok((gamma(a)? * gamma(b)?) / gamma(a + b)?);
    }
    Ok(((lgamma(a).0 + lgamma(b).0) - lgamma(a + b).0).exp())
}

/// binom(u, k) for real u and integer k.
pub fn gbinom(u: f64, k: i64) -> f64 {
    if k < 0 {
        return 0.0;
    }
    if u >= 0.0 && u == u.floor() && (k as f64) > u {
        return 0.0;
    }
    if k <= 64 {
        let mut v = 1.0;
        for j in 0..k {
            v *= (u - j as f64) / (j + 1) as f64;
        }
        return v;
    }
    if u < 0.0 {
        // binom(u, k) = (-1)^k binom(k - u - 1, k)
        let l = lgamma(k as f64 - u).0 - lgamma(k as f64 + 1.0).0 - lgamma(-u).0;
        let s = if k % 2 == 0 { 1.0 } else { -1.0 };
        return s * l.exp();
    }
    let (l1, s1) = lgamma(u + 1.0);
    let (l3, s3) = lgamma(u - k as f64 + 1.0);
    let l = l1 - lgamma(k as f64 + 1.0).0 - l3;
    s1 * s3 * l.exp()
}

/// binom(u, v) = Γ(u+1)/(Γ(v+1)Γ(u-v+1)) for real u, v, with 1/Γ at poles equal to zero.
pub fn gbinom_real(u: f64, v: f64) -> f64 {
    if v == v.floor() {
        return gbinom(u, v as i64);
    }
    let (l1, s1) = lgamma(u + 1.0);
    let (l2, s2) = lgamma(v + 1.0);
    let (l3, s3) = lgamma(u - v + 1.0);
    if l2.is_infinite() || l3.is_infinite() {
        return 0.0;
    }
    s1 * s2 * s3 * (l1 - l2 - l3).exp()
}

pub fn chu_vandermonde_residual(r: f64, s: f64, k: u32) -> f64 {
    let k = k as i64;
    let lhs = gbinom(r + s, k);
    let mut acc = crate::quad::Neumaier::default();
    for n in 0..=k {
        acc.add(gbinom(r, n) * gbinom(s, k - n));
    }
    lhs - acc.value()
}

/// Forward difference Δ_h^n f(x) = Σ_j (-1)^j binom(n,j) f(x + (n-j)h).
pub fn finite_difference<F: Fn(f64) -> f64>(f: F, h: f64, n: u32, x: f64) -> f64 {
    let mut s = 0.0;
    for j in 0..=n {
        let c = gbinom(n as f64, j as i64);
        let sg = if j % 2 == 0 { 1.0 } else { -1.0 };
        s += sg * c * f(x + (n - j) as f64 * h);
    }
    s
}

const BERNOULLI_2K: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Hurwitz zeta ζ(s, q) for s > 1, q > 0 by Euler-Maclaurin.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    assert!(s > 1.0 && q > 0.0);
    let n = 12usize;
    let mut sum = 0.0;
    for k in 0..n {
        sum += (q + k as f64).powf(-s);
    }
    let a = q + n as f64;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // Σ B_{2j}/(2j)! s(s+1)...(s+2j-2) a^{-s-2j+1}
    let mut poch = s; // s(s+1)...(s+2j-2)
    let mut fact = 2.0; // (2j)!
    let mut apow = a.powf(-s - 1.0);
    for (j, b) in BERNOULLI_2K.iter().enumerate() {
        let term = b / fact * poch * apow;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        let jj = (j + 1) as f64;
        poch *= (s + 2.0 * jj - 1.0) * (s + 2.0 * jj);
        fact *= (2.0 * jj + 1.0) * (2.0 * jj + 2.0);
        apow /= a * a;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert_eq!(gamma(4.0).unwrap(), 6.0);
        let g = gamma(0.5).unwrap();
        assert!((g * g - PI).abs() < 1e-12);
        assert!(gamma(0.0).is_err());
        assert!(gamma(-3.0).is_err());
    }

    #[test]
    fn hurwitz_matches_riemann() {
        assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta(4.0, 1.0) - PI.powi(4) / 90.0).abs() < 1e-14);
        // ζ(2, 1/2) = 3ζ(2)
        assert!((hurwitz_zeta(2.0, 0.5) - PI * PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn binomial_large_k_log_path() {
        let a = gbinom(-1.0 / 3.0, 64);
        let b = gbinom(-1.0 / 3.0, 65);
        let ratio = b / a;
        assert!((ratio - (-1.0 / 3.0 - 64.0) / 65.0).abs() < 1e-12);
        assert_eq!(gbinom(3.0, 70), 0.0);
        assert!((gbinom(-1.0, 101) + 1.0).abs() < 1e-10);
    }

    #[test]
    fn real_lower_argument() {
        // binom(2, 1/2) = Γ(3)/(Γ(3/2)Γ(5/2)) = 16/(3π)
        assert!((gbinom_real(2.0, 0.5) - 16.0 / (3.0 * PI)).abs() < 1e-13);
        assert_eq!(gbinom_real(2.0, 3.0), 0.0);
    }
}
