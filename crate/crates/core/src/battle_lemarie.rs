//! Battle-Lemarié data for natural orders and the localized pair Φ_{n,k}, Ψ_{n,k,s}.

use crate::error::{Error, Result};
use crate::specfun::gbinom;
use crate::splines::bspline_natural;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Sign between the two shifted terms of the localized wavelet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PsiSign {
    #[default]
    Plus,
    Minus,
}

impl PsiSign {
    pub fn factor(self) -> f64 {
        match self {
            PsiSign::Plus => 1.0,
            PsiSign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BLSystem {
    pub n: usize,
    pub roots: Vec<f64>,
    pub beta_n: f64,
    pub lambda: Vec<f64>,
    pub shift_k: i64,
    pub shift_s: i64,
    pub lambda_prime: f64,
    pub lambda_dprime: f64,
    pub psi_sign: PsiSign,
    /// use B_n(x + 1/2) in place of B_n
    pub half_shift: bool,
}

/// Integer samples B_{2n+1}(n+1+j), j = -n..=n.
pub fn euler_frobenius_coeffs(n: usize) -> Vec<f64> {
    let m = 2 * n + 1;
    (0..=2 * n).map(|i| bspline_natural(m, (i + 1) as f64)).collect()
}

fn poly_eval(c: &[f64], z: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// The roots r_j(n) in (0,1), ascending.
pub fn euler_frobenius_roots(n: usize) -> Result<Vec<f64>> {
    if n == 0 || n > 8 {
        return Err(Error::OrderOutOfRange(format!("Euler-Frobenius roots need 1 <= n <= 8, got {n}")));
    }
    let c = euler_frobenius_coeffs(n);
    let deg = 2 * n;
    let lead = c[deg];
    let mut comp = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -c[i] / lead;
    }
    let eig = comp.complex_eigenvalues();
    let mut roots: Vec<f64> = eig
        .iter()
        .filter(|z| z.re < 0.0 && z.re > -1.0 && z.im.abs() < 1e-6)
        .map(|z| {
            let mut x = z.re;
            for _ in 0..3 {
                let (p, dp) = poly_eval(&c, x);
                if dp != 0.0 {
                    x -= p / dp;
                }
            }
            -x
        })
        .collect();
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let residual = roots
        .iter()
        .map(|&r| poly_eval(&c, -r).0.abs())
        .fold(0.0, f64::max);
    if roots.len() != n || residual > 1e-10 || roots.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::RootFinding { n, residual });
    }
    Ok(roots)
}

/// λ_j from ∏_j (ρ_j - 2cos θ) = Σ_j (-1)^j λ_j cos(jθ).
pub fn lambda_coeffs(roots: &[f64]) -> Vec<f64> {
    let mut a = vec![1.0];
    for &r in roots {
        let rho = r + 1.0 / r;
        let mut out = vec![0.0; a.len() + 1];
        for (k, &ak) in a.iter().enumerate() {
            out[k] += rho * ak;
            if k == 0 {
                out[1] -= 2.0 * ak;
            } else {
                out[k + 1] -= ak;
                out[k - 1] -= ak;
            }
        }
        a = out;
    }
    a.iter()
        .enumerate()
        .map(|(j, v)| if j % 2 == 0 { *v } else { -*v })
        .collect()
}

/// ℙ_n(ω) = Σ_j B_{2n+1}(n+1+j) e^{ijω} (real by symmetry).
pub fn euler_frobenius_trig(n: usize, omega: f64) -> f64 {
    let c = euler_frobenius_coeffs(n);
    c.iter()
        .enumerate()
        .map(|(i, v)| v * ((i as f64 - n as f64) * omega).cos())
        .sum()
}

/// |𝐀_n(ω)|² = ∏ (1 + r² + 2r cos ω).
pub fn a_abs2(roots: &[f64], omega: f64) -> f64 {
    roots.iter().map(|&r| 1.0 + r * r + 2.0 * r * omega.cos()).product()
}

impl BLSystem {
    pub fn new(n: usize, shift_k: i64, shift_s: i64) -> Result<Self> {
        let roots = euler_frobenius_roots(n)?;
        let prod: f64 = roots.iter().map(|&r| ((r + 1.0).powi(2) / (4.0 * r)) * r).product();
        let beta_n = 2f64.powi(n as i32) * prod.sqrt();
        let lambda = lambda_coeffs(&roots);
        let lambda_prime = roots.iter().map(|&r| 1.0 + r).product();
        let lambda_dprime = roots.iter().map(|&r| (1.0 + r) * (1.0 - r * r)).product();
        Ok(BLSystem {
            n,
            roots,
            beta_n,
            lambda,
            shift_k,
            shift_s,
            lambda_prime,
            lambda_dprime,
            psi_sign: PsiSign::Plus,
            half_shift: false,
        })
    }

    pub fn with_sign(mut self, sign: PsiSign) -> Self {
        self.psi_sign = sign;
        self
    }

    pub fn with_half_shift(mut self, on: bool) -> Self {
        self.half_shift = on;
        self
    }

    fn arg(&self, x: f64) -> f64 {
        if self.half_shift {
            x + 0.5
        } else {
            x
        }
    }

    pub fn gamma_nk(&self) -> f64 {
        let n = self.n as i64;
        let pr: f64 = self.roots.iter().product();
        let sg = if (n + 1 + self.shift_k).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        pr * self.beta_n * 2f64.powi(-(self.n as i32)) * sg
    }

    /// Φ_{n,k}(x) = β_n B_n(x - k).
    pub fn scaling(&self, x: f64) -> f64 {
        self.beta_n * bspline_natural(self.n, self.arg(x) - self.shift_k as f64)
    }

    /// Ψ_{n,k,s} written as Σ_m h_m B_n(2x - m); returns (first m, h).
    pub fn wavelet_filter(&self) -> (i64, Vec<f64>) {
        let n = self.n as i64;
        let s = self.shift_s;
        let pre = self.gamma_nk() / 2f64.powi(self.n as i32);
        let lo = 2 * s - 2 * n;
        let hi = 2 * s + n + 1;
        let mut h = vec![0.0; (hi - lo + 1) as usize];
        for j in 0..=n {
            let cj = self.lambda[j as usize] / (2.0 * if j % 2 == 0 { 1.0 } else { -1.0 });
            for i in 0..=n + 1 {
                let d = if i % 2 == 0 { 1.0 } else { -1.0 } * gbinom((n + 1) as f64, i);
                let m1 = 2 * s - n - j + i;
                let m2 = 2 * s - n + j + i;
                h[(m1 - lo) as usize] += pre * cj * d;
                h[(m2 - lo) as usize] += pre * cj * d * self.psi_sign.factor();
            }
        }
        (lo, h)
    }

    /// Ψ_{n,k,s}(x) from the filter form.
    pub fn wavelet(&self, x: f64) -> f64 {
        let (lo, h) = self.wavelet_filter();
        let y = 2.0 * self.arg(x);
        h.iter()
            .enumerate()
            .map(|(i, c)| c * bspline_natural(self.n, y - (lo + i as i64) as f64))
            .sum()
    }

    /// Support of Ψ implied by the filter.
    pub fn wavelet_support(&self) -> (f64, f64) {
        let (lo, h) = self.wavelet_filter();
        let hi = lo + h.len() as i64 - 1;
        let shift = if self.half_shift { -0.5 } else { 0.0 };
        (lo as f64 / 2.0 + shift, (hi + self.n as i64 + 1) as f64 / 2.0 + shift)
    }

    /// |Σ_{|m|≤M} |φ̂(ω+2πm)|² - 1|.
    pub fn orthonormality_residual(&self, omega: f64, m: i64) -> f64 {
        let a2 = a_abs2(&self.roots, omega);
        let mut s = 0.0;
        for k in -m..=m {
            let xi = omega + 2.0 * PI * k as f64;
            let b = if xi == 0.0 { 1.0 } else { ((xi / 2.0).sin() / (xi / 2.0)).powi(2 * self.n as i32 + 2) };
            s += self.beta_n * self.beta_n * b / a2;
        }
        (s - 1.0).abs()
    }

    pub fn factorization_residual(&self, grid: usize) -> f64 {
        (0..grid)
            .map(|i| {
                let w = 2.0 * PI * i as f64 / grid as f64;
                (self.beta_n * self.beta_n * euler_frobenius_trig(self.n, w) - a_abs2(&self.roots, w)).abs()
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order_root() {
        let r = euler_frobenius_roots(1).unwrap();
        assert!((r[0] - (2.0 - 3f64.sqrt())).abs() < 1e-12);
        let l = lambda_coeffs(&r);
        assert!((l[0] - 4.0).abs() < 1e-12);
        assert!((l[1] - 2.0).abs() < 1e-14);
    }
}
