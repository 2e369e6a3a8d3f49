//! Quadrature: Gauss-Legendre panels and adaptive Gauss-Kronrod.

use crate::error::{Error, Result};

/// Gauss-Legendre rule on [0, 1].
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn gauss_legendre(n: usize) -> Rule {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = (n + 1) / 2;
        for i in 0..m {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let mut p1 = 1.0;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
                }
                dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = 0.5 * (1.0 - z);
            nodes[n - 1 - i] = 0.5 * (1.0 + z);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        Rule { nodes, weights }
    }

    /// Gauss-Legendre composed with t = I_u(4,4), which flattens both ends
    /// of the cell. Used where the integrand has power singularities at cell edges.
    pub fn smoothed(n: usize) -> Rule {
        let gl = Rule::gauss_legendre(n);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for (&u, &w) in gl.nodes.iter().zip(&gl.weights) {
            let v = 1.0 - u;
            let t = u.powi(4) * (35.0 - 84.0 * u + 70.0 * u * u - 20.0 * u * u * u);
            nodes.push(t);
            weights.push(w * 140.0 * (u * v).powi(3));
        }
        Rule { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let h = b - a;
        let mut s = 0.0;
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(a + h * t);
        }
        s * h
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        rk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            rg += WG[j / 2] * (f1 + f2);
        }
    }
    (rk * h, ((rk - rg) * h).abs())
}

/// Adaptive Gauss-Kronrod 7-15 with bisection. `tol` is an absolute tolerance.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut stack = vec![(a, b, 0usize)];
    let mut total = 0.0;
    let mut comp = 0.0;
    let mut worst = 0.0f64;
    let width = (b - a).abs();
    while let Some((l, r, depth)) = stack.pop() {
        let (v, e) = gk15(&mut f, l, r);
        let share = tol * ((r - l).abs() / width).max(1e-3);
        if e <= share || depth >= 48 || (r - l).abs() < 1e-14 * width {
            if e > share {
                worst = worst.max(e);
            }
            let y = v - comp;
            let t = total + y;
            comp = (t - total) - y;
            total = t;
        } else {
            let m = 0.5 * (l + r);
            stack.push((m, r, depth + 1));
            stack.push((l, m, depth + 1));
        }
    }
    if worst > 100.0 * tol.max(1e-300) && !worst.is_nan() {
        return Err(Error::Quadrature { a, b, err: worst });
    }
    if !total.is_finite() {
        return Err(Error::Quadrature { a, b, err: f64::INFINITY });
    }
    Ok(total)
}

/// Adaptive integration over [a, b] split at the given breakpoints.
pub fn adaptive_split<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<f64> {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let mut edges = vec![a];
    edges.extend(pts);
    edges.push(b);
    let n = (edges.len() - 1) as f64;
    let mut s = 0.0;
    for w in edges.windows(2) {
        s += adaptive(&mut f, w[0], w[1], tol / n)?;
    }
    Ok(s)
}

/// As `adaptive_split`, but each panel is mapped through t = I_u(4,4) so that
/// integrable power singularities at panel ends become smooth.
pub fn adaptive_split_smooth<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<f64> {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let mut edges = vec![a];
    edges.extend(pts);
    edges.push(b);
    let n = (edges.len() - 1) as f64;
    let mut s = 0.0;
    for w in edges.windows(2) {
        let (l, h) = (w[0], w[1] - w[0]);
        let g = |u: f64| {
            if u <= 0.0 || u >= 1.0 {
                return 0.0;
            }
            let v = 1.0 - u;
            let t = u.powi(4) * (35.0 - 84.0 * u + 70.0 * u * u - 20.0 * u * u * u);
            let dt = 140.0 * (u * v).powi(3);
            let val = f(l + h * t);
            if dt == 0.0 { 0.0 } else { val * dt * h }
        };
        s += adaptive(g, 0.0, 1.0, tol / n)?;
    }
    Ok(s)
}

/// Compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials() {
        let r = Rule::gauss_legendre(8);
        let v = r.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
    }

    #[test]
    fn smoothed_handles_endpoint_power() {
        let r = Rule::smoothed(24);
        let v = r.integrate(0.0, 1.0, |x| x.powf(-0.5) * (1.0 - x).powf(1.0 / 3.0));
        // B(1/2, 4/3)
        let exact = crate::specfun::beta_fn(0.5, 4.0 / 3.0).unwrap();
        assert!((v - exact).abs() < 1e-7, "{v} {exact}");
    }

    #[test]
    fn adaptive_sqrt() {
        let v = adaptive(|x: f64| x.sqrt(), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
    }
}
