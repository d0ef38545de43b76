//! Gauss-Legendre quadrature with panel subdivision.

use num_complex::Complex64;
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::Mutex;

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            // Chebyshev-based initial guess, refined by Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_pair(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_pair(n, x);
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrate f over [a, b] with a single panel.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(c + h * x);
        }
        acc * h
    }

    /// Integrate a complex-valued function over [a, b] split into `panels` equal panels.
    pub fn integrate_complex<F: FnMut(f64) -> Complex64>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: F,
    ) -> Complex64 {
        let panels = panels.max(1);
        let step = (b - a) / panels as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let lo = a + p as f64 * step;
            let c = lo + 0.5 * step;
            let h = 0.5 * step;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                acc += *w * f(c + h * x);
            }
        }
        acc * Complex64::new(0.5 * step, 0.0)
    }

    pub fn integrate_panels<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: F,
    ) -> f64 {
        let panels = panels.max(1);
        let step = (b - a) / panels as f64;
        let mut acc = 0.0;
        for p in 0..panels {
            let lo = a + p as f64 * step;
            let c = lo + 0.5 * step;
            let h = 0.5 * step;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                acc += w * f(c + h * x);
            }
        }
        acc * 0.5 * step
    }
}

fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

static RULE_CACHE: Lazy<Mutex<HashMap<usize, GaussLegendre>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Shared n-point rule; computed once per order.
pub fn rule(n: usize) -> GaussLegendre {
    let mut cache = RULE_CACHE.lock().unwrap();
    cache.entry(n).or_insert_with(|| GaussLegendre::new(n)).clone()
}

/// Adaptive 1D quadrature of |f| or f by interval bisection (global error control).
/// Used for slowly convergent integrals like the L1 norm of oscillatory transforms.
pub fn adaptive<F: Fn(f64) -> f64 + Copy>(a: f64, b: f64, tol: f64, f: F) -> f64 {
    let g = rule(16);
    fn recurse<F: Fn(f64) -> f64 + Copy>(
        g: &GaussLegendre,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: usize,
        f: F,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let left = g.integrate(a, m, f);
        let right = g.integrate(m, b, f);
        if depth == 0 || (left + right - whole).abs() <= tol {
            return left + right;
        }
        recurse(g, a, m, left, 0.5 * tol, depth - 1, f)
            + recurse(g, m, b, right, 0.5 * tol, depth - 1, f)
    }
    let whole = g.integrate(a, b, f);
    recurse(&g, a, b, whole, tol, 40, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exactness() {
        let g = GaussLegendre::new(8);
        // degree-15 polynomial integrated exactly
        let v = g.integrate(0.0, 1.0, |x| x.powi(15));
        assert!((v - 1.0 / 16.0).abs() < 1e-14);
        let v = g.integrate(-2.0, 3.0, |x| x * x);
        assert!((v - (27.0 + 8.0) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn panels_converge_on_oscillatory() {
        let g = rule(16);
        let v = g.integrate_panels(0.0, 10.0, 40, |x| (20.0 * x).sin());
        let exact = (1.0 - (200.0f64).cos()) / 20.0;
        assert!((v - exact).abs() < 1e-10);
    }

    #[test]
    fn adaptive_handles_peak() {
        let v = adaptive(0.0, 1.0, 1e-10, |x| 1.0 / ((x - 0.3).powi(2) + 1e-4).sqrt());
        // oracle: asinh antiderivative
        let f = |x: f64| ((x - 0.3) / 1e-2).asinh();
        assert!((v - (f(1.0) - f(0.0))).abs() < 1e-8);
    }
}
