//! Hankel transforms of compactly supported test functions against Bessel
//! kernels, plus decay scans across the small-argument, stationary-window,
//! and far-tail regimes.

use num_complex::Complex64;
use serde::Serialize;

use crate::bessel::{ComplexBesselKernel, RealBesselKernel};
use crate::quad;
use crate::special::{bessel_jn, e_of};
use crate::{Error, Result};

const GL_ORDER: usize = 16;
const PANEL_CAP: usize = 400_000;

fn mollifier_step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let f = |v: f64| (-1.0 / v).exp();
        let fu = f(u);
        fu / (fu + f(1.0 - u))
    }
}

/// Smooth bump supported on [T, ΔT], identically 1 on an inner plateau.
/// The ramps use the standard exp(-1/u) mollifier, so all derivatives
/// vanish at the support endpoints and scale like T^{-j}.
#[derive(Debug, Clone, Serialize)]
pub struct WeightSpec {
    pub t: f64,
    pub delta: f64,
    /// Fraction of the support occupied by the flat plateau (default 1/3).
    pub plateau: f64,
}

impl WeightSpec {
    pub fn new(t: f64, delta: f64) -> Result<Self> {
        if !(t > 0.0) || !(delta > 1.0) {
            return Err(Error::InvalidParams(format!(
                "weight needs t > 0 and delta > 1, got t={t}, delta={delta}"
            )));
        }
        Ok(WeightSpec { t, delta, plateau: 1.0 / 3.0 })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.t, self.t * self.delta)
    }

    fn ramp(&self) -> f64 {
        let (a, b) = self.support();
        (b - a) * (1.0 - self.plateau) / 2.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (a, b) = self.support();
        if x <= a || x >= b {
            return 0.0;
        }
        let r = self.ramp();
        mollifier_step((x - a) / r) * mollifier_step((b - x) / r)
    }

    /// Central finite-difference estimate of sup |w^(j)| over the support.
    /// Used to confirm the derivative bounds sup |w^(j)| = O(T^{-j}).
    pub fn fd_derivative_sup(&self, j: usize) -> f64 {
        let (a, b) = self.support();
        let h = self.ramp() / 40.0;
        let mut sup: f64 = 0.0;
        let n = 800;
        for i in 0..=n {
            let x = a + (b - a) * i as f64 / n as f64;
            // j-th central difference: sum_k (-1)^k C(j,k) w(x + (j/2 - k) h)
            let mut acc = 0.0;
            let mut binom = 1.0;
            for k in 0..=j {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * binom * self.eval(x + (j as f64 / 2.0 - k as f64) * h);
                binom *= (j - k) as f64 / (k + 1) as f64;
            }
            sup = sup.max((acc / h.powi(j as i32)).abs());
        }
        sup
    }
}

/// f(x) = c · w(x) e(-ρx) at a real place, f(z) = c · w(|z|) e(-ρz - ρ̄z̄)
/// at a complex place.
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub weight: WeightSpec,
    pub rho: Complex64,
    pub scale: Complex64,
}

impl TestFunction {
    pub fn new(weight: WeightSpec, rho: f64) -> Self {
        TestFunction { weight, rho: Complex64::new(rho, 0.0), scale: Complex64::new(1.0, 0.0) }
    }

    pub fn new_complex(weight: WeightSpec, rho: Complex64) -> Self {
        TestFunction { weight, rho, scale: Complex64::new(1.0, 0.0) }
    }

    pub fn eval_real(&self, x: f64) -> Complex64 {
        self.scale * self.weight.eval(x) * e_of(-self.rho.re * x)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        // e(-ρz - ρ̄z̄) = e(-2 Re(ρz))
        self.scale * self.weight.eval(z.norm()) * e_of(-2.0 * (self.rho * z).re)
    }
}

/// Natural cubic spline on a uniform grid, complex-valued.
struct CubicTable {
    x0: f64,
    h: f64,
    re: Vec<f64>,
    im: Vec<f64>,
    re2: Vec<f64>,
    im2: Vec<f64>,
}

impl CubicTable {
    fn new(x0: f64, h: f64, re: Vec<f64>, im: Vec<f64>) -> Self {
        let re2 = natural_spline_second(&re[..], h);
        let im2 = natural_spline_second(&im[..], h);
        CubicTable { x0, h, re, im, re2, im2 }
    }

    fn eval(&self, x: f64) -> Complex64 {
        let n = self.re.len();
        let t = ((x - self.x0) / self.h).clamp(0.0, (n - 1) as f64 - 1e-12);
        let i = (t as usize).min(n - 2);
        let b = t - i as f64;
        let a = 1.0 - b;
        let c = (a * a * a - a) * self.h * self.h / 6.0;
        let d = (b * b * b - b) * self.h * self.h / 6.0;
        Complex64::new(
            a * self.re[i] + b * self.re[i + 1] + c * self.re2[i] + d * self.re2[i + 1],
            a * self.im[i] + b * self.im[i + 1] + c * self.im2[i] + d * self.im2[i + 1],
        )
    }
}

fn natural_spline_second(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let mut y2 = vec![0.0; n];
    if n < 3 {
        return y2;
    }
    let mut u = vec![0.0; n];
    for i in 1..n - 1 {
        let p = 0.5 * y2[i - 1] + 2.0;
        y2[i] = -0.5 / p;
        let rhs = (y[i + 1] - 2.0 * y[i] + y[i - 1]) * 3.0 / (h * h);
        u[i] = (rhs - 0.5 * u[i - 1]) / p;
    }
    for i in (1..n - 1).rev() {
        y2[i] = y2[i] * y2[i + 1] + u[i];
    }
    y2
}

/// Real-place Hankel transform f̃(y) = ∫ J(xy) f(x) dx.
///
/// The kernel is supplied as a closure so that cheap closed forms (e.g. the
/// classical J-Bessel expression for the weight-11 discrete series) can stand
/// in for the contour evaluator on long scans.
pub struct HankelReal {
    kernel: Box<dyn Fn(f64) -> Complex64 + Sync>,
    rank: usize,
}

impl HankelReal {
    pub fn from_kernel(kernel: RealBesselKernel) -> Self {
        let rank = kernel.mu.len();
        HankelReal { kernel: Box::new(move |x| kernel.eval(x)), rank }
    }

    /// Tabulate the kernel once on a grid uniform in v = |x|^{1/r} (where
    /// the oscillation frequency is constant) and interpolate with a cubic
    /// spline. Arguments below the table floor fall back to the contour
    /// evaluator. Interpolation error is ~1e-6 absolute; intended for long
    /// dual-sum scans where millisecond contour evaluations dominate.
    pub fn from_kernel_tabulated(kernel: RealBesselKernel, x_max: f64) -> Result<Self> {
        let rank = kernel.mu.len();
        let rf = rank as f64;
        let v_min = 0.3f64.powf(1.0 / rf);
        let v_max = x_max.powf(1.0 / rf) * 1.001;
        // oscillation period in v is 1/r; 30 points per period
        let h = 1.0 / (30.0 * rf);
        let n = ((v_max - v_min) / h).ceil() as usize + 2;
        let mut tabs = Vec::new();
        for sign in [1.0, -1.0] {
            let re: Vec<f64> = (0..n)
                .map(|i| kernel.eval(sign * (v_min + i as f64 * h).powf(rf)).re)
                .collect();
            let im: Vec<f64> = (0..n)
                .map(|i| kernel.eval(sign * (v_min + i as f64 * h).powf(rf)).im)
                .collect();
            tabs.push(CubicTable::new(v_min, h, re, im));
        }
        let neg = tabs.pop().unwrap();
        let pos = tabs.pop().unwrap();
        let floor = v_min.powf(rf);
        let k = move |x: f64| -> Complex64 {
            let a = x.abs();
            if a < floor {
                kernel.eval(x)
            } else if x > 0.0 {
                pos.eval(a.powf(1.0 / rf))
            } else {
                neg.eval(a.powf(1.0 / rf))
            }
        };
        Ok(HankelReal { kernel: Box::new(k), rank })
    }

    /// Weight-11 discrete series fast path: J(x) = 2π J_11(4π√x) for x > 0
    /// and 0 for x < 0.
    pub fn delta_fast() -> Self {
        let k = move |x: f64| {
            if x <= 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                let v = 4.0 * std::f64::consts::PI * x.sqrt();
                Complex64::new(2.0 * std::f64::consts::PI * bessel_jn(11, v), 0.0)
            }
        };
        HankelReal { kernel: Box::new(k), rank: 2 }
    }

    fn panels_for(&self, f: &TestFunction, y: f64) -> usize {
        let (a, b) = f.weight.support();
        let ay = (a * y.abs()).max(0.0);
        let by = b * y.abs();
        let r = self.rank as f64;
        let kernel_turns = r * (by.powf(1.0 / r) - ay.powf(1.0 / r)).abs();
        let turns = kernel_turns + f.rho.norm() * (b - a);
        (turns.ceil() as usize).saturating_add(8)
    }

    fn quadrature(&self, f: &TestFunction, y: f64, panels: usize) -> Result<Complex64> {
        if panels > PANEL_CAP {
            return Err(Error::Quadrature(format!(
                "panel budget exhausted: {panels} > {PANEL_CAP}"
            )));
        }
        let (a, b) = f.weight.support();
        let rule = quad::rule(GL_ORDER);
        Ok(rule.integrate_complex(a, b, panels, |x| (self.kernel)(x * y) * f.eval_real(x)))
    }

    /// Evaluate f̃(y) with an a-posteriori refinement check: the panel count
    /// is grown until two successive refinements agree within tol.
    pub fn eval(&self, f: &TestFunction, y: f64, tol: f64) -> Result<Complex64> {
        Ok(self.eval_with_err(f, y, tol)?.0)
    }

    pub fn eval_with_err(&self, f: &TestFunction, y: f64, tol: f64) -> Result<(Complex64, f64)> {
        if y == 0.0 {
            return Err(Error::InvalidParams("hankel argument y must be nonzero".into()));
        }
        let mut panels = self.panels_for(f, y);
        let mut coarse = self.quadrature(f, y, panels)?;
        loop {
            panels = panels * 3 / 2 + 1;
            let fine = self.quadrature(f, y, panels)?;
            let err = (fine - coarse).norm();
            if err < tol {
                return Ok((fine, err));
            }
            coarse = fine;
        }
    }
}

/// Complex-place Hankel transform
/// f̃(u) = ∬ J(zu) f(z) i dz∧dz̄ over ℂ, where i dz∧dz̄ is twice the
/// ordinary Lebesgue measure. In polar coordinates z = x e^{iφ} this is
/// 2 ∫∫ J(x e^{iφ} u) f(x e^{iφ}) x dφ dx.
pub struct HankelComplex {
    kernel: ComplexBesselKernel,
    rank: usize,
}

impl HankelComplex {
    pub fn new(kernel: ComplexBesselKernel) -> Self {
        let rank = kernel.mu.len();
        HankelComplex { kernel, rank }
    }

    fn quadrature(
        &self,
        f: &TestFunction,
        u: Complex64,
        radial: usize,
        angular: usize,
    ) -> Result<Complex64> {
        if radial.saturating_mul(angular) > PANEL_CAP {
            return Err(Error::Quadrature(format!(
                "panel budget exhausted: {radial}x{angular} panels"
            )));
        }
        let (a, b) = f.weight.support();
        let rule = quad::rule(GL_ORDER);
        let uabs = u.norm();
        let uarg = u.arg();
        let two_pi = 2.0 * std::f64::consts::PI;
        let rw = (b - a) / radial as f64;
        let aw = two_pi / angular as f64;
        let m_cut = self.kernel.m_cut;
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..radial {
            let rlo = a + p as f64 * rw;
            for (xi, wx) in rule.nodes.iter().zip(&rule.weights) {
                let x = rlo + rw * 0.5 * (xi + 1.0);
                // the Fourier modes of the kernel depend on phi only through
                // e^{i m phi}; compute them once per radius
                let modes: Vec<Complex64> =
                    (-m_cut..=m_cut).map(|m| self.kernel.j_mode(m, x * uabs)).collect();
                let wx_total = wx * (rw * 0.5) * x * f.weight.eval(x);
                let mut ang = Complex64::new(0.0, 0.0);
                for q in 0..angular {
                    let plo = q as f64 * aw;
                    for (pj, wp) in rule.nodes.iter().zip(&rule.weights) {
                        let phi = plo + aw * 0.5 * (pj + 1.0);
                        let theta = phi + uarg;
                        let step = Complex64::from_polar(1.0, theta);
                        let mut phase = Complex64::from_polar(1.0, -(m_cut as f64) * theta);
                        let mut j = Complex64::new(0.0, 0.0);
                        for mv in &modes {
                            j += mv * phase;
                            phase *= step;
                        }
                        j /= two_pi;
                        let z = Complex64::from_polar(x, phi);
                        let osc = f.scale * e_of(-2.0 * (f.rho * z).re);
                        ang += wp * (aw * 0.5) * j * osc;
                    }
                }
                acc += wx_total * ang;
            }
        }
        Ok(2.0 * acc)
    }

    pub fn eval(&self, f: &TestFunction, u: Complex64, tol: f64) -> Result<Complex64> {
        if u.norm() == 0.0 {
            return Err(Error::InvalidParams("hankel argument u must be nonzero".into()));
        }
        let (a, b) = f.weight.support();
        let r = self.rank as f64;
        let osc = 2.0 * r * (b * u.norm()).powf(1.0 / r) + 2.0 * f.rho.norm() * b;
        let mut radial = ((osc + f.rho.norm() * (b - a)).ceil() as usize / 2).max(4);
        let mut angular = ((osc / 4.0).ceil() as usize).max(8);
        let mut coarse = self.quadrature(f, u, radial, angular)?;
        loop {
            radial = radial * 3 / 2 + 1;
            angular = angular * 3 / 2 + 1;
            let fine = self.quadrature(f, u, radial, angular)?;
            let err = (fine - coarse).norm();
            if err < tol {
                return Ok(fine);
            }
            coarse = fine;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Small,
    Window,
    Tail,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub y: f64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub regime: Regime,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub rows: Vec<ScanRow>,
    /// sup of |f̃(y)| (|y|/T)^{1/2} in the stationary window (NaN if empty).
    pub window_sup: f64,
    /// sup of |f̃(y)| (|y|/T)^{1/2} at small T|y| (NaN if empty).
    pub small_sup: f64,
    /// Log-log fitted decay exponent -d log|f̃| / d log y over the tail rows
    /// (NaN if fewer than 3 tail rows).
    pub tail_exponent: f64,
}

fn classify(t: f64, t_rho: f64, delta: f64, rank: usize, y: f64) -> Regime {
    let ty = t * y.abs();
    if ty <= 1.0 {
        return Regime::Small;
    }
    let spread = delta.powi((rank * (rank - 1)) as i32);
    let center = t_rho.powi(rank as i32);
    if t_rho > 1.0 && ty >= center / spread && ty <= center * spread {
        Regime::Window
    } else {
        Regime::Tail
    }
}

/// Scan |f̃| over a y-grid and fit per-regime behavior.
pub fn decay_scan(h: &HankelReal, f: &TestFunction, ys: &[f64], tol: f64) -> Result<DecayReport> {
    let t = f.weight.t;
    let t_rho = t * f.rho.norm();
    let mut rows = Vec::with_capacity(ys.len());
    for &y in ys {
        let v = h.eval(f, y, tol)?;
        rows.push(ScanRow {
            y,
            re: v.re,
            im: v.im,
            abs: v.norm(),
            regime: classify(t, t_rho, f.weight.delta, h.rank, y),
        });
    }
    let sup_over = |reg: Regime| {
        rows.iter()
            .filter(|r| r.regime == reg)
            .map(|r| r.abs * (r.y.abs() / t).sqrt())
            .fold(f64::NAN, f64::max)
    };
    let tail: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.regime == Regime::Tail && r.abs > 0.0)
        .map(|r| (r.y.abs().ln(), r.abs.ln()))
        .collect();
    let tail_exponent = if tail.len() >= 3 { -lsq_slope(&tail) } else { f64::NAN };
    let window_sup = sup_over(Regime::Window);
    let small_sup = sup_over(Regime::Small);
    Ok(DecayReport { rows, window_sup, small_sup, tail_exponent })
}

fn lsq_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let var: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    cov / var
}
