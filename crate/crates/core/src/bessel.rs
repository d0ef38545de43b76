//! Bessel kernels attached to archimedean representation parameters,
//! evaluated by Mellin-Barnes contour integrals.
//!
//! The contour is a bent vertical line: a central segment at sigma0
//! (right of every pole of the gamma factor), horizontal shifts at
//! height +-H to sigma1 < 0, and truncated vertical tails. Gamma-factor
//! values at the quadrature nodes are precomputed once per parameter
//! set, so a kernel evaluation is a single weighted exponential sum.

use crate::quad::rule;
use crate::special::{ln_cos, ln_gamma, ln_sin};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);
const GL_ORDER: usize = 16;

/// log G_delta(s) in the gamma-quotient form
/// i^delta pi^{1/2 - s} Gamma((s + delta)/2) / Gamma((1 - s + delta)/2).
pub fn ln_g_delta(s: Complex64, delta: u8) -> Complex64 {
    let d = delta as f64;
    let mut v = (0.5 - s) * PI.ln() + ln_gamma((s + d) / 2.0) - ln_gamma((1.0 - s + d) / 2.0);
    if delta == 1 {
        v += I * (PI / 2.0);
    }
    v
}

/// G_delta(s) in the trigonometric form 2 (2pi)^{-s} Gamma(s) cos/sin(pi s/2);
/// equal to exp(ln_g_delta) away from poles and zeros.
pub fn g_delta_trig(s: Complex64, delta: u8) -> Complex64 {
    let base = (2.0f64).ln() - s * (2.0 * PI).ln() + ln_gamma(s);
    let v = match delta {
        0 => base + ln_cos(PI * s / 2.0),
        _ => base + ln_sin(PI * s / 2.0) + I * (PI / 2.0),
    };
    v.exp()
}

/// log G_m(s) = log of i^{|m|} (2pi)^{1-2s} Gamma(s + |m|/2) / Gamma(1 - s + |m|/2).
pub fn ln_g_m(s: Complex64, m: i64) -> Complex64 {
    let am = m.unsigned_abs() as f64;
    (1.0 - 2.0 * s) * (2.0 * PI).ln()
        + ln_gamma(s + am / 2.0)
        - ln_gamma(1.0 - s + am / 2.0)
        + I * (PI / 2.0) * (m.unsigned_abs() % 4) as f64
}

fn dist_to_pole_ladder(s: Complex64, top: Complex64) -> f64 {
    // poles at top, top - 2, top - 4, ...
    let d = (top - s) / 2.0;
    if d.re < -0.25 {
        return (s - top).norm();
    }
    let k = d.re.round().max(0.0);
    (s - (top - 2.0 * k)).norm().min((s - (top - 2.0 * (k + 1.0).max(0.0))).norm())
}

/// G_delta(s - mu) with a pole-proximity guard.
pub fn gamma_factor_real(s: Complex64, mu: Complex64, delta: u8) -> Result<Complex64> {
    let top = mu - delta as f64;
    let dist = dist_to_pole_ladder(s, top);
    if dist < 1e-8 {
        return Err(Error::PoleProximity { dist });
    }
    Ok(ln_g_delta(s - mu, delta).exp())
}

/// G_m(s - mu) with a pole-proximity guard; here the pole ladder steps by 1.
pub fn gamma_factor_complex(s: Complex64, mu: Complex64, m: i64) -> Result<Complex64> {
    let top = mu - m.unsigned_abs() as f64 / 2.0;
    let z = s - top;
    let k = z.re.round().min(0.0);
    let dist = (z - k).norm().min((z - (k - 1.0)).norm());
    if z.re < 0.5 && dist < 1e-8 {
        return Err(Error::PoleProximity { dist });
    }
    Ok(ln_g_m(s - mu, m).exp())
}

/// Options controlling the contour construction.
#[derive(Debug, Clone, Copy)]
pub struct KernelOpts {
    /// Real part of the shifted tails; must keep r (sigma1 - 1/2) < -1
    /// (real case) or r (2 sigma1 - 1) < -1 (complex case).
    pub sigma1: f64,
    /// Absolute tolerance of the contour truncation.
    pub tol: f64,
    /// Largest kernel argument magnitude the contour is sized for.
    pub x_max: f64,
    /// Node density multiplier.
    pub density: f64,
}

impl Default for KernelOpts {
    fn default() -> Self {
        KernelOpts {
            sigma1: -1.0,
            tol: 1e-9,
            x_max: 30.0,
            density: 1.0,
        }
    }
}

/// A fixed contour with precomputed weights w_k G(s_k) for one gamma factor.
#[derive(Debug, Clone)]
struct ContourSum {
    nodes: Vec<Complex64>,
    wg: Vec<Complex64>,
}

impl ContourSum {
    /// (1 / 2 pi i) sum w_k G(s_k) x^{-c s_k}; c = 1 (real) or 2 (complex).
    fn eval(&self, ln_x: f64, c: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, wg) in self.nodes.iter().zip(&self.wg) {
            acc += wg * (-s * (c * ln_x)).exp();
        }
        acc / (2.0 * PI * I)
    }
}

/// Straight-line quadrature nodes from a to b, panel count scaled to the
/// local oscillation rate.
fn segment_nodes(
    a: Complex64,
    b: Complex64,
    rate: f64,
    density: f64,
    out_s: &mut Vec<Complex64>,
    out_w: &mut Vec<Complex64>,
) {
    let len = (b - a).norm();
    let dir = (b - a) / len;
    let panels = ((len * rate / (2.0 * PI) / 3.0 * density).ceil() as usize).max(2);
    let gl = rule(GL_ORDER);
    for p in 0..panels {
        let t0 = len * p as f64 / panels as f64;
        let t1 = len * (p + 1) as f64 / panels as f64;
        let half = (t1 - t0) / 2.0;
        let mid = (t0 + t1) / 2.0;
        for (x, w) in gl.nodes.iter().zip(&gl.weights) {
            out_s.push(a + dir * (mid + half * x));
            out_w.push(dir * (w * half));
        }
    }
}

fn build_contour(
    ln_g: &dyn Fn(Complex64) -> Complex64,
    r: usize,
    sigma0: f64,
    sigma1: f64,
    h: f64,
    tol: f64,
    ln_x_max: f64,
    density: f64,
    mellin_scale: f64,
) -> Result<ContourSum> {
    // decay exponent of |G| along the shifted tails:
    // r (sigma1 - 1/2) at a real place, r (2 sigma1 - 1) at a complex place
    let p = r as f64 * mellin_scale * (sigma1 - 0.5);
    if p >= -1.0 {
        return Err(Error::InvalidParams(format!(
            "tails at sigma1 = {sigma1} do not converge (exponent {p})"
        )));
    }
    let g_mag = |t: f64| ln_g(Complex64::new(sigma1, t)).re.exp();
    let x_pow = (-sigma1 * mellin_scale * ln_x_max).exp().max(1.0);
    // the integrand has a stationary phase point near t* = 2 pi x^{1/r};
    // beyond ~2 t* it oscillates and the discarded tail is of the order
    // of the pointwise magnitude |G(sigma1 + iS)| x^{-sigma1}
    let t_star = 2.0 * PI * (ln_x_max / r as f64).exp();
    let mut s_cut = (4.0 * h).max(64.0).max(2.0 * t_star);
    loop {
        let err = g_mag(s_cut) * x_pow;
        if err < tol {
            break;
        }
        s_cut *= 1.5;
        if s_cut > 1e6 {
            return Err(Error::ToleranceUnreachable { tol, err });
        }
    }

    let c0 = Complex64::new(sigma0, 0.0);
    let c1 = Complex64::new(sigma1, 0.0);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let rate_at = |t: f64| r as f64 * ((2.0 + t) / (2.0 * PI)).ln().max(0.5) + mellin_scale * ln_x_max + 1.0;
    // central vertical segment at sigma0
    segment_nodes(c0 - I * h, c0 + I * h, rate_at(h), density, &mut nodes, &mut weights);
    // horizontal bends (oriented so the full path runs upward in t)
    segment_nodes(c1 - I * h, c0 - I * h, rate_at(h), density, &mut nodes, &mut weights);
    segment_nodes(c0 + I * h, c1 + I * h, rate_at(h), density, &mut nodes, &mut weights);
    // dyadic tail blocks at sigma1; where |G| x_pow has already dropped far
    // below the tolerance only the magnitude scale must be resolved, so the
    // node density is graded down with the remaining digit requirement
    let mut lo = h;
    while lo < s_cut {
        let hi = (2.0 * lo).min(s_cut);
        let mag = g_mag(lo) * x_pow;
        let grade = ((mag / tol).max(10.0).log10() / 14.0 + 0.3).clamp(1.0 / 3.0, 1.0);
        let d = density * grade;
        segment_nodes(c1 + I * lo, c1 + I * hi, rate_at(hi), d, &mut nodes, &mut weights);
        segment_nodes(c1 - I * hi, c1 - I * lo, rate_at(hi), d, &mut nodes, &mut weights);
        lo = hi;
    }
    let wg = nodes
        .iter()
        .zip(&weights)
        .map(|(s, w)| w * ln_g(*s).exp())
        .collect();
    Ok(ContourSum { nodes, wg })
}

/// Bessel kernel at a real place.
#[derive(Debug, Clone)]
pub struct RealBesselKernel {
    pub mu: Vec<Complex64>,
    pub delta: Vec<u8>,
    contour_delta: ContourSum,
    contour_delta_e: ContourSum,
}

impl RealBesselKernel {
    pub fn new(mu: &[Complex64], delta: &[u8], opts: KernelOpts) -> Result<Self> {
        if mu.len() != delta.len() || mu.is_empty() {
            return Err(Error::InvalidParams("parameter length mismatch".into()));
        }
        let r = mu.len();
        let h = 2.0 + mu.iter().map(|m| m.im.abs()).fold(0.0f64, f64::max);
        let sigma0 = 0.5;
        let ln_x_max = opts.x_max.ln().abs().max(1.0);
        let mu_o = mu.to_vec();
        let mk = |dv: Vec<u8>| -> Result<ContourSum> {
            let mu_c = mu_o.clone();
            let f = move |s: Complex64| -> Complex64 {
                mu_c.iter()
                    .zip(&dv)
                    .map(|(m, d)| ln_g_delta(s - m, *d))
                    .sum()
            };
            build_contour(&f, r, sigma0, opts.sigma1, h, opts.tol, ln_x_max, opts.density, 1.0)
        };
        let d0: Vec<u8> = delta.iter().map(|d| d % 2).collect();
        let d1: Vec<u8> = delta.iter().map(|d| (d + 1) % 2).collect();
        Ok(RealBesselKernel {
            mu: mu.to_vec(),
            delta: d0.clone(),
            contour_delta: mk(d0)?,
            contour_delta_e: mk(d1)?,
        })
    }

    /// j_{(mu, delta)}(x) for x > 0.
    pub fn j_plus(&self, x: f64) -> Complex64 {
        self.contour_delta.eval(x.ln(), 1.0)
    }

    /// j_{(mu, delta + e)}(x) for x > 0.
    pub fn j_minus(&self, x: f64) -> Complex64 {
        self.contour_delta_e.eval(x.ln(), 1.0)
    }

    /// J(x) for signed nonzero x: (j_delta(|x|) +- j_{delta+e}(|x|)) / 2.
    pub fn eval(&self, x: f64) -> Complex64 {
        let a = x.abs();
        let (jp, jm) = (self.j_plus(a), self.j_minus(a));
        if x > 0.0 {
            (jp + jm) / 2.0
        } else {
            (jp - jm) / 2.0
        }
    }

    pub fn node_count(&self) -> usize {
        self.contour_delta.nodes.len()
    }
}

/// Bessel kernel at a complex place, as a truncated Fourier series in the
/// argument of z.
#[derive(Debug, Clone)]
pub struct ComplexBesselKernel {
    pub mu: Vec<Complex64>,
    pub m: Vec<i64>,
    /// Fourier modes -m_cut ..= m_cut, in order.
    pub m_cut: i64,
    contours: Vec<ContourSum>,
}

impl ComplexBesselKernel {
    pub fn new(mu: &[Complex64], m: &[i64], opts: KernelOpts) -> Result<Self> {
        if mu.len() != m.len() || mu.is_empty() {
            return Err(Error::InvalidParams("parameter length mismatch".into()));
        }
        let r = mu.len();
        let big_m = m.iter().map(|x| x.unsigned_abs()).max().unwrap() as f64;
        // truncation of the Fourier series from the explicit mode bound
        let ln_x = opts.x_max.ln().max(0.0);
        let mut m_cut = big_m as i64 + 1;
        loop {
            let am = m_cut as f64 + 1.0;
            let ln_term = r as f64 * (am * (2.0 * PI * std::f64::consts::E).ln() - (am - big_m) * (am + 1.0).ln())
                + (am - big_m - 1.0) * ln_x;
            if ln_term < opts.tol.ln() {
                break;
            }
            m_cut += 1;
            if m_cut > 64 {
                return Err(Error::ToleranceUnreachable {
                    tol: opts.tol,
                    err: ln_term.exp(),
                });
            }
        }
        let h = 2.0 + mu.iter().map(|z| z.im.abs()).fold(0.0f64, f64::max);
        let sigma0 = 0.75;
        let ln_x_max = opts.x_max.ln().abs().max(1.0);
        let mut contours = Vec::new();
        for mode in -m_cut..=m_cut {
            let mu_c = mu.to_vec();
            let mv: Vec<i64> = m.iter().map(|&ml| ml + mode).collect();
            let f = move |s: Complex64| -> Complex64 {
                mu_c.iter().zip(&mv).map(|(l, ml)| ln_g_m(s - l, *ml)).sum()
            };
            contours.push(build_contour(
                &f,
                r,
                sigma0,
                opts.sigma1.min(-0.25),
                h,
                opts.tol,
                ln_x_max,
                opts.density,
                2.0,
            )?);
        }
        Ok(ComplexBesselKernel {
            mu: mu.to_vec(),
            m: m.to_vec(),
            m_cut,
            contours,
        })
    }

    /// j_{(mu, m + mode e)}(x), x > 0 the modulus variable.
    pub fn j_mode(&self, mode: i64, x: f64) -> Complex64 {
        let idx = (mode + self.m_cut) as usize;
        self.contours[idx].eval(x.ln(), 2.0)
    }

    /// J(z) at z = x e^{i phi}: (1/2pi) sum over modes of j_mode(x) e(mode phi / 2pi).
    pub fn eval_polar(&self, x: f64, phi: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for mode in -self.m_cut..=self.m_cut {
            acc += self.j_mode(mode, x) * (I * (mode as f64) * phi).exp();
        }
        acc / (2.0 * PI)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_polar(z.norm(), z.arg())
    }
}

/// Representation parameters for the shipped forms at a real place.
pub fn delta_form_params() -> (Vec<Complex64>, Vec<u8>) {
    // discrete series of weight 12: m = 11
    (
        vec![Complex64::new(5.5, 0.0), Complex64::new(-5.5, 0.0)],
        vec![0, 0],
    )
}

pub fn sym2_delta_params() -> (Vec<Complex64>, Vec<u8>) {
    // symmetric square of the weight-12 discrete series: a weight-22 pair
    // (mu = +-11, opposite parities) plus an odd sign character (mu = 0,
    // delta = 1)
    (
        vec![
            Complex64::new(11.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-11.0, 0.0),
        ],
        vec![0, 1, 1],
    )
}

/// Frequency (cycles per unit) maximizing the matched-filter response
/// |sum g(x_k) e(-nu x_k)| over a scan around nu0, refined by golden-section.
pub fn matched_frequency(xs: &[f64], samples: &[f64], nu0: f64, half_width: f64) -> f64 {
    let response = |nu: f64| -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, g) in xs.iter().zip(samples) {
            acc += g * (-I * 2.0 * PI * nu * x).exp();
        }
        acc.norm()
    };
    let mut best = nu0;
    let mut best_r = response(nu0);
    let steps = 400;
    for k in 0..=steps {
        let nu = nu0 - half_width + 2.0 * half_width * k as f64 / steps as f64;
        let r = response(nu);
        if r > best_r {
            best_r = r;
            best = nu;
        }
    }
    // golden-section refinement around the scan maximum
    let (mut a, mut b) = (best - 2.0 * half_width / steps as f64, best + 2.0 * half_width / steps as f64);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        let c1 = b - phi * (b - a);
        let c2 = a + phi * (b - a);
        if response(c1) < response(c2) {
            a = c1;
        } else {
            b = c2;
        }
    }
    (a + b) / 2.0
}

/// Dominant frequency (in cycles per unit) of a real sample sequence, via a
/// Hann-windowed DFT peak with parabolic interpolation.
pub fn dominant_frequency(samples: &[f64], dx: f64) -> f64 {
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let mut v: Vec<Complex64> = samples
        .iter()
        .enumerate()
        .map(|(k, &s)| {
            let w = 0.5 - 0.5 * (2.0 * PI * k as f64 / (n - 1) as f64).cos();
            Complex64::new((s - mean) * w, 0.0)
        })
        .collect();
    let mut planner = rustfft::FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut v);
    let half = n / 2;
    let (mut kmax, mut best) = (1usize, 0.0f64);
    for (k, z) in v.iter().enumerate().take(half).skip(1) {
        let m = z.norm();
        if m > best {
            best = m;
            kmax = k;
        }
    }
    // parabolic interpolation on log magnitudes
    let lm = |k: usize| v[k].norm().max(1e-300).ln();
    let (a, b, c) = (lm(kmax - 1), lm(kmax), lm(kmax + 1));
    let denom = a - 2.0 * b + c;
    let frac = if denom.abs() > 1e-12 { 0.5 * (a - c) / denom } else { 0.0 };
    (kmax as f64 + frac) / (n as f64 * dx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::bessel_jn;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn g_delta_special_points() {
        // G_0(1/2) = 1, G_1(1/2) = i, G_0(1) = 0 is a zero (cos(pi/2))
        let g = ln_g_delta(c(0.5, 0.0), 0).exp();
        assert!((g - c(1.0, 0.0)).norm() < 1e-12);
        let g1 = ln_g_delta(c(0.5, 0.0), 1).exp();
        assert!((g1 - c(0.0, 1.0)).norm() < 1e-12);
        let gz = g_delta_trig(c(1.0, 0.0), 0);
        assert!(gz.norm() < 1e-12);
        // G_m(1/2) = i^{|m|}
        assert!((ln_g_m(c(0.5, 0.0), 0).exp() - c(1.0, 0.0)).norm() < 1e-12);
        assert!((ln_g_m(c(0.5, 0.0), 2).exp() - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn g_delta_two_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let s = c(rng.gen_range(-2.0..2.0), rng.gen_range(-8.0..8.0));
            for delta in [0u8, 1] {
                let a = ln_g_delta(s, delta).exp();
                let b = g_delta_trig(s, delta);
                if a.norm() > 1e-6 {
                    assert!(
                        (a - b).norm() / a.norm() < 1e-10,
                        "s = {s}, delta = {delta}: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn pole_guard_triggers() {
        // G_0(s) has a pole at s = 0
        assert!(matches!(
            gamma_factor_real(c(1e-10, 0.0), c(0.0, 0.0), 0),
            Err(Error::PoleProximity { .. })
        ));
        assert!(gamma_factor_real(c(0.3, 0.0), c(0.0, 0.0), 0).is_ok());
        assert!(matches!(
            gamma_factor_complex(c(-1.0, 0.0), c(0.0, 0.0), 0),
            Err(Error::PoleProximity { .. })
        ));
    }

    #[test]
    fn discrete_series_duplication() {
        // for the weight-12 discrete series both delta choices give the
        // same gamma factor, the duplication form
        let (mu, _) = delta_form_params();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let s = c(rng.gen_range(-0.5..1.5), rng.gen_range(-6.0..6.0));
            let g00: Complex64 = mu.iter().map(|m| ln_g_delta(s - m, 0)).sum();
            let g11: Complex64 = mu.iter().map(|m| ln_g_delta(s - m, 1)).sum();
            let dup = (1.0 - 2.0 * s) * (2.0 * PI).ln() + ln_gamma(s + 5.5) - ln_gamma(1.0 - s + 5.5);
            let a = g00.exp();
            let b = g11.exp();
            let d = dup.exp(); // i^{m+1} = i^12 = 1
            assert!((a - d).norm() < 1e-9 * d.norm().max(1.0), "{s}: {a} vs {d}");
            assert!((b - d).norm() < 1e-9 * d.norm().max(1.0));
        }
    }

    #[test]
    fn kernel_matches_classical_bessel() {
        // the weight-12 kernel is proportional to J_11(4 pi sqrt x)
        let (mu, delta) = delta_form_params();
        let kern = RealBesselKernel::new(&mu, &delta, KernelOpts::default()).unwrap();
        let mut ratios = Vec::new();
        for i in 0..50 {
            let x = 2.0 + 8.0 * i as f64 / 49.0;
            let j = kern.eval(x);
            assert!(j.im.abs() < 1e-9);
            let cl = bessel_jn(11, 4.0 * PI * x.sqrt());
            if cl.abs() > 1e-3 {
                ratios.push(j.re / cl);
            }
        }
        assert!(ratios.len() > 20);
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let rsd = (ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>()
            / ratios.len() as f64)
            .sqrt()
            / mean.abs();
        assert!(rsd < 1e-6, "relative sd {rsd}");
        // the constant is 2 pi
        assert!((mean - 2.0 * PI).abs() < 1e-6 * 2.0 * PI, "constant {mean}");
    }

    #[test]
    fn discrete_series_vanishes_on_negative_axis() {
        let (mu, delta) = delta_form_params();
        let kern = RealBesselKernel::new(&mu, &delta, KernelOpts::default()).unwrap();
        for x in [0.5f64, 2.0, 7.3, 40.0] {
            let j = kern.eval(-x);
            assert!(j.norm() < 1e-9, "J(-{x}) = {j}");
        }
    }

    #[test]
    fn contour_shift_independence() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for trial in 0..8 {
            // random unitary principal-series parameters, r = 2 and 3
            let r = if trial % 2 == 0 { 2 } else { 3 };
            let (mu, delta): (Vec<Complex64>, Vec<u8>) = if r == 2 {
                let t = rng.gen_range(0.1..2.0);
                (vec![c(0.0, t), c(0.0, -t)], vec![trial as u8 % 2, 0])
            } else {
                let t = rng.gen_range(0.1..1.5);
                (vec![c(0.0, t), c(0.0, 0.0), c(0.0, -t)], vec![0, 1, 0])
            };
            let k1 = RealBesselKernel::new(&mu, &delta, KernelOpts::default()).unwrap();
            let k2 = RealBesselKernel::new(
                &mu,
                &delta,
                KernelOpts {
                    sigma1: -1.5,
                    ..KernelOpts::default()
                },
            )
            .unwrap();
            for _ in 0..6 {
                let x = rng.gen_range(0.2..30.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                let a = k1.eval(x);
                let b = k2.eval(x);
                assert!(
                    (a - b).norm() < 1e-8 * (1.0 + a.norm()),
                    "r = {r}, x = {x}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn near_zero_bound_real() {
        // |J(x)| |x|^{1/2} stays bounded as x -> 0
        let (mu, delta) = sym2_delta_params();
        let kern = RealBesselKernel::new(&mu, &delta, KernelOpts::default()).unwrap();
        let mut sup = 0.0f64;
        for i in 0..40 {
            let x = 10f64.powf(-4.0 + 4.0 * i as f64 / 39.0);
            for sgn in [1.0, -1.0] {
                sup = sup.max(kern.eval(sgn * x).norm() * x.sqrt());
            }
        }
        assert!(sup.is_finite() && sup < 50.0, "sup = {sup}");
    }

    #[test]
    fn principal_series_negative_axis_decay() {
        // r = 2: J(-x^2) decays like exp(-4 pi x); fit the log slope
        let mu = [c(0.0, 1.3), c(0.0, -1.3)];
        let kern = RealBesselKernel::new(&mu, &[0, 0], KernelOpts::default()).unwrap();
        let xs: Vec<f64> = (0..11).map(|i| 0.3 + 0.05 * i as f64).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|&x| kern.eval(-(x * x)).norm().max(1e-300).ln() + 0.5 * x.ln())
            .collect();
        let n = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!(
            (slope + 4.0 * PI).abs() < 0.15 * 4.0 * PI,
            "decay slope {slope}, expected {}",
            -4.0 * PI
        );
    }

    #[test]
    fn asymptotic_frequency_real() {
        // oscillation frequency approaches r on the positive axis
        let (mu, delta) = sym2_delta_params();
        let opts = KernelOpts {
            // subleading phase corrections bias the fit like 1/x^2, so the
            // window starts well away from the origin
            x_max: 43000.0,
            ..KernelOpts::default()
        };
        let kern = RealBesselKernel::new(&mu, &delta, opts).unwrap();
        let dx = 0.02;
        let xs: Vec<f64> = (0..500).map(|i| 25.0 + dx * i as f64).collect();
        let samples: Vec<f64> = xs.iter().map(|&x| (kern.eval(x * x * x) * x).re).collect();
        let freq = matched_frequency(&xs, &samples, 3.0, 0.2);
        assert!((freq - 3.0).abs() < 0.01, "fitted frequency {freq}");

        let (mu2, delta2) = delta_form_params();
        let opts2 = KernelOpts {
            x_max: 250.0,
            tol: 1e-7,
            ..KernelOpts::default()
        };
        let kern2 = RealBesselKernel::new(&mu2, &delta2, opts2).unwrap();
        let samples2: Vec<f64> = xs
            .iter()
            .map(|&x| (kern2.eval(x * x) * x.sqrt()).re)
            .collect();
        let freq2 = matched_frequency(&xs, &samples2, 2.0, 0.2);
        assert!((freq2 - 2.0).abs() < 0.01, "fitted frequency {freq2}");
    }

    #[test]
    fn complex_kernel_consistency() {
        // spherical principal series on GL2(C)
        let mu = [c(0.0, 0.8), c(0.0, -0.8)];
        let m = [0i64, 0];
        let opts = KernelOpts {
            x_max: 6.0,
            ..KernelOpts::default()
        };
        let k1 = ComplexBesselKernel::new(&mu, &m, opts).unwrap();
        let k2 = ComplexBesselKernel::new(
            &mu,
            &m,
            KernelOpts {
                sigma1: -0.6,
                density: 1.5,
                x_max: 6.0,
                ..KernelOpts::default()
            },
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..8 {
            let x = rng.gen_range(0.3..3.0);
            let phi = rng.gen_range(-PI..PI);
            let a = k1.eval_polar(x, phi);
            let b = k2.eval_polar(x, phi);
            assert!((a - b).norm() < 1e-7 * (1.0 + a.norm()), "{a} vs {b}");
        }
        // mode-0 parameters: rotation invariance J(z e^{i phi}) = J(z)... holds
        // only for m = 0 since the Fourier modes m + mode*e with mode != 0
        // still contribute; instead check conjugate symmetry of the series
        let v1 = k1.eval_polar(1.3, 0.7);
        let v2 = k1.eval_polar(1.3, -0.7);
        assert!((v1 - v2.conj()).norm() < 1e-8 * (1.0 + v1.norm()));
    }

    #[test]
    fn complex_kernel_near_zero_bound() {
        let mu = [c(0.0, 0.5), c(0.0, -0.5)];
        let opts = KernelOpts {
            x_max: 2.0,
            ..KernelOpts::default()
        };
        let k = ComplexBesselKernel::new(&mu, &[0, 0], opts).unwrap();
        let mut sup = 0.0f64;
        for i in 0..20 {
            let x = 10f64.powf(-3.0 + 3.0 * i as f64 / 19.0);
            // |J(z)| << |z|^{-1}
            sup = sup.max(k.eval_polar(x, 0.3).norm() * x);
        }
        assert!(sup.is_finite() && sup < 100.0, "sup = {sup}");
    }
}
