//! Special functions: complex log-gamma and classical Bessel J_n.

use num_complex::Complex64;
use std::f64::consts::PI;

// Lanczos g = 7, n = 9 coefficients (GSL / numerical recipes set).
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Principal branch of log Gamma(z) for complex z, via Lanczos with reflection.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        let pi_z = Complex64::new(PI, 0.0) * z;
        return Complex64::new(PI, 0.0).ln() - ln_sin(pi_z) - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let zm1 = z - 1.0;
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += *c / (zm1 + i as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (zm1 + 0.5) * t.ln() - t + acc.ln()
}

/// Gamma(z); overflows for large |z|, prefer ln_gamma in kernels.
pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// log sin(z), stable for large |Im z|.
pub fn ln_sin(z: Complex64) -> Complex64 {
    // sin z = (e^{iz} - e^{-iz}) / 2i; factor out the dominant exponential.
    let iz = Complex64::new(0.0, 1.0) * z;
    let ln_2i = Complex64::new(0.0, 1.0).ln() + (2.0f64).ln();
    if z.im > 0.0 {
        // dominant e^{-iz}: sin z = e^{-iz} (e^{2iz} - 1) / (2i)
        let r = (2.0 * iz).exp() - 1.0;
        -iz + r.ln() - ln_2i
    } else {
        // dominant e^{iz}: sin z = e^{iz} (1 - e^{-2iz}) / (2i)
        let r = Complex64::new(1.0, 0.0) - (-2.0 * iz).exp();
        iz + r.ln() - ln_2i
    }
}

/// log cos(z), stable for large |Im z|.
pub fn ln_cos(z: Complex64) -> Complex64 {
    let iz = Complex64::new(0.0, 1.0) * z;
    if z.im > 0.0 {
        let r = Complex64::new(1.0, 0.0) + (2.0 * iz).exp();
        -iz + r.ln() - (2.0f64).ln()
    } else {
        let r = Complex64::new(1.0, 0.0) + (-2.0 * iz).exp();
        iz + r.ln() - (2.0f64).ln()
    }
}

/// e(x) = exp(2 pi i x).
pub fn e_of(x: f64) -> Complex64 {
    let t = 2.0 * PI * x;
    Complex64::new(t.cos(), t.sin())
}

/// Classical Bessel function J_n(x) for integer order n >= 0, by Miller's
/// downward recurrence with the J_0 + 2 sum J_{2k} = 1 normalization.
pub fn bessel_jn(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let ax = x.abs();
    let sign = if x < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    // start well above both the order and the turning point
    let m = ((n as f64).max(ax) + 15.0 * ((n as f64).max(ax)).cbrt() + 20.0) as usize;
    let m = if m % 2 == 0 { m } else { m + 1 };
    let mut jp = 0.0f64; // J_{k+1}
    let mut jc = 1e-300; // J_k, starting at k = m
    let mut norm = if m % 2 == 0 { 2.0 * jc } else { 0.0 };
    let mut out = if n as usize == m { jc } else { 0.0 };
    for k in (1..=m).rev() {
        // J_{k-1} = (2k/x) J_k - J_{k+1}
        let jm = 2.0 * k as f64 / ax * jc - jp;
        jp = jc;
        jc = jm;
        if jc.abs() > 1e250 {
            jc *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            out *= 1e-250;
        }
        let idx = k - 1;
        if idx > 0 && idx % 2 == 0 {
            norm += 2.0 * jc;
        }
        if idx == n as usize {
            out = jc;
        }
    }
    norm += jc; // jc = J_0
    sign * out / norm
}
