//! Kloosterman sums over Z and over rings of integers of the shipped
//! fields, plus an exhaustive Weil-bound scan.

use crate::numberfield::{FieldElement, NumberField};
use crate::special::e_of;
use crate::{Error, Result};
use num::ToPrimitive;
use num_complex::Complex64;
use rustfft::FftPlanner;

/// Cap on the modulus norm for field Kloosterman sums.
pub const NORM_CAP: u64 = 50_000;

pub fn inv_mod(a: i64, c: i64) -> Option<i64> {
    let (mut r0, mut r1) = (c, a.rem_euclid(c));
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 == 1 {
        Some(t0.rem_euclid(c))
    } else {
        None
    }
}

/// S(a, b; c) over Z by direct summation; the value is real.
pub fn kloosterman_rational(a: i64, b: i64, c: u64) -> Result<f64> {
    if c == 0 {
        return Err(Error::InvalidParams("modulus must be positive".into()));
    }
    if c > NORM_CAP {
        return Err(Error::ArgumentCap { n: c, cap: NORM_CAP });
    }
    let c = c as i64;
    let mut s = Complex64::new(0.0, 0.0);
    for x in 1..=c {
        if let Some(xi) = inv_mod(x, c) {
            s += e_of(((a * x).rem_euclid(c) + (b * xi).rem_euclid(c)) as f64 / c as f64);
        }
    }
    debug_assert!(s.im.abs() < 1e-8 * (1.0 + s.re.abs()));
    Ok(s.re)
}

fn divisor_count(mut n: u64) -> u64 {
    let mut d = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            d *= e + 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        d *= 2;
    }
    d
}

/// Result of an exhaustive Weil-bound check |S(a,1;c)| <= d(c) sqrt(c)
/// over all a mod c, c <= c_max.
#[derive(Debug, Clone, serde::Serialize)]
pub struct WeilReport {
    pub c_max: u64,
    pub checked: u64,
    pub max_ratio: f64,
    /// (a, c) attaining the maximum ratio.
    pub argmax: (u64, u64),
    pub violations: u64,
}

/// Batch check of the Weil bound using one FFT per modulus: with
/// v[y] = e(inv(y)/c) on invertible y, the forward transform evaluates
/// S(a, 1; c) for every a simultaneously.
pub fn weil_check(c_max: u64) -> Result<WeilReport> {
    if c_max > NORM_CAP {
        return Err(Error::ArgumentCap { n: c_max, cap: NORM_CAP });
    }
    let mut planner = FftPlanner::<f64>::new();
    let mut max_ratio = 0.0f64;
    let mut argmax = (0u64, 1u64);
    let mut checked = 0u64;
    let mut violations = 0u64;
    for c in 1..=c_max {
        let n = c as usize;
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for y in 0..n {
            if let Some(yi) = inv_mod(y as i64, c as i64) {
                v[y] = e_of(yi as f64 / c as f64);
            }
        }
        let fft = planner.plan_fft_forward(n);
        fft.process(&mut v);
        // forward transform uses e(-ky/c): S(a,1;c) lands at index (c - a) mod c
        let bound = divisor_count(c) as f64 * (c as f64).sqrt();
        for a in 0..c {
            let s = v[((c - a) % c) as usize].norm();
            let ratio = s / bound;
            checked += 1;
            if ratio > max_ratio {
                max_ratio = ratio;
                argmax = (a, c);
            }
            if ratio > 1.0 + 1e-9 {
                violations += 1;
            }
        }
    }
    Ok(WeilReport {
        c_max,
        checked,
        max_ratio,
        argmax,
        violations,
    })
}

/// Kloosterman sum over the ring of integers:
/// S(a, b; beta) = sum over x in (O/beta)^* of e(Tr((a x + b xbar)/beta)),
/// with xbar the inverse of x mod beta. Exact rational traces are reduced
/// mod 1 before exponentiation.
pub fn kloosterman_field(
    field: &NumberField,
    a: &FieldElement,
    b: &FieldElement,
    beta: &FieldElement,
) -> Result<Complex64> {
    if beta.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let nb = field.norm_abs(beta);
    let nb_u = nb
        .to_integer()
        .to_u64()
        .filter(|&n| n <= NORM_CAP)
        .ok_or_else(|| Error::ArgumentCap {
            n: u64::MAX,
            cap: NORM_CAP,
        })?;
    let _ = nb_u;
    let mut s = Complex64::new(0.0, 0.0);
    for x in field.residues(beta)? {
        let (g, u, _) = field.ext_gcd(&x, beta)?;
        if !field.is_unit(&g) {
            continue;
        }
        let xbar = field.mul(&u, &field.inv(&g)?);
        let num = field.add(&field.mul(a, &x), &field.mul(b, &xbar));
        let arg = field.div(&num, beta)?;
        let (_, tr) = field.norm_trace(&arg)?;
        // exact fractional part of the rational trace
        let frac = &tr - tr.floor();
        s += e_of(frac.to_f64().unwrap());
    }
    Ok(s)
}

/// Number of invertible residues mod beta.
pub fn unit_group_order(field: &NumberField, beta: &FieldElement) -> Result<u64> {
    let mut count = 0u64;
    for x in field.residues(beta)? {
        if x.is_zero() && !field.is_unit(beta) {
            continue;
        }
        let g = field.gcd(&x, beta)?;
        if field.is_unit(&g) {
            count += 1;
        }
    }
    Ok(count)
}
