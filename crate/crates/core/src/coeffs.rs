//! Fourier coefficient providers: the discriminant cusp form, its
//! symmetric-square lift, and control sequences.
//!
//! Tau values are computed exactly in i128 from the eta-power expansion
//! of the discriminant form and cached globally; normalized coefficients
//! are derived from them.

use crate::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;
use std::sync::RwLock;

/// Hard cap on tau table size.
pub const TAU_CAP: u64 = 1_000_000;

static TAU_TABLE: RwLock<Vec<i128>> = RwLock::new(Vec::new());

/// Cube of the Euler product as a sparse series: sum (-1)^k (2k+1) q^{k(k+1)/2}.
fn eta_cubed_sparse(len: usize) -> Vec<(usize, i128)> {
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let e = k * (k + 1) / 2;
        if e >= len {
            return out;
        }
        let c = (2 * k + 1) as i128;
        out.push((e, if k % 2 == 0 { c } else { -c }));
        k += 1;
    }
}

fn compute_tau_table(n: usize) -> Vec<i128> {
    let len = n; // coefficients of q^0 .. q^{n-1} of the 24th Euler power
    let sparse = eta_cubed_sparse(len);
    // start with the cube itself, then seven more sparse multiplies -> 24th power
    let mut dense = vec![0i128; len];
    for &(e, c) in &sparse {
        dense[e] = c;
    }
    for _ in 0..7 {
        let mut next = vec![0i128; len];
        for &(e, c) in &sparse {
            for i in 0..len - e {
                let d = dense[i];
                if d != 0 {
                    next[i + e] += c * d;
                }
            }
        }
        dense = next;
    }
    dense // dense[i] = tau(i + 1)
}

/// Ramanujan tau(n), exact.
pub fn tau(n: u64) -> Result<i128> {
    if n == 0 || n > TAU_CAP {
        return Err(Error::ArgumentCap { n, cap: TAU_CAP });
    }
    {
        let t = TAU_TABLE.read().unwrap();
        if (n as usize) <= t.len() {
            return Ok(t[n as usize - 1]);
        }
    }
    let mut t = TAU_TABLE.write().unwrap();
    if (n as usize) > t.len() {
        let target = (n as usize).next_power_of_two().max(1024);
        *t = compute_tau_table(target.min(TAU_CAP as usize));
    }
    Ok(t[n as usize - 1])
}

/// Hecke-normalized GL(2) coefficient lambda(n) = tau(n) / n^{11/2}.
pub fn gl2_lambda(n: u64) -> Result<f64> {
    let t = tau(n)? as f64;
    Ok(t / (n as f64).powf(5.5))
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Complete homogeneous symmetric polynomials h_0..h_max in the
/// symmetric-square Satake parameters at p, via the Newton recurrence
/// with e1 = e2 = lambda(p)^2 - 1 and e3 = 1.
fn sym2_h(p: u64, max: usize) -> Result<Vec<f64>> {
    let a = gl2_lambda(p)?.powi(2) - 1.0;
    let mut h = vec![0.0f64; max + 1];
    h[0] = 1.0;
    for k in 1..=max {
        let mut v = a * h[k - 1];
        if k >= 2 {
            v -= a * h[k - 2];
        }
        if k >= 3 {
            v += h[k - 3];
        }
        h[k] = v;
    }
    Ok(h)
}

/// A(p^a, p^b) for the symmetric-square lift: the Schur polynomial
/// s_{(a+b, b, 0)} via the 2x2 Jacobi-Trudi determinant.
fn sym2_prime_power(p: u64, a: u32, b: u32) -> Result<f64> {
    let (a, b) = (a as usize, b as usize);
    let h = sym2_h(p, a + b + 1)?;
    let hb1 = if b == 0 { 0.0 } else { h[b - 1] };
    Ok(h[a + b] * h[b] - h[a + b + 1] * hb1)
}

/// Normalized GL(3) coefficient A(m, n) of the symmetric-square lift.
pub fn gl3_sym2(m: u64, n: u64) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParams("gl3_sym2 requires positive indices".into()));
    }
    let mut out = 1.0;
    let fm = factorize(m);
    let fn_ = factorize(n);
    let mut primes: Vec<u64> = fm.iter().chain(&fn_).map(|&(p, _)| p).collect();
    primes.sort_unstable();
    primes.dedup();
    for p in primes {
        let a = fm.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, e)| e);
        let b = fn_.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, e)| e);
        out *= sym2_prime_power(p, a, b)?;
    }
    Ok(out)
}

/// Mean of lambda(n)^2 over n <= x.
pub fn rankin_average(x: u64) -> Result<f64> {
    if x == 0 {
        return Err(Error::InvalidParams("empty average".into()));
    }
    let mut s = 0.0;
    for n in 1..=x {
        s += gl2_lambda(n)?.powi(2);
    }
    Ok(s / x as f64)
}

/// A coefficient sequence usable in twisted sums: GL(2) or GL(3) with a
/// fixed second index. Values are real for the shipped providers.
pub trait CoeffProvider: Send + Sync {
    fn name(&self) -> &str;
    /// Degree of the underlying L-function (2 or 3).
    fn rank(&self) -> u32;
    fn value(&self, n: u64) -> Result<f64>;
}

/// lambda(n) of the discriminant form.
pub struct DeltaProvider;

impl CoeffProvider for DeltaProvider {
    fn name(&self) -> &str {
        "delta"
    }
    fn rank(&self) -> u32 {
        2
    }
    fn value(&self, n: u64) -> Result<f64> {
        gl2_lambda(n)
    }
}

/// A(1, n) of the symmetric-square lift of the discriminant form.
pub struct Sym2Provider;

impl CoeffProvider for Sym2Provider {
    fn name(&self) -> &str {
        "sym2delta"
    }
    fn rank(&self) -> u32 {
        3
    }
    fn value(&self, n: u64) -> Result<f64> {
        gl3_sym2(1, n)
    }
}

/// The constant sequence 1: no cancellation, used as a control.
pub struct ConstantProvider;

impl CoeffProvider for ConstantProvider {
    fn name(&self) -> &str {
        "constant"
    }
    fn rank(&self) -> u32 {
        2
    }
    fn value(&self, _n: u64) -> Result<f64> {
        Ok(1.0)
    }
}

/// Seeded white-noise sequence in [-1, 1], deterministic per (seed, n).
pub struct SyntheticProvider {
    pub seed: u64,
}

impl CoeffProvider for SyntheticProvider {
    fn name(&self) -> &str {
        "synthetic"
    }
    fn rank(&self) -> u32 {
        2
    }
    fn value(&self, n: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9e3779b97f4a7c15) ^ n);
        Ok(rng.gen_range(-1.0..=1.0))
    }
}

pub fn provider_by_name(name: &str, seed: u64) -> Result<Box<dyn CoeffProvider>> {
    match name {
        "delta" => Ok(Box::new(DeltaProvider)),
        "sym2delta" | "sym2" => Ok(Box::new(Sym2Provider)),
        "constant" | "one" => Ok(Box::new(ConstantProvider)),
        "synthetic" => Ok(Box::new(SyntheticProvider { seed })),
        _ => Err(Error::InvalidParams(format!("unknown provider {name:?}"))),
    }
}

/// lambda(n) as a complex value; convenience for accumulation code.
pub fn as_complex(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Sidecar metadata for a binary coefficient cache.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CacheMeta {
    pub kind: String,
    /// Number of entries stored; entry k holds the value at index k + 1.
    pub count: u64,
    /// Requested upper index; count < requested means the remaining values
    /// overflow the 64-bit storage format.
    pub requested: u64,
}

/// Write tau(1..=up_to) as little-endian i64 with a JSON sidecar; values
/// that do not fit in i64 are truncated from the tail.
pub fn save_tau_cache(path: &Path, up_to: u64) -> Result<CacheMeta> {
    let mut vals = Vec::new();
    for n in 1..=up_to {
        let t = tau(n)?;
        match i64::try_from(t) {
            Ok(v) => vals.push(v),
            Err(_) => break,
        }
    }
    let meta = CacheMeta {
        kind: "tau".into(),
        count: vals.len() as u64,
        requested: up_to,
    };
    let mut f = std::fs::File::create(path)?;
    for v in &vals {
        f.write_all(&v.to_le_bytes())?;
    }
    let side = path.with_extension("json");
    std::fs::write(&side, serde_json::to_string_pretty(&meta)?)?;
    Ok(meta)
}

/// Load a tau cache, verifying the sidecar against the binary length.
pub fn load_tau_cache(path: &Path) -> Result<(CacheMeta, Vec<i64>)> {
    let side = path.with_extension("json");
    let meta: CacheMeta = serde_json::from_str(&std::fs::read_to_string(&side)?)?;
    let mut buf = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut buf)?;
    if buf.len() != meta.count as usize * 8 {
        return Err(Error::InvalidParams(format!(
            "cache length {} does not match sidecar count {}",
            buf.len(),
            meta.count
        )));
    }
    let vals = buf
        .chunks_exact(8)
        .map(|c| i64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((meta, vals))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAU_SMALL: [i128; 20] = [
        1,
        -24,
        252,
        -1472,
        4830,
        -6048,
        -16744,
        84480,
        -113643,
        -115920,
        534612,
        -370944,
        -577738,
        401856,
        1217160,
        987136,
        -6905934,
        2727432,
        10661420,
        -7109760,
    ];

    #[test]
    fn tau_small_values() {
        for (i, &expect) in TAU_SMALL.iter().enumerate() {
            assert_eq!(tau(i as u64 + 1).unwrap(), expect, "n = {}", i + 1);
        }
    }

    #[test]
    fn tau_hecke_relations() {
        // multiplicativity on coprime pairs
        for m in 1..=200u64 {
            for n in 1..=200u64 {
                if gcd(m, n) == 1 {
                    assert_eq!(
                        tau(m * n).unwrap(),
                        tau(m).unwrap() * tau(n).unwrap(),
                        "m = {m}, n = {n}"
                    );
                }
            }
        }
        // prime-power recursion tau(p^{k+1}) = tau(p) tau(p^k) - p^11 tau(p^{k-1})
        for p in [2u64, 3, 5, 7, 11, 13] {
            let p11 = (p as i128).pow(11);
            let mut pk = p;
            for _ in 1..5 {
                let next = pk * p;
                if next > TAU_CAP {
                    break;
                }
                assert_eq!(
                    tau(next).unwrap(),
                    tau(p).unwrap() * tau(pk).unwrap() - p11 * tau(pk / p).unwrap()
                );
                pk = next;
            }
        }
    }

    #[test]
    fn deligne_bounds() {
        for p in primes_below(10_000) {
            let l = gl2_lambda(p).unwrap();
            assert!(l.abs() <= 2.0 + 1e-9, "p = {p}: lambda = {l}");
            let a = gl3_sym2(1, p).unwrap();
            assert!(a.abs() <= 3.0 + 1e-9, "p = {p}: A(1,p) = {a}");
            // sym2 at a prime: A(1, p) = lambda(p)^2 - 1
            assert!((a - (l * l - 1.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn gl3_symmetry_and_multiplicativity() {
        for m in 1..=30u64 {
            for n in 1..=30u64 {
                let a = gl3_sym2(m, n).unwrap();
                let b = gl3_sym2(n, m).unwrap();
                assert!((a - b).abs() < 1e-9, "m = {m}, n = {n}");
            }
        }
        for (m1, n1, m2, n2) in [(2u64, 3u64, 5u64, 7u64), (4, 9, 25, 7), (8, 2, 3, 27)] {
            let lhs = gl3_sym2(m1 * m2, n1 * n2).unwrap();
            let rhs = gl3_sym2(m1, n1).unwrap() * gl3_sym2(m2, n2).unwrap();
            assert!((lhs - rhs).abs() < 1e-8 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn gl3_against_weyl_character() {
        // independent evaluation of s_{(a+b, b, 0)} by the Weyl character
        // formula in the numeric Satake parameters (alpha^2, 1, alpha^{-2})
        for p in [2u64, 3, 5, 7, 11] {
            let l = gl2_lambda(p).unwrap();
            // alpha + 1/alpha = lambda(p), |alpha| = 1
            let half = Complex64::new(l / 2.0, 0.0);
            let disc = (half * half - 1.0).sqrt();
            let alpha = half + disc;
            let x = [alpha.powi(2), Complex64::new(1.0, 0.0), alpha.powi(-2)];
            for a in 0..4u32 {
                for b in 0..4u32 {
                    let lam = [(a + b) as i32, b as i32, 0];
                    let num = det3(|i, j| x[j].powi(lam[i] + 2 - i as i32));
                    let den = det3(|i, j| x[j].powi(2 - i as i32));
                    let schur = num / den;
                    assert!(schur.im.abs() < 1e-8);
                    let direct = sym2_prime_power(p, a, b).unwrap();
                    assert!(
                        (schur.re - direct).abs() < 1e-7 * (1.0 + direct.abs()),
                        "p = {p}, a = {a}, b = {b}: weyl {} vs recurrence {}",
                        schur.re,
                        direct
                    );
                }
            }
        }
    }

    #[test]
    fn rankin_average_stable() {
        let a1 = rankin_average(50_000).unwrap();
        let a2 = rankin_average(100_000).unwrap();
        assert!(a1 > 0.05 && a1 < 5.0, "average {a1}");
        // the normalized second moment settles to a constant
        assert!((a1 - a2).abs() / a2 < 0.02);
    }

    #[test]
    fn tau_cap_enforced() {
        assert!(matches!(tau(0), Err(Error::ArgumentCap { .. })));
        assert!(matches!(tau(TAU_CAP + 1), Err(Error::ArgumentCap { .. })));
    }

    #[test]
    fn synthetic_deterministic() {
        let s1 = SyntheticProvider { seed: 42 };
        let s2 = SyntheticProvider { seed: 42 };
        let s3 = SyntheticProvider { seed: 43 };
        for n in 1..100 {
            assert_eq!(s1.value(n).unwrap(), s2.value(n).unwrap());
        }
        assert!((1..100).any(|n| s1.value(n).unwrap() != s3.value(n).unwrap()));
    }

    #[test]
    fn cache_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tau.bin");
        let meta = save_tau_cache(&path, 500).unwrap();
        assert_eq!(meta.count, 500);
        let (meta2, vals) = load_tau_cache(&path).unwrap();
        assert_eq!(meta, meta2);
        for (i, &v) in vals.iter().enumerate() {
            assert_eq!(v as i128, tau(i as u64 + 1).unwrap());
        }
        // large indices overflow i64 and are truncated with an honest count
        let path2 = dir.path().join("tau_big.bin");
        let meta3 = save_tau_cache(&path2, 10_000).unwrap();
        assert!(meta3.count < meta3.requested);
        assert!(i64::try_from(tau(meta3.count + 1).unwrap()).is_err());
        assert!(i64::try_from(tau(meta3.count).unwrap()).is_ok());
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }

    fn primes_below(n: u64) -> Vec<u64> {
        let mut sieve = vec![true; n as usize];
        let mut out = Vec::new();
        for p in 2..n as usize {
            if sieve[p] {
                out.push(p as u64);
                let mut q = p * p;
                while q < n as usize {
                    sieve[q] = false;
                    q += p;
                }
            }
        }
        out
    }

    fn det3(f: impl Fn(usize, usize) -> Complex64) -> Complex64 {
        let m: Vec<Vec<Complex64>> = (0..3).map(|i| (0..3).map(|j| f(i, j)).collect()).collect();
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
}
