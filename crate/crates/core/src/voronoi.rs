//! Classical summation identity relating additively twisted coefficient sums
//! to dual sums with transformed weights and Kloosterman factors. The
//! identity is asserted numerically over the rationals, where exact
//! coefficient providers are available; both sides are computed by
//! independent code paths.

use num_complex::Complex64;
use serde::Serialize;

use crate::bessel::{sym2_delta_params, KernelOpts, RealBesselKernel};
use crate::coeffs::{gl2_lambda, gl3_sym2};
use crate::hankel::{HankelReal, TestFunction};
use crate::kloosterman::{inv_mod, kloosterman_rational};
use crate::special::e_of;
use crate::{Error, Result};

/// One verification instance over the rationals: rank 2 or 3, a reduced
/// fraction alpha/beta, and a smooth compactly supported test function.
pub struct VoronoiInstance {
    pub rank: usize,
    pub alpha: i64,
    pub beta: u64,
    pub f: TestFunction,
    pub tol: f64,
    /// Cap on the dual variable |y|; the dual sum is truncated adaptively
    /// but never reaches past this radius.
    pub y_cap: f64,
    hankel: HankelReal,
}

#[derive(Debug, Clone, Serialize)]
pub struct VoronoiReport {
    pub rank: usize,
    pub alpha: i64,
    pub beta: u64,
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub rhs_re: f64,
    pub rhs_im: f64,
    pub tail_estimate: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub lhs_terms: usize,
    pub rhs_terms: usize,
    pub pass: bool,
}

impl VoronoiInstance {
    pub fn new(rank: usize, alpha: i64, beta: u64, f: TestFunction, tol: f64, y_cap: f64) -> Result<Self> {
        if beta == 0 {
            return Err(Error::DivisionByZero);
        }
        if num::integer::gcd(alpha.unsigned_abs(), beta) != 1 {
            return Err(Error::InvalidParams(format!("alpha={alpha}, beta={beta} not coprime")));
        }
        let hankel = match rank {
            2 => HankelReal::delta_fast(),
            3 => {
                let (mu, delta) = sym2_delta_params();
                let (_, b) = f.weight.support();
                let opts = KernelOpts {
                    sigma1: -2.5,
                    tol: 1e-8,
                    x_max: b * y_cap,
                    ..Default::default()
                };
                HankelReal::from_kernel_tabulated(RealBesselKernel::new(&mu, &delta, opts)?, b * y_cap)?
            }
            _ => return Err(Error::InvalidParams(format!("rank {rank} unsupported"))),
        };
        Ok(VoronoiInstance { rank, alpha, beta, f, tol, y_cap, hankel })
    }

    fn coeff(&self, n: u64) -> Result<f64> {
        match self.rank {
            2 => gl2_lambda(n),
            _ => gl3_sym2(1, n),
        }
    }

    /// Twisted sum over the integers in the support of f. The additive
    /// character is reduced exactly mod beta before exponentiation.
    pub fn lhs_sum(&self) -> Result<(Complex64, usize)> {
        let (a, b) = self.f.weight.support();
        let beta = self.beta as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut terms = 0;
        for n in (a.ceil() as i64).max(1)..=(b.floor() as i64) {
            let c = self.coeff(n as u64)?;
            let phase = e_of((self.alpha * n).rem_euclid(beta) as f64 / beta as f64);
            acc += c * phase * self.f.eval_real(n as f64);
            terms += 1;
        }
        Ok((acc, terms))
    }

    fn quad_tol(&self) -> f64 {
        (self.tol * 1e-2).max(1e-12)
    }

    fn abar(&self) -> Result<i64> {
        if self.beta == 1 {
            return Ok(0);
        }
        let beta = self.beta as i64;
        inv_mod(self.alpha.rem_euclid(beta), beta)
            .ok_or_else(|| Error::InvalidParams(format!("{} not invertible mod {}", self.alpha, self.beta)))
    }

    /// Dual sum for rank 2: (1/beta) sum over n != 0 of the dual coefficient
    /// times the conjugate character at -abar n / beta times f~(n / beta^2).
    pub fn rhs_sum_gl2(&self) -> Result<(Complex64, f64, usize)> {
        let beta = self.beta as i64;
        let abar = self.abar()?;
        let b2 = (self.beta * self.beta) as f64;
        let qtol = self.quad_tol();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut terms = 0;
        let mut n: i64 = 1;
        let block = 16i64.max(beta * beta / 4);
        let mut small_blocks = 0;
        loop {
            let mut block_abs = 0.0;
            for k in n..n + block {
                for sign in [1i64, -1] {
                    let m = sign * k;
                    let y = m as f64 / b2;
                    if y.abs() > self.y_cap {
                        continue;
                    }
                    let ft = self.hankel.eval(&self.f, y, qtol)?;
                    let c = self.coeff(k as u64)?;
                    let phase = e_of((-abar * m).rem_euclid(beta) as f64 / beta as f64);
                    let term = c * phase * ft / self.beta as f64;
                    acc += term;
                    block_abs += term.norm();
                    terms += 1;
                }
            }
            n += block;
            if block_abs < self.tol / 10.0 {
                small_blocks += 1;
                if small_blocks >= 2 {
                    return Ok((acc, 4.0 * block_abs.max(1e-300), terms));
                }
            } else {
                small_blocks = 0;
            }
            if (n as f64 / b2) > self.y_cap {
                return Err(Error::TailBound { tail: block_abs, radius: self.y_cap });
            }
        }
    }

    /// Dual sum for rank 3: divisors d | beta, modulus beta/d Kloosterman
    /// factors, coefficients A(d, n), dual weight at n d^2 / beta^3.
    pub fn rhs_sum_gl3(&self) -> Result<(Complex64, f64, usize)> {
        let abar = self.abar()?;
        let b3 = (self.beta as f64).powi(3);
        let qtol = self.quad_tol();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut tail = 0.0;
        let mut terms = 0;
        for d in 1..=self.beta {
            if self.beta % d != 0 {
                continue;
            }
            let c_mod = (self.beta / d) as i64;
            let factor = d as f64 / (self.beta * self.beta) as f64;
            let scale = d as f64 * d as f64 / b3;
            let mut n: i64 = 1;
            let block = 16i64;
            let mut small_blocks = 0;
            let mut done = false;
            while !done {
                let mut block_abs = 0.0;
                for k in n..n + block {
                    for sign in [1i64, -1] {
                        let m = sign * k;
                        let y = m as f64 * scale;
                        if y.abs() > self.y_cap {
                            done = true;
                            continue;
                        }
                        let ft = self.hankel.eval(&self.f, y, qtol)?;
                        let s = if c_mod == 1 {
                            1.0
                        } else {
                            kloosterman_rational(1, (abar * m).rem_euclid(c_mod), c_mod as u64)?
                        };
                        let c = gl3_sym2(d, k as u64)?;
                        let term = factor * c * s * ft;
                        acc += term;
                        block_abs += term.norm();
                        terms += 1;
                    }
                }
                n += block;
                if block_abs < self.tol / (10.0 * self.beta as f64) {
                    small_blocks += 1;
                    if small_blocks >= 2 {
                        tail += 4.0 * block_abs;
                        break;
                    }
                } else {
                    small_blocks = 0;
                }
                if done {
                    tail += 4.0 * block_abs.max(self.tol / 10.0);
                }
            }
        }
        Ok((acc, tail.max(1e-300), terms))
    }

    /// Per-divisor absolute mass of the rank-3 dual sum: for each d | beta the
    /// sum of |term| over the first `terms_per_divisor` dual frequencies (both
    /// signs).  Exposes how the strata are weighted without the cancellation
    /// that hides it in the full sum.
    pub fn divisor_strata(&self, terms_per_divisor: usize) -> Result<Vec<(u64, f64)>> {
        if self.rank != 3 {
            return Err(Error::InvalidParams("divisor strata are a rank-3 notion".into()));
        }
        let abar = self.abar()?;
        let b3 = (self.beta as f64).powi(3);
        let qtol = self.quad_tol();
        let mut out = Vec::new();
        for d in 1..=self.beta {
            if self.beta % d != 0 {
                continue;
            }
            let c_mod = (self.beta / d) as i64;
            let factor = d as f64 / (self.beta * self.beta) as f64;
            let scale = d as f64 * d as f64 / b3;
            let mut mass = 0.0;
            for k in 1..=terms_per_divisor as i64 {
                for sign in [1i64, -1] {
                    let m = sign * k;
                    let y = m as f64 * scale;
                    if y.abs() > self.y_cap {
                        continue;
                    }
                    let ft = self.hankel.eval(&self.f, y, qtol)?;
                    let s = if c_mod == 1 {
                        1.0
                    } else {
                        kloosterman_rational(1, (abar * m).rem_euclid(c_mod), c_mod as u64)?
                    };
                    mass += (factor * gl3_sym2(d, k as u64)? * s * ft).norm();
                }
            }
            out.push((d, mass));
        }
        Ok(out)
    }

    pub fn verify_identity(&self) -> Result<VoronoiReport> {
        let (lhs, lhs_terms) = self.lhs_sum()?;
        let (rhs, tail_estimate, rhs_terms) = match self.rank {
            2 => self.rhs_sum_gl2()?,
            _ => self.rhs_sum_gl3()?,
        };
        let abs_residual = (lhs - rhs).norm();
        let denom = lhs.norm().max(rhs.norm()).max(1e-300);
        let rel_residual = abs_residual / denom;
        Ok(VoronoiReport {
            rank: self.rank,
            alpha: self.alpha,
            beta: self.beta,
            lhs_re: lhs.re,
            lhs_im: lhs.im,
            rhs_re: rhs.re,
            rhs_im: rhs.im,
            tail_estimate,
            abs_residual,
            rel_residual,
            lhs_terms,
            rhs_terms,
            pass: abs_residual <= self.tol + tail_estimate,
        })
    }
}
