//! Lattice sums of automorphic coefficients twisted by additive characters,
//! together with the smoothing kernels and diagnostic scans built on them.
//!
//! The central object is
//!
//! ```text
//!     S_theta(T) = sum_{gamma in O \ {0}, gamma in T*Pi} A(gamma) e(Tr(theta gamma)),
//! ```
//!
//! where the cutoff region is the closed parallelotope of `numberfield` and the
//! coefficient A(gamma) depends on gamma through |N(gamma)|.  Everything here
//! is deterministic: lattice points come out of `enumerate_lattice` in a fixed
//! order and scans iterate grids sequentially.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::coeffs::CoeffProvider;
use crate::hankel::{TestFunction, WeightSpec};
use crate::numberfield::{EmbeddedPoint, FieldElement, NumberField, PlaceType};
use crate::quad;
use crate::voronoi::VoronoiInstance;
use crate::{Error, Result};

fn e_of(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * t)
}

/// A twisted-sum evaluation request.  `weight` selects smooth mode; without it
/// the cutoff is the sharp closed parallelotope of scale `t`.
pub struct TwistQuery<'a> {
    pub provider: &'a dyn CoeffProvider,
    pub field: &'a NumberField,
    pub theta: EmbeddedPoint,
    pub t: f64,
    pub weight: Option<WeightSpec>,
}

/// Tr(theta * gamma) evaluated from the per-place embedding values.
fn twisted_trace(theta: &EmbeddedPoint, gamma: &EmbeddedPoint) -> f64 {
    let mut tr = 0.0;
    for (v, p) in theta.places.iter().enumerate() {
        let z = theta.values[v] * gamma.values[v];
        tr += match p {
            PlaceType::Real => z.re,
            PlaceType::Complex => 2.0 * z.re,
        };
    }
    tr
}

/// Cached enumeration of the nonzero lattice points in the parallelotope of
/// scale `t`, with their coefficient arguments and embeddings.  Reused across
/// many values of theta during scans.
pub struct LatticeSlice {
    pub t: f64,
    pub norms: Vec<u64>,
    pub points: Vec<EmbeddedPoint>,
}

pub fn lattice_slice(field: &NumberField, t: f64) -> Result<LatticeSlice> {
    let elems = field.enumerate_lattice(t, true)?;
    let mut norms = Vec::with_capacity(elems.len());
    let mut points = Vec::with_capacity(elems.len());
    for e in &elems {
        let n = field.norm_abs(e);
        let n = n
            .to_integer()
            .to_u64()
            .ok_or_else(|| Error::InvalidParams(format!("norm {n} does not fit in u64")))?;
        norms.push(n);
        points.push(field.embed(e)?);
    }
    Ok(LatticeSlice { t, norms, points })
}

fn sum_on_slice(
    slice: &LatticeSlice,
    provider: &dyn CoeffProvider,
    theta: &EmbeddedPoint,
) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, p) in slice.norms.iter().zip(&slice.points) {
        acc += provider.value(*n)? * e_of(twisted_trace(theta, p));
    }
    Ok(acc)
}

/// The sharp sum S_theta(T).
pub fn sharp_sum(q: &TwistQuery) -> Result<Complex64> {
    let slice = lattice_slice(q.field, q.t)?;
    sum_on_slice(&slice, q.provider, &q.theta)
}

/// The smoothed sum: the same character sum with a weight factor that is a
/// product of the radial profile over the places.  Enumeration covers the
/// support of the weight (|gamma_v| < b at every place forces |coords| < b
/// only over Q; for general fields we enumerate a generous box and rely on
/// the weight vanishing outside its support).
pub fn smooth_sum(q: &TwistQuery) -> Result<Complex64> {
    let w = q
        .weight
        .as_ref()
        .ok_or_else(|| Error::InvalidParams("smooth_sum needs a weight".into()))?;
    let (_, b) = w.support();
    let slice = lattice_slice(q.field, 2.0 * b * q.field.degree as f64)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, p) in slice.norms.iter().zip(&slice.points) {
        let mut wf = 1.0;
        for (v, place) in p.places.iter().enumerate() {
            let m = match place {
                PlaceType::Real => p.values[v].re.abs(),
                PlaceType::Complex => p.values[v].norm(),
            };
            wf *= w.eval(m);
            if wf == 0.0 {
                break;
            }
        }
        if wf != 0.0 {
            acc += provider_val(q.provider, *n)? * wf * e_of(twisted_trace(&q.theta, p));
        }
    }
    Ok(acc)
}

fn provider_val(p: &dyn CoeffProvider, n: u64) -> Result<f64> {
    p.value(n)
}

// -- theta grids and exponent scans --------------------------------------

/// Farey fractions in [0,1) with denominator <= max_den, followed by
/// `irrationals` seeded uniform draws.  Low-denominator rationals are the
/// worst cases of the rational-approximation step, irrationals probe the
/// generic regime.
pub fn theta_grid(max_den: u64, irrationals: usize, seed: u64) -> Vec<f64> {
    let mut grid = Vec::new();
    for q in 1..=max_den {
        for a in 0..q {
            if num::integer::gcd(a, q) == 1 || (a == 0 && q == 1) {
                grid.push(a as f64 / q as f64);
            }
        }
    }
    grid.sort_by(|x, y| x.partial_cmp(y).unwrap());
    grid.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..irrationals {
        grid.push(rng.gen_range(0.0..1.0));
    }
    grid
}

pub fn default_theta_grid() -> Vec<f64> {
    theta_grid(16, 48, 7)
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    /// (t, theta index, sum value) for every grid pair, in scan order.
    pub rows: Vec<(f64, usize, Complex64)>,
    pub per_t_max: Vec<(f64, f64)>,
    /// Least-squares slope of log max|S| against log T.
    pub slope: f64,
    /// Half-width of a two-sigma interval from the residual variance.
    pub ci: f64,
}

/// Growth-exponent fit for max_theta |S_theta(T)| over a T grid (rationals
/// only; the grid maximum is a lower bound for the sup over theta).
pub fn exponent_scan(
    provider: &dyn CoeffProvider,
    thetas: &[f64],
    ts: &[f64],
) -> Result<ScanReport> {
    if thetas.is_empty() || ts.len() < 2 {
        return Err(Error::InvalidParams(
            "scan needs a nonempty theta grid and at least two T values".into(),
        ));
    }
    let mut rows = Vec::new();
    let mut per_t_max = Vec::new();
    for &t in ts {
        let half = (t / 2.0).floor() as u64;
        let coeffs: Vec<f64> = (1..=half)
            .map(|n| provider.value(n))
            .collect::<Result<_>>()?;
        let mut best = 0.0f64;
        for (i, &theta) in thetas.iter().enumerate() {
            // both signs of n contribute conjugate phases, so the sum is
            // 2 sum_n lambda(n) cos(2 pi n theta)
            let step = e_of(theta);
            let mut ph = Complex64::new(1.0, 0.0);
            let mut s = 0.0;
            for c in &coeffs {
                ph *= step;
                s += c * ph.re;
            }
            let val = Complex64::new(2.0 * s, 0.0);
            best = best.max(val.norm());
            rows.push((t, i, val));
        }
        per_t_max.push((t, best));
    }
    let pts: Vec<(f64, f64)> = per_t_max
        .iter()
        .filter(|(_, m)| *m > 0.0)
        .map(|(t, m)| (t.ln(), m.ln()))
        .collect();
    let (slope, ci) = line_fit(&pts)?;
    Ok(ScanReport { rows, per_t_max, slope, ci })
}

/// Slope and two-sigma slope uncertainty of a least-squares line.
fn line_fit(pts: &[(f64, f64)]) -> Result<(f64, f64)> {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return Err(Error::InvalidParams("line fit needs >= 2 points".into()));
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    if pts.len() == 2 {
        return Ok((slope, 0.0));
    }
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum();
    let var = ss_res / (n - 2.0);
    Ok((slope, 2.0 * (var / sxx).sqrt()))
}

// -- smoothing kernel -----------------------------------------------------

/// Symmetric trapezoid profile g_X and its Fourier transform, the building
/// block of the lattice-exact smoothing function h_X.  g_X has a plateau
/// g = 1 for |t| <= X/2, falls linearly to zero across a ramp of width
/// `lambda`, and vanishes for |t| >= X/2 + lambda.
#[derive(Debug, Clone, Copy)]
pub struct SmoothingKernel {
    pub x: f64,
    pub lambda: f64,
}

impl SmoothingKernel {
    pub fn new(x: f64, lambda: f64) -> Result<Self> {
        if !(x >= 2.0) || !(lambda > 0.0) {
            return Err(Error::InvalidParams(format!(
                "smoothing kernel needs X >= 2 and lambda > 0, got X={x}, lambda={lambda}"
            )));
        }
        Ok(SmoothingKernel { x, lambda })
    }

    pub fn g(&self, t: f64) -> f64 {
        let t = t.abs();
        let a = self.x / 2.0;
        if t <= a {
            1.0
        } else if t >= a + self.lambda {
            0.0
        } else {
            1.0 - (t - a) / self.lambda
        }
    }

    /// Closed-form transform: the trapezoid is (1/lambda) * box_{a+b} * box_lambda
    /// (convolution of centered boxes, a = X/2, b = X/2 + lambda), so its
    /// transform is a product of two sine factors.
    pub fn g_hat(&self, xi: f64) -> f64 {
        let a = self.x / 2.0;
        let b = a + self.lambda;
        if xi.abs() < 1e-9 {
            return a + b;
        }
        let p = PI * xi;
        (PI * (a + b) * xi).sin() * (PI * self.lambda * xi).sin() / (self.lambda * p * p)
    }

    /// Dual-side value of the integral of h_X(x) e(Tr(x gamma)) at a lattice
    /// point: by the product construction it collapses to a product of g over
    /// the integral-basis coordinates of gamma.  Exactly 1 on the
    /// parallelotope of scale X and exactly 0 outside scale X + 2*lambda.
    pub fn dual_at(&self, gamma: &FieldElement) -> f64 {
        gamma
            .coords
            .iter()
            .map(|c| self.g(c.to_f64().unwrap()))
            .product()
    }

    /// h_X at a point of F_infty given by its realified coordinate vector.
    /// The assembly is |det M| * prod_n g_hat((M^T x)_n) where M is the
    /// trace-form-weighted real embedding matrix, which is exactly what makes
    /// the dual property collapse coordinatewise.
    pub fn h_eval(&self, field: &NumberField, x: &[f64]) -> Result<f64> {
        let m = trace_weighted_embedding(field);
        if x.len() != m.len() {
            return Err(Error::DimensionMismatch { expected: m.len(), got: x.len() });
        }
        let n = m.len();
        let mut val = det_abs(&m);
        for j in 0..n {
            let u: f64 = (0..n).map(|v| m[v][j] * x[v]).sum();
            val *= self.g_hat(u);
        }
        Ok(val)
    }

    /// L^1 norm of the one-dimensional transform, by panel quadrature with an
    /// analytic tail bound.
    pub fn g_hat_l1(&self) -> f64 {
        let a = self.x / 2.0;
        let b = a + self.lambda;
        let cut = 60.0;
        // two panels per oscillation of the fast sine factor
        let panels = ((a + b) * cut * 2.0).ceil() as usize;
        let body = quad::rule(8).integrate_panels(0.0, cut, panels, |xi| self.g_hat(xi).abs());
        let tail = 1.0 / (self.lambda * PI * PI * cut);
        2.0 * (body + tail)
    }

    /// L^1(h_X) over F_infty; the coordinate change splits it into a product
    /// of one-dimensional integrals, one per basis direction.
    pub fn h_l1(&self, field: &NumberField) -> f64 {
        self.g_hat_l1().powi(field.degree as i32)
    }
}

/// Real embedding matrix with local trace weights folded in, so that
/// Tr(x gamma) = x^T M c for the realified vector x and coordinate vector c.
fn trace_weighted_embedding(field: &NumberField) -> Vec<Vec<f64>> {
    let mut m = Vec::with_capacity(field.real_embedding.len());
    let mut row_idx = 0;
    for p in &field.places {
        match p {
            PlaceType::Real => {
                m.push(field.real_embedding[row_idx].clone());
                row_idx += 1;
            }
            PlaceType::Complex => {
                // local trace 2 Re(x_v g_v) = 2(x_re g_re - x_im g_im)
                m.push(field.real_embedding[row_idx].iter().map(|t| 2.0 * t).collect());
                m.push(field.real_embedding[row_idx + 1].iter().map(|t| -2.0 * t).collect());
                row_idx += 2;
            }
        }
    }
    m
}

fn det_abs(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[piv][col] == 0.0 {
            return 0.0;
        }
        a.swap(col, piv);
        det *= a[col][col];
        for i in col + 1..n {
            let f = a[i][col] / a[col][col];
            for k in col..n {
                a[i][k] -= f * a[col][k];
            }
        }
    }
    det.abs()
}

// -- Parseval -------------------------------------------------------------

/// Riemann average of |S_theta(T)|^2 over theta in [0,1) with `points`
/// sample points, against the direct coefficient square sum.  With more than
/// T sample points the average is exact for the underlying trigonometric
/// polynomial up to the quadrature of the cross terms.
pub fn parseval_check(
    provider: &dyn CoeffProvider,
    t: f64,
    points: usize,
) -> Result<(f64, f64)> {
    let half = (t / 2.0).floor() as u64;
    let coeffs: Vec<f64> = (1..=half).map(|n| provider.value(n)).collect::<Result<_>>()?;
    let mut avg = 0.0;
    for k in 0..points {
        let theta = k as f64 / points as f64;
        let step = e_of(theta);
        let mut ph = Complex64::new(1.0, 0.0);
        let mut s = 0.0;
        for c in &coeffs {
            ph *= step;
            s += c * ph.re;
        }
        avg += (2.0 * s).powi(2);
    }
    avg /= points as f64;
    let direct = 2.0 * coeffs.iter().map(|c| c * c).sum::<f64>();
    Ok((avg, direct))
}

// -- proof pipeline over Q ------------------------------------------------

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub theta: f64,
    pub t: f64,
    pub alpha: i64,
    pub beta: u64,
    pub delta: f64,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub tail: f64,
    pub rhs_terms: usize,
    /// |rhs| divided by the predicted main-term scale T^{1/2}.
    pub scaled: f64,
}

fn rational_parts(field: &NumberField, e: &FieldElement) -> Result<i64> {
    let c = &e.coords[0];
    if field.degree != 1 || !c.is_integer() {
        return Err(Error::InvalidParams("expected a rational integer".into()));
    }
    c.to_integer()
        .to_i64()
        .ok_or_else(|| Error::InvalidParams("integer out of i64 range".into()))
}

/// The rank-2 proof pipeline over Q: rational approximation with modulus
/// Q = sqrt(T), reduction to lowest terms, then the dual-side expansion at
/// modulus beta with the leftover modulation delta folded into the test
/// function.  The final scaling pits the dual sum against T^{1/2}.
pub fn pipeline_gl2(theta: f64, t: f64, tol: f64) -> Result<PipelineReport> {
    let field = NumberField::rationals();
    let th = field.point(vec![Complex64::new(theta, 0.0)]);
    let ap = field.dirichlet_approx(&th, t.sqrt())?;
    let mut alpha = rational_parts(&field, &ap.alpha)?;
    let mut beta = rational_parts(&field, &ap.beta)?;
    if beta < 0 {
        alpha = -alpha;
        beta = -beta;
    }
    let g = num::integer::gcd(alpha.unsigned_abs() as i64, beta).max(1);
    alpha /= g;
    beta /= g;
    let delta = theta - alpha as f64 / beta as f64;
    let weight = WeightSpec::new(t, 2.0)?;
    let f = TestFunction::new(weight, -delta);
    let inst = VoronoiInstance::new(2, alpha, beta as u64, f, tol, 40.0)?;
    let (lhs, _) = inst.lhs_sum()?;
    let (rhs, tail, rhs_terms) = inst.rhs_sum_gl2()?;
    Ok(PipelineReport {
        theta,
        t,
        alpha,
        beta: beta as u64,
        delta,
        lhs,
        rhs,
        tail,
        rhs_terms,
        scaled: rhs.norm() / t.sqrt(),
    })
}

/// Per-divisor magnitude profile of the rank-3 dual sum: for each d | beta the
/// truncated sum of |term|, exposing how the strata are weighted.
pub fn gl3_divisor_profile(inst: &VoronoiInstance, terms_per_divisor: usize) -> Result<Vec<(u64, f64)>> {
    inst.divisor_strata(terms_per_divisor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{ConstantProvider, DeltaProvider};

    fn q_query<'a>(
        provider: &'a dyn CoeffProvider,
        field: &'a NumberField,
        theta: f64,
        t: f64,
    ) -> TwistQuery<'a> {
        TwistQuery {
            provider,
            field,
            theta: field.point(vec![Complex64::new(theta, 0.0)]),
            t,
            weight: None,
        }
    }

    #[test]
    fn sharp_sum_small_cutoffs() {
        let field = NumberField::rationals();
        let delta = DeltaProvider;
        let s = sharp_sum(&q_query(&delta, &field, 0.0, 5.0)).unwrap();
        assert!((s.re - 0.939339827).abs() < 1e-8, "got {s}");
        assert!(s.im.abs() < 1e-12);
        let s = sharp_sum(&q_query(&delta, &field, 0.5, 5.0)).unwrap();
        assert!((s.re + 3.060660172).abs() < 1e-8, "got {s}");
        let s = sharp_sum(&q_query(&delta, &field, 0.37, 1.9)).unwrap();
        assert_eq!(s, Complex64::new(0.0, 0.0));
        // boundary points |n| = T/2 are included
        let s4 = sharp_sum(&q_query(&delta, &field, 0.0, 4.0)).unwrap();
        assert!((s4.re - 0.939339827).abs() < 1e-8);
    }

    #[test]
    fn sharp_sum_periodicity_and_conjugation() {
        let field = NumberField::rationals();
        let delta = DeltaProvider;
        let theta = 0.2716283;
        let a = sharp_sum(&q_query(&delta, &field, theta, 40.0)).unwrap();
        let b = sharp_sum(&q_query(&delta, &field, theta + 1.0, 40.0)).unwrap();
        assert!((a - b).norm() < 1e-10);
        let c = sharp_sum(&q_query(&delta, &field, -theta, 40.0)).unwrap();
        assert!((a.conj() - c).norm() < 1e-10);
    }

    #[test]
    fn sharp_sum_counts_gaussian_lattice() {
        let field = NumberField::gaussian();
        let one = ConstantProvider;
        let s = sharp_sum(&q_query(&one, &field, 0.0, 5.0)).unwrap();
        // coordinates in {-2..2} on both axes, minus the origin
        assert!((s.re - 24.0).abs() < 1e-9, "got {s}");
    }

    #[test]
    fn smooth_sum_matches_direct_oracle() {
        let field = NumberField::rationals();
        let delta = DeltaProvider;
        let w = WeightSpec::new(10.0, 2.0).unwrap();
        for theta in [0.0, 0.3] {
            let mut q = q_query(&delta, &field, theta, 0.0);
            q.weight = Some(w.clone());
            let s = smooth_sum(&q).unwrap();
            let mut direct = Complex64::new(0.0, 0.0);
            for n in 1..=25u64 {
                let lam = delta.value(n).unwrap();
                let wn = w.eval(n as f64);
                direct += lam * wn * (e_of(theta * n as f64) + e_of(-theta * n as f64));
            }
            assert!((s - direct).norm() < 1e-10, "theta={theta}: {s} vs {direct}");
        }
    }

    #[test]
    fn smooth_sum_zero_weight_rejected_without_weight() {
        let field = NumberField::rationals();
        let delta = DeltaProvider;
        let q = q_query(&delta, &field, 0.1, 10.0);
        assert!(smooth_sum(&q).is_err());
    }

    #[test]
    fn theta_grid_composition() {
        let g = theta_grid(8, 42, 3);
        assert_eq!(g.len(), 64);
        assert!(g[..22].windows(2).all(|w| w[0] < w[1]));
        assert!(g.iter().all(|t| (0.0..1.0).contains(t)));
        assert_eq!(default_theta_grid().len(), 128);
        // deterministic across calls
        assert_eq!(theta_grid(8, 42, 3), g);
    }

    #[test]
    fn exponent_scan_slopes() {
        let delta = DeltaProvider;
        let grid = theta_grid(8, 42, 3);
        let ts: Vec<f64> = (8..=11).map(|k| (1u64 << k) as f64).collect();
        let rep = exponent_scan(&delta, &grid, &ts).unwrap();
        assert!(
            rep.slope > 0.3 && rep.slope < 0.7,
            "rank-2 slope {} ci {}",
            rep.slope,
            rep.ci
        );
        let one = ConstantProvider;
        let rep = exponent_scan(&one, &[0.0], &ts).unwrap();
        assert!(rep.slope > 0.9, "constant slope {}", rep.slope);
    }

    #[test]
    fn smoothing_kernel_closed_form_vs_quadrature() {
        let k = SmoothingKernel::new(4.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = k.x / 2.0;
        let b = a + k.lambda;
        for _ in 0..100 {
            let xi = rng.gen_range(-6.0..6.0);
            // split at the kinks of the trapezoid so each piece is smooth
            let mut numeric = Complex64::new(0.0, 0.0);
            for (lo, hi) in [(-b, -a), (-a, a), (a, b)] {
                numeric +=
                    quad::rule(16).integrate_complex(lo, hi, 32, |t| k.g(t) * e_of(-t * xi));
            }
            assert!(numeric.im.abs() < 1e-10);
            assert!(
                (numeric.re - k.g_hat(xi)).abs() < 1e-8,
                "xi={xi}: {} vs {}",
                numeric.re,
                k.g_hat(xi)
            );
        }
    }

    #[test]
    fn smoothing_kernel_dual_exact_at_lattice() {
        for x in [4.0, 16.0, 64.0] {
            let k = SmoothingKernel::new(x, 1.0).unwrap();
            let lim = (4.0 * x) as i64;
            for n in -lim..=lim {
                if n == 0 {
                    continue;
                }
                let v = k.dual_at(&FieldElement::from_ints(&[n]));
                let expect = if (n.abs() as f64) <= x / 2.0 { 1.0 } else { 0.0 };
                assert_eq!(v, expect, "X={x} n={n}");
            }
            let lim = (2.0 * x) as i64;
            for a in -lim..=lim {
                for b in [-lim, -1, 0, 1, lim] {
                    if a == 0 && b == 0 {
                        continue;
                    }
                    let v = k.dual_at(&FieldElement::from_ints(&[a, b]));
                    let inside = (a.abs() as f64) <= x / 2.0 && (b.abs() as f64) <= x / 2.0;
                    assert_eq!(v, if inside { 1.0 } else { 0.0 }, "X={x} ({a},{b})");
                }
            }
        }
    }

    #[test]
    fn smoothing_kernel_l1_growth() {
        let q = NumberField::rationals();
        let mut ratios = Vec::new();
        for x in [4.0, 16.0, 64.0, 256.0] {
            let k = SmoothingKernel::new(x, 1.0).unwrap();
            let l1 = k.h_l1(&q);
            assert!(l1.is_finite() && l1 > 0.0);
            ratios.push(l1 / x.ln());
        }
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0f64, f64::max);
        assert!(hi / lo < 3.0, "ratios {ratios:?}");
    }

    #[test]
    fn h_eval_reduces_to_g_hat_over_q() {
        let q = NumberField::rationals();
        let k = SmoothingKernel::new(4.0, 1.0).unwrap();
        for x in [0.0, 0.17, 1.3, 4.2] {
            let h = k.h_eval(&q, &[x]).unwrap();
            assert!((h - k.g_hat(x)).abs() < 1e-12);
        }
        let s2 = NumberField::sqrt2();
        let h0 = k.h_eval(&s2, &[0.0, 0.0]).unwrap();
        assert!(h0 > 0.0);
    }

    #[test]
    fn parseval_at_1024() {
        let delta = DeltaProvider;
        let t = 1024.0;
        let (avg, direct) = parseval_check(&delta, t, 4096).unwrap();
        assert!(
            (avg - direct).abs() / direct < 0.02,
            "avg {avg} vs direct {direct}"
        );
    }

    #[test]
    fn pipeline_rational_theta_is_exact() {
        let rep = pipeline_gl2(3.0 / 7.0, 100.0, 1e-4).unwrap();
        assert_eq!((rep.alpha, rep.beta), (3, 7));
        assert_eq!(rep.delta, 0.0);
        let resid = (rep.lhs - rep.rhs).norm();
        assert!(resid < 1e-4 + rep.tail, "resid {resid} tail {}", rep.tail);
    }

    #[test]
    fn pipeline_scaling_near_sqrt_t() {
        let theta = std::f64::consts::SQRT_2 - 1.0;
        let mut scaled = Vec::new();
        for t in [2500.0, 5000.0] {
            let rep = pipeline_gl2(theta, t, 5e-3).unwrap();
            assert!(rep.beta as f64 <= t.sqrt() + 1.0);
            assert!(rep.delta.abs() <= 1.0 / rep.beta as f64);
            scaled.push(rep.scaled);
            assert!(
                rep.scaled > 0.01 && rep.scaled < 100.0,
                "T={t}: scaled {}",
                rep.scaled
            );
        }
    }

    #[test]
    fn gl3_profile_weights_decay_in_divisor() {
        let w = WeightSpec::new(8.0, 2.0).unwrap();
        let f = TestFunction::new(w, 0.0);
        let inst = VoronoiInstance::new(3, 1, 6, f, 1e-2, 40.0).unwrap();
        let profile = gl3_divisor_profile(&inst, 64).unwrap();
        assert_eq!(profile.iter().map(|p| p.0).collect::<Vec<_>>(), vec![1, 2, 3, 6]);
        let s1 = profile[0].1;
        assert!(s1 > 0.0);
        for &(d, s) in &profile[1..] {
            assert!(s > 0.0);
            assert!(
                s <= 8.0 * s1 / (d as f64).sqrt(),
                "divisor {d}: {s} vs base {s1}"
            );
        }
    }
}
