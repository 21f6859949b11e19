//! The approximate identity `M_t`.
//!
//! For a window `[u_lo, u_hi]` and `t > 0`,
//!
//! ```text
//! M_t(x) = 1/(C t) ∫_{e^{-t}}^1 ∫_{u_lo}^{u_hi} du dv / (v^2 + (u v - x)^2),   C = π (u_hi - u_lo).
//! ```
//!
//! Doing the `u` integral and substituting `s = x/v` gives
//! `M_t(x) = (D(e^t x) - D(x)) / (C t x)` with `D(y) = ∫_0^y ψ` and
//! `ψ(s) = atan(s - u_lo) - atan(s - u_hi)`. [`KernelSpec::density`] evaluates
//! this without cancellation in every regime.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Cauchy, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::domains::{check_t, Window};
use crate::error::{Error, Result};
use crate::moebius::{BoundaryMap, BoundaryPoint};
use crate::montecarlo::{chunk_rng, map_chunks};
use crate::quadrature::{gauss_legendre_20, integrate, integrate_line, LineOptions, QuadOptions};

/// Distance past the window beyond which `∫_r^∞ ψ` is summed as a series.
const TAIL_OFFSET: f64 = 8.0;
const TAIL_TERMS: usize = 12;

/// `x·atan(x) - ½·log(1 + x²)`, an even antiderivative of `atan`.
pub fn aux_a(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 0.1 {
        let x2 = x * x;
        let mut term = x2;
        let mut sum = 0.0;
        for k in 0..10 {
            let k = k as f64;
            sum += term / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
            term *= -x2;
        }
        sum
    } else if ax > 1e8 {
        ax * ax.atan() - ax.ln() - 0.5 * (1.0 / (ax * ax)).ln_1p()
    } else {
        ax * ax.atan() - 0.5 * (ax * ax).ln_1p()
    }
}

fn gl_mean<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gauss_legendre_20();
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    0.5 * nodes
        .iter()
        .zip(weights)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
}

/// `ψ` and its integrals on the half-line `s ≥ 0` for a window `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
struct HalfLine {
    lo: f64,
    hi: f64,
    big: f64,
    /// `D(big) + T(big)`, i.e. `∫_0^∞ ψ`.
    d_inf: f64,
}

impl HalfLine {
    fn new(lo: f64, hi: f64) -> Self {
        let big = TAIL_OFFSET + lo.abs().max(hi.abs());
        let mut h = Self {
            lo,
            hi,
            big,
            d_inf: 0.0,
        };
        h.d_inf = h.d_mid(big) + h.tail(big);
        h
    }

    fn psi(&self, s: f64) -> f64 {
        (s - self.lo).atan() - (s - self.hi).atan()
    }

    fn d_mid(&self, r: f64) -> f64 {
        aux_a(r - self.lo) - aux_a(r - self.hi) - aux_a(self.lo) + aux_a(self.hi)
    }

    /// `∫_r^∞ ψ` for `r ≥ big`, from `atan(1/y)` expanded in `1/y`.
    fn tail(&self, r: f64) -> f64 {
        let p = r - self.hi;
        let q = r - self.lo;
        let mut sum = ((self.hi - self.lo) / p).ln_1p();
        let (ip2, iq2) = (1.0 / (p * p), 1.0 / (q * q));
        let (mut pp, mut qq) = (ip2, iq2);
        for k in 1..=TAIL_TERMS {
            let k2 = 2.0 * k as f64;
            let c = if k % 2 == 0 { 1.0 } else { -1.0 } / (k2 * (k2 + 1.0));
            sum += c * (pp - qq);
            pp *= ip2;
            qq *= iq2;
        }
        sum
    }

    /// `∫_0^r ψ` for `r ≥ 0`.
    fn d(&self, r: f64) -> f64 {
        if r <= 1.0 {
            r * gl_mean(|s| self.psi(s), 0.0, r)
        } else if r <= self.big {
            self.d_mid(r)
        } else {
            self.d_inf - self.tail(r)
        }
    }
}

/// Truncation parameter and window of `M_t`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KernelSpec {
    pub t: f64,
    pub window: Window,
    #[serde(skip)]
    pos: HalfLine,
    #[serde(skip)]
    neg: HalfLine,
}

impl PartialEq for KernelSpec {
    fn eq(&self, other: &Self) -> bool {
        self.t == other.t && self.window == other.window
    }
}

impl KernelSpec {
    pub fn new(t: f64, window: Window) -> Result<Self> {
        check_t(t)?;
        let (lo, hi) = (window.lo(), window.hi());
        Ok(Self {
            t,
            window,
            pos: HalfLine::new(lo, hi),
            neg: HalfLine::new(-hi, -lo),
        })
    }

    /// Normalising constant `C = π (u_hi - u_lo)`.
    pub fn normalisation(&self) -> f64 {
        PI * self.window.width()
    }

    fn psi(&self, s: f64) -> f64 {
        self.pos.psi(s)
    }

    /// `D(y) = ∫_0^y ψ`.
    fn d(&self, y: f64) -> f64 {
        if y >= 0.0 {
            self.pos.d(y)
        } else {
            -self.neg.d(-y)
        }
    }

    /// `A(y - u_lo) - A(y - u_hi)`, the `u`-integral of `atan(y - u)`.
    fn d_full(&self, y: f64) -> f64 {
        self.d(y) + aux_a(self.window.lo()) - aux_a(self.window.hi())
    }

    /// `M_t(x)`.
    pub fn density(&self, x: f64) -> f64 {
        let x = if self.window.is_symmetric() { x.abs() } else { x };
        let ax = x.abs();
        let ct = self.normalisation() * self.t;
        let side = self.side(x);
        let value = if ax >= side.big {
            let far = ax * self.t.exp();
            (side.tail(ax) - side.tail(far)) / (ct * ax)
        } else if self.t.exp_m1() * ax <= 1.0 {
            let y = x * self.t.exp();
            self.t.exp_m1() * gl_mean(|s| self.psi(s), x, y) / ct
        } else {
            let y = x * self.t.exp();
            (self.d(y) - self.d(x)) / (x * ct)
        };
        value.max(0.0)
    }

    fn side(&self, x: f64) -> &HalfLine {
        if x >= 0.0 {
            &self.pos
        } else {
            &self.neg
        }
    }

    /// One draw from `M_t`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u = self.window.lerp(rng.gen::<f64>());
        let v = (-self.t * rng.gen::<f64>()).exp();
        let c: f64 = Cauchy::new(0.0, 1.0).expect("unit Cauchy").sample(rng);
        v * (u + c)
    }

    /// Options for integrals of `M_t` against bounded functions over R.
    pub fn line_options(&self, abs_tol: f64) -> LineOptions {
        LineOptions {
            min_scale: (-self.t).exp() * 1e-12,
            max_scale: 1e13,
            log_chunk: 2.0,
            quad: QuadOptions {
                abs_tol,
                rel_tol: 0.0,
                max_subdivisions: 20_000,
            },
        }
    }

    /// Leading tail `∫_{|x| > X} M_t ≈ 2 (1 - e^{-t}) / (π t X)`.
    pub fn tail_mass(&self, cutoff: f64) -> f64 {
        2.0 * (-(-self.t).exp_m1()) / (PI * self.t * cutoff)
    }
}

/// `M_t(x)` for the window `[-1, 1]`.
pub fn kernel_closed_form(t: f64, x: f64) -> Result<f64> {
    Ok(KernelSpec::new(t, Window::SYMMETRIC)?.density(x))
}

/// Double integral defining `M_t`, with the `v` range given explicitly:
/// `1/(C t) ∫_{v_lo}^{v_hi} ∫_window du dv / (v² + (uv - x)²)`.
pub fn kernel_quadrature_v(spec: &KernelSpec, v_lo: f64, v_hi: f64, x: f64) -> Result<f64> {
    if !(v_lo > 0.0 && v_lo < v_hi && v_hi.is_finite()) {
        return Err(Error::InvalidParameter(format!("bad v range [{v_lo}, {v_hi}]")));
    }
    let (lo, hi) = (spec.window.lo(), spec.window.hi());
    let inner_opts = QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-12,
        max_subdivisions: 2000,
    };
    let inner_err = std::cell::Cell::new(0.0f64);
    let outer = |w: f64| {
        let v = w.exp();
        let peak = (x / v).clamp(lo, hi);
        let r = integrate(
            |u: f64| 1.0 / (v * v + (u * v - x).powi(2)),
            &[lo, peak, hi],
            inner_opts,
        );
        inner_err.set(inner_err.get().max(r.error * v));
        r.value * v
    };
    let (w0, w1) = (v_lo.ln(), v_hi.ln());
    let mut breaks: Vec<f64> = (0..=((w1 - w0) * 4.0).ceil() as usize)
        .map(|i| (w0 + 0.25 * i as f64).min(w1))
        .collect();
    breaks.push(w1);
    // Where x/v crosses a window edge the inner integrand changes shape.
    for edge in [lo, hi] {
        if edge != 0.0 && x / edge > 0.0 {
            let w = (x / edge).ln();
            if w > w0 && w < w1 {
                breaks.push(w);
            }
        }
    }
    let r = integrate(
        outer,
        &breaks,
        QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_subdivisions: 5000,
        },
    );
    let scale = 1.0 / (spec.normalisation() * spec.t);
    let err = (r.error + inner_err.get() * (w1 - w0)) * scale;
    if err > 1e-10 || !r.value.is_finite() {
        return Err(Error::QuadratureNotConverged {
            estimate: err,
            limit: 1e-10,
        });
    }
    Ok((r.value * scale).max(0.0))
}

/// `M_t(x)` by nested adaptive quadrature of its defining double integral.
pub fn kernel_quadrature(spec: &KernelSpec, x: f64) -> Result<f64> {
    kernel_quadrature_v(spec, (-spec.t).exp(), 1.0, x)
}

/// `∫ M_t` over R.
pub fn kernel_mass(spec: &KernelSpec) -> Result<f64> {
    let opts = spec.line_options(1e-11);
    let mut points = vec![0.0];
    points.extend([spec.window.lo(), spec.window.hi()]);
    let r = integrate_line(|x| spec.density(x), &points, opts);
    // The outermost points sit within 1e13 + |u| of the cutoff; the
    // difference is far below the tail itself.
    Ok(r.require(1e-9)? + spec.tail_mass(opts.max_scale))
}

/// Fourier transform of `M_t` for the window `[-1, 1]`:
/// `(1/t) ∫_{e^{-t}|ω|}^{|ω|} e^{-s} sin(s) / s² ds`.
pub fn kernel_fourier(t: f64, omega: f64) -> Result<f64> {
    check_t(t)?;
    if omega == 0.0 {
        return Ok(1.0);
    }
    let w1 = omega.abs().ln();
    let w0 = w1 - t;
    // s = e^w; the integrand becomes e^{-s} sin(s)/s.
    let f = |w: f64| {
        let s = w.exp();
        if s < 1e-8 {
            (1.0 - s) * (1.0 - s * s / 6.0)
        } else {
            (-s).exp() * s.sin() / s
        }
    };
    let n = (t.ceil() as usize).max(1);
    let breaks: Vec<f64> = (0..=n).map(|i| w0 + t * i as f64 / n as f64).collect();
    let r = integrate(
        f,
        &breaks,
        QuadOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            max_subdivisions: 5000,
        },
    );
    Ok((r.require(1e-9)? / t).clamp(-1.0, 1.0))
}

/// `n` exact draws from `M_t`: `u` uniform on the window, `log v` uniform
/// on `[-t, 0]`, `x = v·(u + c)` with `c` standard Cauchy.
pub fn kernel_sample(spec: &KernelSpec, seed: u64, n: usize) -> Vec<f64> {
    map_chunks(n, |chunk, len| {
        let mut rng = chunk_rng(seed, chunk, 0);
        (0..len).map(|_| spec.draw(&mut rng)).collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// `P(X ≤ x)` for `X ~ M_t`, as a quadrature over `log v` of the
/// window-averaged Cauchy distribution function.
pub fn kernel_cdf(spec: &KernelSpec, x: f64) -> Result<f64> {
    let width = spec.window.width();
    let f = |w: f64| spec.d_full(x * (-w).exp());
    let n = (spec.t.ceil() as usize).max(1);
    let breaks: Vec<f64> = (0..=n).map(|i| -spec.t + spec.t * i as f64 / n as f64).collect();
    let r = integrate(
        f,
        &breaks,
        QuadOptions {
            abs_tol: 1e-11,
            rel_tol: 1e-13,
            max_subdivisions: 2000,
        },
    );
    let integral = r.require(1e-8)?;
    Ok((0.5 + integral / (PI * width * spec.t)).clamp(0.0, 1.0))
}

/// Kolmogorov–Smirnov distance between `samples` and the law `M_t`.
pub fn ks_distance(spec: &KernelSpec, samples: &[f64]) -> Result<f64> {
    let mut xs = samples.to_vec();
    xs.par_sort_unstable_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = kernel_cdf(spec, x)?;
            Ok((f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs()))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// `∫ |M_t(x - g·ξ) - (g⁻¹)'(x)·M_t(g⁻¹·x - ξ)| dx`.
///
/// Integrated in `y = x - g·ξ`, with `g⁻¹(g·ξ + y) - ξ` taken from
/// [`BoundaryMap::offset`]: for large `t` the kernel is far narrower than
/// the float spacing at `g·ξ`.
pub fn equivariance_defect<M: BoundaryMap>(g: &M, xi: BoundaryPoint, spec: &KernelSpec) -> Result<f64> {
    let (BoundaryPoint::Finite(_), BoundaryPoint::Finite(gx0)) = (xi, g.apply(xi)) else {
        return Err(Error::InvalidParameter("defect needs ξ and g·ξ finite".into()));
    };
    let ginv = g.inverse();
    let f = |y: f64| {
        let direct = spec.density(y);
        let shift = ginv.offset(gx0, y);
        let pulled = match ginv.derivative(gx0 + y) {
            Ok(jac) if shift.is_finite() => jac * spec.density(shift),
            _ => 0.0,
        };
        (direct - pulled).abs()
    };
    let mut points = vec![0.0];
    points.extend(ginv.singular_points().into_iter().map(|s| s - gx0));
    let r = integrate_line(f, &points, spec.line_options(1e-10));
    Ok(r.require(1e-7)?.clamp(0.0, 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::{GroupElement, PiecewiseElement};
    use proptest::prelude::*;

    fn spec(t: f64, lo: f64, hi: f64) -> KernelSpec {
        KernelSpec::new(t, Window::new(lo, hi).unwrap()).unwrap()
    }

    #[test]
    fn aux_a_values() {
        assert_eq!(aux_a(0.0), 0.0);
        let a1 = PI / 4.0 - 0.5 * 2f64.ln();
        assert!((aux_a(1.0) - a1).abs() < 1e-15);
        assert_eq!(aux_a(-1.0), aux_a(1.0));
        for x in [0.05, 0.0999, 0.1001, 3.0, 1e7, 2e8] {
            let direct = x * f64::atan(x) - 0.5 * (1.0 + x * x).ln();
            assert!((aux_a(x) - direct).abs() <= 1e-13 * direct.abs(), "{x}");
        }
    }

    #[test]
    fn value_at_zero() {
        let m = kernel_closed_form(1.0, 0.0).unwrap();
        assert!((m - (1f64.exp() - 1.0) / 4.0).abs() < 1e-14);
        let q = kernel_quadrature(&spec(1.0, -1.0, 1.0), 0.0).unwrap();
        assert!((q - (1f64.exp() - 1.0) / 4.0).abs() < 1e-10);
    }

    #[test]
    fn closed_form_matches_literal_formula() {
        // (F(e^t x) - F(x)) / (2π t x), F(y) = A(1+y) - A(1-y), where it is well conditioned.
        let lit = |t: f64, x: f64| {
            let f = |y: f64| aux_a(1.0 + y) - aux_a(1.0 - y);
            (f(t.exp() * x) - f(x)) / (2.0 * PI * t * x)
        };
        for t in [0.5, 1.0, 3.0] {
            for x in [0.01, 0.3, -0.7, 2.0, 5.0] {
                let m = kernel_closed_form(t, x).unwrap();
                assert!((m - lit(t, x)).abs() < 1e-11, "t={t} x={x}: {m} vs {}", lit(t, x));
            }
        }
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for (t, lo, hi) in [(1.0, -1.0, 1.0), (2.0, -1.0, 1.0), (5.0, 0.0, 1.0), (3.0, -0.3, 2.0)] {
            let k = spec(t, lo, hi);
            for x in [
                -20.0, -9.5, -3.0, -0.4, -1e-7, 0.0, 1e-5, 0.5, 1.7, 8.9, 15.0, 40.0, 1e4,
            ] {
                let q = kernel_quadrature(&k, x).unwrap();
                assert!(
                    (k.density(x) - q).abs() <= 1e-9,
                    "t={t} [{lo},{hi}] x={x}: {} vs {q}",
                    k.density(x)
                );
            }
        }
    }

    #[test]
    fn branches_join_continuously() {
        for (lo, hi) in [(-1.0, 1.0), (0.0, 1.0), (-0.3, 2.0)] {
            let k = spec(2.0, lo, hi);
            for edge in [k.pos.big, -k.neg.big, 1.0 / 2f64.exp_m1(), -1.0 / 2f64.exp_m1()] {
                let (a, b) = (k.density(edge * (1.0 - 1e-12)), k.density(edge * (1.0 + 1e-12)));
                assert!((a - b).abs() < 1e-10 * a, "{edge}: {a} {b}");
            }
        }
    }

    #[test]
    fn mass_is_one() {
        for t in [0.5, 1.0, 5.0, 20.0] {
            for (lo, hi) in [(-1.0, 1.0), (0.0, 1.0), (-0.3, 2.0)] {
                let m = kernel_mass(&spec(t, lo, hi)).unwrap();
                assert!((m - 1.0).abs() < 1e-8, "t={t} [{lo},{hi}]: {m}");
            }
        }
    }

    #[test]
    fn fourier_examples() {
        assert_eq!(kernel_fourier(3.0, 0.0).unwrap(), 1.0);
        assert!(kernel_fourier(1.0, 1e3).unwrap().abs() <= 0.01);
        assert!((kernel_fourier(2.0, 1e-9).unwrap() - 1.0).abs() < 1e-6);
    }

    /// `∫ M_t(x) cos(ωx) dx` on `[-X, X]` with the `1/x²` tail added back by
    /// two integrations by parts.
    fn cosine_transform(t: f64, omega: f64) -> f64 {
        let k = spec(t, -1.0, 1.0);
        let big_x = 2000.0;
        let mut breaks: Vec<f64> = (0..=40)
            .map(|i| 1e-8 * 10f64.powf(i as f64 / 5.0))
            .filter(|&b| b < 1.0)
            .collect();
        breaks.insert(0, 0.0);
        let step = PI / omega;
        let mut b = 1.0;
        while b < big_x {
            breaks.push(b);
            b += step;
        }
        breaks.push(big_x);
        let opts = QuadOptions {
            abs_tol: 1e-13,
            rel_tol: 0.0,
            max_subdivisions: 100_000,
        };
        let body = 2.0 * integrate(|x| k.density(x) * (omega * x).cos(), &breaks, opts).value;
        let c = 2.0 * (-(-t).exp_m1()) / (PI * t);
        let (wx, x2) = (omega * big_x, big_x * big_x);
        body + c * (-wx.sin() / (omega * x2) + 2.0 * wx.cos() / (omega * omega * x2 * big_x))
    }

    #[test]
    fn fourier_matches_cosine_transform() {
        for t in [1.0, 4.0] {
            for omega in [0.3, 1.0, 5.0] {
                let a = kernel_fourier(t, omega).unwrap();
                let b = cosine_transform(t, omega);
                assert!((a - b).abs() <= 1e-6, "t={t} ω={omega}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn scaling_law() {
        let k = spec(3.0, -0.3, 2.0);
        for a in [0.5f64, 2.0, 3.7] {
            let a2 = a * a;
            for x in [-2.0, 0.1, 1.3] {
                let lhs = a2 * k.density(a2 * x);
                let rhs = kernel_quadrature_v(&k, (-k.t).exp() / a2, 1.0 / a2, x).unwrap();
                assert!((lhs - rhs).abs() <= 1e-8, "a={a} x={x}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn sampler_reproducible_and_symmetric() {
        let k = spec(2.0, -1.0, 1.0);
        let a = kernel_sample(&k, 5, 10);
        assert_eq!(a.len(), 10);
        assert_eq!(a, kernel_sample(&k, 5, 10));
        let n = 1_000_000;
        let s = kernel_sample(&k, 6, n);
        let p = s.iter().filter(|&&x| x > 0.0).count() as f64 / n as f64;
        assert!((p - 0.5).abs() <= 3.0 * (0.25 / n as f64).sqrt());
    }

    #[test]
    fn sampler_sign_mean_asymmetric_window() {
        let k = spec(3.0, 0.0, 1.0);
        let n = 1_000_000;
        let s = kernel_sample(&k, 8, n);
        let m: f64 = s.iter().map(|x| x.signum()).sum::<f64>() / n as f64;
        let exact = 0.5 - 2f64.ln() / PI;
        let se = ((1.0 - m * m) / n as f64).sqrt();
        assert!((m - exact).abs() <= 3.0 * se, "{m} vs {exact}");
    }

    #[test]
    fn cdf_matches_integrated_density() {
        let k = spec(2.0, -0.3, 2.0);
        for x in [-3.0, 0.0, 0.4, 6.0] {
            let mut pts = vec![x, 0.0];
            pts.dedup();
            let opts = k.line_options(1e-12);
            let below = integrate_line(|y| if y <= x { k.density(y) } else { 0.0 }, &pts, opts).value
                + 0.5 * k.tail_mass(opts.max_scale);
            assert!((kernel_cdf(&k, x).unwrap() - below).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn sampler_ks() {
        let k = spec(1.5, 0.0, 1.0);
        let s = kernel_sample(&k, 99, 200_000);
        assert!(ks_distance(&k, &s).unwrap() <= 0.005);
    }

    #[test]
    fn defects() {
        let k = spec(16.0, -1.0, 1.0);
        let zero = BoundaryPoint::Finite(0.0);
        assert!(equivariance_defect(&GroupElement::IDENTITY, zero, &k).unwrap() < 1e-12);
        let tr = GroupElement::unipotent(0.75);
        assert!(equivariance_defect(&tr, BoundaryPoint::Finite(0.3), &k).unwrap() <= 1e-9);
        let dil = GroupElement::new(2.0, 0.0, 0.0, 0.5).unwrap();
        let d = equivariance_defect(&dil, zero, &k).unwrap();
        assert!(d <= 4.0 * 2f64.ln() / 16.0 + 1e-6 && d > 0.05, "{d}");
        let pw = PiecewiseElement::new(vec![(zero, dil), (BoundaryPoint::Infinity, GroupElement::IDENTITY)]);
        let dp = equivariance_defect(&pw.unwrap(), zero, &k).unwrap();
        assert!(dp <= d + 1e-9, "{dp} vs {d}");
        assert!(equivariance_defect(&GroupElement::INVERSION, zero, &k).is_err());
    }

    #[test]
    fn dilation_defect_halves() {
        let dil = GroupElement::new(2.0, 0.0, 0.0, 0.5).unwrap();
        let d = |t: f64| equivariance_defect(&dil, BoundaryPoint::Finite(0.0), &spec(t, -1.0, 1.0)).unwrap();
        let (d8, d16) = (d(8.0), d(16.0));
        assert!((1.5..=2.5).contains(&(d8 / d16)));
    }

    #[test]
    fn one_sided_dilation_defect_at_large_t() {
        // Kernel width e^{-64} sits far inside any fixed breakpoint slack.
        let zero = BoundaryPoint::Finite(0.0);
        let dil = GroupElement::new(2.0, 0.0, 0.0, 0.5).unwrap();
        let pw = PiecewiseElement::new(vec![(zero, dil), (BoundaryPoint::Infinity, GroupElement::IDENTITY)]).unwrap();
        let k = spec(64.0, -1.0, 1.0);
        let (d, dp) = (
            equivariance_defect(&dil, zero, &k).unwrap(),
            equivariance_defect(&pw, zero, &k).unwrap(),
        );
        assert!((dp - d / 2.0).abs() <= 1e-8, "{dp} vs {d}");
    }

    proptest! {
        #[test]
        fn density_positive_and_even(t in 0.1f64..30.0, x in -50.0f64..50.0) {
            let k = spec(t, -1.0, 1.0);
            prop_assert!(k.density(x) >= 0.0);
            prop_assert!((k.density(x) - k.density(-x)).abs() <= 1e-10);
        }

        #[test]
        fn density_bounded_by_tail_estimate(t in 0.5f64..30.0, x in 2.0f64..1e6) {
            let k = spec(t, -1.0, 1.0);
            prop_assert!(k.density(x) <= 4.0 / (PI * t * x * x) * (1.0 + 1e-12));
        }
    }
}
