//! Adaptive Gauss–Kronrod (7/15) quadrature with global error control, plus a
//! real-line integrator resolving multiscale structure around split points
//! through the substitution `x = p ± e^w`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
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

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_subdivisions: 5000,
        }
    }
}

impl QuadOptions {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

impl QuadResult {
    pub const ZERO: QuadResult = QuadResult {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };

    /// Value if the error estimate is within `limit`.
    pub fn require(self, limit: f64) -> Result<f64> {
        if self.error.is_finite() && self.error <= limit && self.value.is_finite() {
            Ok(self.value)
        } else {
            Err(Error::QuadratureNotConverged {
                estimate: self.error,
                limit,
            })
        }
    }
}

/// Sums values, error estimates and evaluation counts.
impl std::ops::Add for QuadResult {
    type Output = QuadResult;

    fn add(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            error: self.error + other.error,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

/// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let h = half.abs();
    let err = rescale_error((res_k - res_g) * half, res_abs * h, res_asc * h);
    (res_k * half, err)
}

/// Globally adaptive integration over `[breaks[0], breaks[last]]`, the
/// breakpoints forming the initial partition.
pub fn integrate<F: Fn(f64) -> f64>(f: F, breaks: &[f64], opts: QuadOptions) -> QuadResult {
    let mut pts: Vec<f64> = breaks.to_vec();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if pts.len() < 2 {
        return QuadResult::ZERO;
    }
    let mut heap = BinaryHeap::new();
    let mut done = Vec::new();
    let mut evaluations = 0;
    for w in pts.windows(2) {
        let (value, error) = gk15(&f, w[0], w[1]);
        evaluations += 15;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }
    let mut subdivisions = 0;
    let mut total: f64 = heap.iter().map(|p| p.value).sum();
    let mut err: f64 = heap.iter().map(|p| p.error).sum();
    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        if err <= tol || subdivisions >= opts.max_subdivisions {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        // Panels that can no longer be split in floating point are frozen.
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 1e-14 * worst.a.abs().max(worst.b.abs()) {
            done.push(worst);
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        evaluations += 30;
        subdivisions += 1;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    let (value, error) = heap
        .iter()
        .chain(done.iter())
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    QuadResult {
        value,
        error,
        evaluations,
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Cached 20-point Gauss–Legendre rule.
pub fn gauss_legendre_20() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}

/// Options for [`integrate_line`].
#[derive(Debug, Clone, Copy)]
pub struct LineOptions {
    /// Distance from each split point below which the integrand is ignored.
    pub min_scale: f64,
    /// Distance beyond the outermost split points at which tails are cut.
    pub max_scale: f64,
    /// Width, in `log` units, of the initial panels.
    pub log_chunk: f64,
    pub quad: QuadOptions,
}

impl Default for LineOptions {
    fn default() -> Self {
        Self {
            min_scale: 1e-14,
            max_scale: 1e13,
            log_chunk: 2.0,
            quad: QuadOptions::default(),
        }
    }
}

fn log_breaks(w0: f64, w1: f64, chunk: f64) -> Vec<f64> {
    let n = (((w1 - w0) / chunk).ceil() as usize).max(1);
    (0..=n).map(|i| w0 + (w1 - w0) * i as f64 / n as f64).collect()
}

/// Integral of `f` over the real line, split at `points`.
///
/// Each gap between consecutive points is halved, and each half is
/// integrated in the variable `w = log|x - p|` where `p` is the nearer
/// endpoint, so structure at every scale between `min_scale` and the gap
/// width is resolved. The two unbounded tails use the same substitution up
/// to `max_scale`.
pub fn integrate_line<F: Fn(f64) -> f64>(f: F, points: &[f64], opts: LineOptions) -> QuadResult {
    let mut pts: Vec<f64> = points.iter().copied().filter(|p| p.is_finite()).collect();
    if pts.is_empty() {
        pts.push(0.0);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let w_min = opts.min_scale.ln();
    let w_max = opts.max_scale.ln();
    let pieces = 2 * pts.len();
    let quad = QuadOptions {
        abs_tol: opts.quad.abs_tol / pieces as f64,
        ..opts.quad
    };

    let half_line = |p: f64, dir: f64, w_hi: f64| -> QuadResult {
        if w_hi <= w_min {
            return QuadResult::ZERO;
        }
        let g = |w: f64| {
            let e = w.exp();
            f(p + dir * e) * e
        };
        integrate(g, &log_breaks(w_min, w_hi, opts.log_chunk), quad)
    };

    let mut total = half_line(pts[0], -1.0, w_max);
    for gap in pts.windows(2) {
        let (a, b) = (gap[0], gap[1]);
        let half = 0.5 * (b - a);
        if half <= opts.min_scale {
            total = total + integrate(&f, &[a, b], quad);
            continue;
        }
        let w_hi = half.ln();
        total = total + half_line(a, 1.0, w_hi) + half_line(b, -1.0, w_hi);
    }
    total + half_line(*pts.last().unwrap(), 1.0, w_max)
}
