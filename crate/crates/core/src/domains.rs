//! Truncated cone domains in the upper half-plane and their Følner overlaps.
//!
//! `U_t = { e^{2s}(u + i) : s ∈ [0, t], u ∈ D }` with `D` a window, and
//! `V_t^ξ = k_ξ·U_t` for the rotation `k_ξ` carrying ∞ to `ξ`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moebius::{chamber_rotation, BoundaryPoint, GroupElement, HalfPlanePoint};
use crate::montecarlo::{chunk_rng, map_chunks};

/// Relative slack used by membership tests so that boundary points of the
/// parametrization are not lost to rounding.
const MEMBERSHIP_SLACK: f64 = 1e-12;

pub const MIN_FOLNER_SAMPLES: usize = 10_000;

/// Compact interval `[u_lo, u_hi]` of horocyclic offsets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    u_lo: f64,
    u_hi: f64,
}

impl Window {
    pub fn new(u_lo: f64, u_hi: f64) -> Result<Self> {
        if !(u_lo.is_finite() && u_hi.is_finite() && u_lo < u_hi) {
            return Err(Error::InvalidWindow(u_lo, u_hi));
        }
        Ok(Self { u_lo, u_hi })
    }

    /// `[-1, 1]`.
    pub const SYMMETRIC: Window = Window { u_lo: -1.0, u_hi: 1.0 };

    pub fn lo(&self) -> f64 {
        self.u_lo
    }

    pub fn hi(&self) -> f64 {
        self.u_hi
    }

    pub fn width(&self) -> f64 {
        self.u_hi - self.u_lo
    }

    pub fn is_symmetric(&self) -> bool {
        self.u_lo == -self.u_hi
    }

    pub fn contains(&self, u: f64) -> bool {
        let slack = MEMBERSHIP_SLACK * self.u_lo.abs().max(self.u_hi.abs()).max(1.0);
        u >= self.u_lo - slack && u <= self.u_hi + slack
    }

    /// Point `u_lo + w·(u_hi - u_lo)` for `w ∈ [0, 1]`.
    pub fn lerp(&self, w: f64) -> f64 {
        self.u_lo + w * self.width()
    }
}

impl Default for Window {
    fn default() -> Self {
        Self::SYMMETRIC
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.u_lo, self.u_hi)
    }
}

impl FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        match parts.as_slice() {
            [a, b] => {
                let parse = |v: &str| v.parse::<f64>().map_err(|_| Error::Parse(format!("bad window '{s}'")));
                Window::new(parse(a)?, parse(b)?)
            }
            _ => Err(Error::Parse(format!("expected 'lo,hi', got '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DomainSpec {
    pub t: f64,
    pub window: Window,
    pub xi: BoundaryPoint,
}

impl DomainSpec {
    pub fn new(t: f64, window: Window, xi: BoundaryPoint) -> Result<Self> {
        check_t(t)?;
        Ok(Self { t, window, xi })
    }
}

pub(crate) fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("t must be positive, got {t}")))
    }
}

/// `e^{2s}(u + i)`.
pub fn cone_point(s: f64, u: f64) -> HalfPlanePoint {
    let h = (2.0 * s).exp();
    HalfPlanePoint::new(h * u, h).expect("cone point lies in the half-plane")
}

/// Uniform draw of `(s, u)` on `[0, t] × window`, mapped to the cone.
pub fn sample_cone<R: Rng>(rng: &mut R, t: f64, window: Window) -> HalfPlanePoint {
    let s = t * rng.gen::<f64>();
    let u = window.lerp(rng.gen::<f64>());
    cone_point(s, u)
}

fn in_base_cone(z: HalfPlanePoint, t: f64, window: Window) -> bool {
    let top = (2.0 * t).exp();
    let im = z.im();
    im >= 1.0 - MEMBERSHIP_SLACK && im <= top * (1.0 + MEMBERSHIP_SLACK) && window.contains(z.re() / im)
}

pub fn in_domain(z: HalfPlanePoint, spec: &DomainSpec) -> bool {
    match spec.xi {
        BoundaryPoint::Infinity => in_base_cone(z, spec.t, spec.window),
        xi => match chamber_rotation(xi).inverse().apply_h(z) {
            Ok(w) => in_base_cone(w, spec.t, spec.window),
            Err(_) => false,
        },
    }
}

/// Hyperbolic area of `U_t`, `2t·(u_hi - u_lo)`.
pub fn hyperbolic_area(t: f64, window: Window) -> f64 {
    2.0 * t * window.width()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FolnerEstimate {
    pub ratio: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Monte Carlo estimate of `|g·U_t ∩ U_t| / |U_t|`.
pub fn folner_ratio(g: &GroupElement, t: f64, window: Window, samples: usize, seed: u64) -> Result<FolnerEstimate> {
    check_t(t)?;
    if samples < MIN_FOLNER_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_FOLNER_SAMPLES} samples, got {samples}"
        )));
    }
    let hits: u64 = map_chunks(samples, |c, len| {
        let mut rng = chunk_rng(seed, c, 0);
        (0..len)
            .filter(|_| {
                let z = sample_cone(&mut rng, t, window);
                g.apply_h(z).map(|w| in_base_cone(w, t, window)).unwrap_or(false)
            })
            .count() as u64
    })
    .into_iter()
    .sum();
    let n = samples as f64;
    let p = hits as f64 / n;
    Ok(FolnerEstimate {
        ratio: p,
        std_error: (p * (1.0 - p) / n).sqrt(),
        samples,
    })
}
