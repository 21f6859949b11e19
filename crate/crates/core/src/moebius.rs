//! SL(2,R) acting by Möbius transformations on the upper half-plane and on
//! its boundary R ∪ {∞}, together with piecewise-projective homeomorphisms
//! of the boundary circle.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

const DET_TOLERANCE: f64 = 1e-12;
const CONTINUITY_TOLERANCE: f64 = 1e-9;
const POLE_THRESHOLD: f64 = 1e-300;

/// A point of the boundary circle R ∪ {∞}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

impl BoundaryPoint {
    pub fn finite(x: f64) -> Result<Self> {
        if x.is_finite() {
            Ok(BoundaryPoint::Finite(x))
        } else {
            Err(Error::NonFinite("boundary point"))
        }
    }

    pub fn as_finite(self) -> Option<f64> {
        match self {
            BoundaryPoint::Finite(x) => Some(x),
            BoundaryPoint::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, BoundaryPoint::Infinity)
    }

    /// Linear key cutting the circle at ∞: finite points in natural order,
    /// ∞ last.
    pub fn order_key(self) -> f64 {
        match self {
            BoundaryPoint::Finite(x) => x,
            BoundaryPoint::Infinity => f64::INFINITY,
        }
    }

    /// Equality up to a relative tolerance on finite points.
    pub fn approx_eq(self, other: BoundaryPoint, tol: f64) -> bool {
        match (self, other) {
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => true,
            (BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)) => {
                (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
            }
            _ => false,
        }
    }
}

impl From<f64> for BoundaryPoint {
    fn from(x: f64) -> Self {
        if x.is_finite() {
            BoundaryPoint::Finite(x)
        } else {
            BoundaryPoint::Infinity
        }
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Finite(x) => write!(f, "{x}"),
            BoundaryPoint::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for BoundaryPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" | "+inf" | "-inf" => Ok(BoundaryPoint::Infinity),
            other => {
                let x: f64 = other
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad boundary point '{s}'")))?;
                BoundaryPoint::finite(x)
            }
        }
    }
}

impl Serialize for BoundaryPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BoundaryPoint::Finite(x) => serializer.serialize_f64(*x),
            BoundaryPoint::Infinity => serializer.serialize_str("inf"),
        }
    }
}

/// A point of the upper half-plane, `im > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfPlanePoint {
    re: f64,
    im: f64,
}

impl HalfPlanePoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::NonFinite("half-plane point"));
        }
        if im <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "imaginary part must be positive, got {im}"
            )));
        }
        Ok(Self { re, im })
    }

    /// Base point `i`.
    pub const ORIGIN: HalfPlanePoint = HalfPlanePoint { re: 0.0, im: 1.0 };

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }
}

/// A real 2×2 matrix of determinant one, rows `(a b; c d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupElement {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// The inversion `z ↦ -1/z`.
    pub const INVERSION: GroupElement = GroupElement {
        a: 0.0,
        b: -1.0,
        c: 1.0,
        d: 0.0,
    };

    /// Builds an element from any matrix of positive determinant, rescaling
    /// it to determinant one.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("matrix entry"));
        }
        let det = a * d - b * c;
        if !(det > 0.0) {
            return Err(Error::NonPositiveDeterminant(det));
        }
        if (det - 1.0).abs() <= DET_TOLERANCE {
            return Ok(Self { a, b, c, d });
        }
        let s = det.sqrt();
        Ok(Self {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    /// `diag(e^s, e^{-s})`.
    pub fn diagonal(s: f64) -> Self {
        Self {
            a: s.exp(),
            b: 0.0,
            c: 0.0,
            d: (-s).exp(),
        }
    }

    /// Upper unitriangular `(1 u; 0 1)`, the translation `x ↦ x + u`.
    pub fn unipotent(u: f64) -> Self {
        Self {
            a: 1.0,
            b: u,
            c: 0.0,
            d: 1.0,
        }
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// The finite point sent to ∞, if any.
    pub fn pole(&self) -> Option<f64> {
        if self.c == 0.0 {
            None
        } else {
            Some(-self.d / self.c)
        }
    }

    pub fn apply(&self, p: BoundaryPoint) -> BoundaryPoint {
        match p {
            BoundaryPoint::Finite(x) => {
                let den = self.c * x + self.d;
                if den == 0.0 {
                    return BoundaryPoint::Infinity;
                }
                let y = (self.a * x + self.b) / den;
                if y.is_finite() {
                    BoundaryPoint::Finite(y)
                } else {
                    BoundaryPoint::Infinity
                }
            }
            BoundaryPoint::Infinity => {
                if self.c == 0.0 {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(self.a / self.c)
                }
            }
        }
    }

    pub fn apply_h(&self, z: HalfPlanePoint) -> Result<HalfPlanePoint> {
        let (x, y) = (z.re, z.im);
        let cr = self.c * x + self.d;
        let ci = self.c * y;
        let den2 = cr * cr + ci * ci;
        let re = ((self.a * x + self.b) * cr + self.a * self.c * y * y) / den2;
        let im = y / den2;
        if !(re.is_finite() && im.is_finite() && im > 0.0) {
            return Err(Error::DegenerateImage(den2));
        }
        Ok(HalfPlanePoint { re, im })
    }

    /// Derivative of the boundary action at a finite point: `1/(cx+d)^2`.
    pub fn boundary_derivative(&self, x: f64) -> Result<f64> {
        let den = self.c * x + self.d;
        if den.abs() <= POLE_THRESHOLD {
            return Err(Error::PoleAtPoint(x));
        }
        Ok(1.0 / (den * den))
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: GroupElement) -> GroupElement {
        GroupElement {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a, self.b, self.c, self.d)
    }
}

impl FromStr for GroupElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Parse(format!("bad group element '{s}'")))?;
        match parts.as_slice() {
            [a, b, c, d] => GroupElement::new(*a, *b, *c, *d),
            _ => Err(Error::Parse(format!("expected 'a,b,c,d', got '{s}'"))),
        }
    }
}

/// Rotation `k_ξ ∈ SO(2)` with `k_ξ·∞ = ξ`, angle `θ ∈ (0, π)` with
/// `ξ = cot θ`; the identity for `ξ = ∞`.
pub fn chamber_rotation(xi: BoundaryPoint) -> GroupElement {
    match xi {
        BoundaryPoint::Infinity => GroupElement::IDENTITY,
        BoundaryPoint::Finite(x) => {
            let r = x.hypot(1.0);
            let (cos, sin) = (x / r, 1.0 / r);
            GroupElement {
                a: cos,
                b: -sin,
                c: sin,
                d: cos,
            }
        }
    }
}

/// A map of the boundary circle with an orientation-preserving derivative,
/// as needed for equivariance-defect computations.
pub trait BoundaryMap {
    fn apply(&self, p: BoundaryPoint) -> BoundaryPoint;

    fn derivative(&self, x: f64) -> Result<f64>;

    fn inverse(&self) -> Self
    where
        Self: Sized;

    /// Finite points where the map has a pole or a breakpoint.
    fn singular_points(&self) -> Vec<f64>;

    /// `h(a + y) - h(a)` for finite `a`, evaluated without forming `h(a)`
    /// when possible so that tiny `y` keep full relative precision.
    /// Non-finite when either image is ∞.
    fn offset(&self, a: f64, y: f64) -> f64;
}

fn finite_or_inf(p: BoundaryPoint) -> f64 {
    p.as_finite().unwrap_or(f64::INFINITY)
}

impl BoundaryMap for GroupElement {
    fn apply(&self, p: BoundaryPoint) -> BoundaryPoint {
        GroupElement::apply(self, p)
    }

    fn derivative(&self, x: f64) -> Result<f64> {
        self.boundary_derivative(x)
    }

    fn inverse(&self) -> Self {
        GroupElement::inverse(self)
    }

    fn singular_points(&self) -> Vec<f64> {
        self.pole().into_iter().collect()
    }

    fn offset(&self, a: f64, y: f64) -> f64 {
        let (d0, d1) = (self.c * a + self.d, self.c * (a + y) + self.d);
        if d0 == 0.0 || d1 == 0.0 {
            return f64::INFINITY;
        }
        y / (d0 * d1)
    }
}

/// Piecewise-projective homeomorphism of R ∪ {∞}.
///
/// Piece `i` acts on the arc from breakpoint `i` (inclusive) to breakpoint
/// `i+1` (exclusive), the last piece wrapping through ∞ back to the first
/// breakpoint. Breakpoints are listed in increasing order with ∞ last.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseElement {
    pieces: Vec<(BoundaryPoint, GroupElement)>,
}

impl PiecewiseElement {
    pub fn new(pieces: Vec<(BoundaryPoint, GroupElement)>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidParameter("piecewise element needs a piece".into()));
        }
        for w in pieces.windows(2) {
            if !(w[0].0.order_key() < w[1].0.order_key()) {
                return Err(Error::InvalidParameter(format!(
                    "breakpoints must increase: {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        let n = pieces.len();
        for i in 0..n {
            let (_, g) = pieces[i];
            let (bp, h) = pieces[(i + 1) % n];
            if !g.apply(bp).approx_eq(h.apply(bp), CONTINUITY_TOLERANCE) {
                return Err(Error::Discontinuous(bp.to_string()));
            }
        }
        Ok(Self { pieces })
    }

    /// Single-piece element.
    pub fn projective(g: GroupElement) -> Self {
        Self {
            pieces: vec![(BoundaryPoint::Finite(0.0), g)],
        }
    }

    pub fn pieces(&self) -> &[(BoundaryPoint, GroupElement)] {
        &self.pieces
    }

    pub fn piece_at(&self, p: BoundaryPoint) -> &GroupElement {
        &self.pieces[self.piece_index(p)].1
    }

    fn piece_index(&self, p: BoundaryPoint) -> usize {
        let key = p.order_key();
        self.pieces
            .iter()
            .rposition(|(bp, _)| bp.order_key() <= key)
            .unwrap_or(self.pieces.len() - 1)
    }

    /// Whether `p` lies on the closed arc of piece `i`.
    fn in_closed_piece(&self, i: usize, p: BoundaryPoint) -> bool {
        self.piece_index(p) == i || self.pieces[(i + 1) % self.pieces.len()].0 == p
    }

    fn is_breakpoint(&self, x: f64) -> bool {
        self.pieces.iter().any(|(bp, _)| match bp {
            BoundaryPoint::Finite(b) => x == *b,
            BoundaryPoint::Infinity => false,
        })
    }
}

impl BoundaryMap for PiecewiseElement {
    fn apply(&self, p: BoundaryPoint) -> BoundaryPoint {
        self.piece_at(p).apply(p)
    }

    fn derivative(&self, x: f64) -> Result<f64> {
        if self.pieces.len() > 1 && self.is_breakpoint(x) {
            return Err(Error::BreakpointDerivative(x));
        }
        self.piece_at(BoundaryPoint::Finite(x)).boundary_derivative(x)
    }

    fn inverse(&self) -> Self {
        let mut pieces: Vec<_> = self.pieces.iter().map(|(bp, g)| (g.apply(*bp), g.inverse())).collect();
        pieces.sort_by(|a, b| a.0.order_key().total_cmp(&b.0.order_key()));
        // Images of breakpoints of a homeomorphism stay cyclically ordered,
        // so sorting only rotates the list.
        Self { pieces }
    }

    fn singular_points(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .pieces
            .iter()
            .filter_map(|(bp, g)| {
                let pole = g.pole();
                match (bp.as_finite(), pole) {
                    (Some(b), Some(p)) => Some(vec![b, p]),
                    (Some(b), None) => Some(vec![b]),
                    (None, Some(p)) => Some(vec![p]),
                    (None, None) => None,
                }
            })
            .flatten()
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    fn offset(&self, a: f64, y: f64) -> f64 {
        let (pa, pb) = (BoundaryPoint::Finite(a), BoundaryPoint::Finite(a + y));
        let i = self.piece_index(pb);
        if self.in_closed_piece(i, pa) {
            self.pieces[i].1.offset(a, y)
        } else {
            finite_or_inf(self.apply(pb)) - finite_or_inf(self.apply(pa))
        }
    }
}

impl FromStr for PiecewiseElement {
    type Err = Error;

    /// `"bp:a,b,c,d;bp:a,b,c,d;..."`, e.g. `"0:2,0,0,0.5;inf:1,0,0,1"`.
    fn from_str(s: &str) -> Result<Self> {
        let pieces = s
            .split(';')
            .filter(|p| !p.trim().is_empty())
            .map(|piece| {
                let (bp, g) = piece
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("bad piece '{piece}'")))?;
                Ok((bp.parse()?, g.parse()?))
            })
            .collect::<Result<Vec<_>>>()?;
        PiecewiseElement::new(pieces)
    }
}
