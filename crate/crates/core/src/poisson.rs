//! Bounded boundary functions, the half-plane Poisson kernel and the
//! Poisson transform.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::moebius::{BoundaryMap, BoundaryPoint, HalfPlanePoint};
use crate::quadrature::{integrate, QuadOptions};

/// Error estimate above which a Poisson transform is rejected.
pub const POISSON_ERROR_LIMIT: f64 = 1e-6;

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A bounded real function on R ∪ {∞}, given by its values on R plus
/// metadata used to split quadratures and to test the strong-lifting
/// property.
#[derive(Clone)]
pub struct BoundaryFunction {
    name: String,
    eval: Eval,
    sup_bound: f64,
    discontinuities: Vec<BoundaryPoint>,
    value_at_infinity: Option<f64>,
}

impl fmt::Debug for BoundaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryFunction")
            .field("name", &self.name)
            .field("sup_bound", &self.sup_bound)
            .field("discontinuities", &self.discontinuities)
            .field("value_at_infinity", &self.value_at_infinity)
            .finish()
    }
}

impl BoundaryFunction {
    pub fn new<F>(
        name: impl Into<String>,
        eval: F,
        sup_bound: f64,
        discontinuities: Vec<BoundaryPoint>,
        value_at_infinity: Option<f64>,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(sup_bound > 0.0 && sup_bound.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sup bound must be positive, got {sup_bound}"
            )));
        }
        Ok(Self {
            name: name.into(),
            eval: Arc::new(eval),
            sup_bound,
            discontinuities,
            value_at_infinity,
        })
    }

    /// Sign of `x`, discontinuous at 0 and ∞.
    pub fn sign() -> Self {
        let f = |x: f64| {
            if x > 0.0 {
                1.0
            } else if x < 0.0 {
                -1.0
            } else {
                0.0
            }
        };
        Self::new(
            "sign",
            f,
            1.0,
            vec![BoundaryPoint::Finite(0.0), BoundaryPoint::Infinity],
            None,
        )
        .unwrap()
    }

    /// Indicator of `[a, ∞)`.
    pub fn step(a: f64) -> Self {
        let f = move |x: f64| if x >= a { 1.0 } else { 0.0 };
        Self::new(
            format!("step:{a}"),
            f,
            1.0,
            vec![BoundaryPoint::Finite(a), BoundaryPoint::Infinity],
            None,
        )
        .unwrap()
    }

    /// Indicator of `[a, b]`.
    pub fn boxcar(a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return Err(Error::InvalidParameter(format!("box needs a < b, got {a}, {b}")));
        }
        let f = move |x: f64| if (a..=b).contains(&x) { 1.0 } else { 0.0 };
        Self::new(
            format!("box:{a},{b}"),
            f,
            1.0,
            vec![BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)],
            Some(0.0),
        )
    }

    /// `2·arctan(x)/π`, continuous on R, jumping at ∞.
    pub fn atanned() -> Self {
        let f = |x: f64| 2.0 * x.atan() / PI;
        Self::new("atanned", f, 1.0, vec![BoundaryPoint::Infinity], None).unwrap()
    }

    pub fn constant(c: f64) -> Self {
        let bound = if c == 0.0 { 1.0 } else { c.abs() };
        Self::new(format!("const:{c}"), move |_| c, bound, vec![], Some(c)).unwrap()
    }

    /// Parses `sign`, `step:a`, `box:a,b`, `atanned` or `const:c`.
    pub fn named(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (head, arg) = spec.split_once(':').unwrap_or((spec, ""));
        let nums = || -> Result<Vec<f64>> {
            arg.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad function '{spec}'")))
                })
                .collect()
        };
        match (head, nums()) {
            ("sign", _) if arg.is_empty() => Ok(Self::sign()),
            ("atanned", _) if arg.is_empty() => Ok(Self::atanned()),
            ("step", Ok(v)) if v.len() == 1 => Ok(Self::step(v[0])),
            ("box", Ok(v)) if v.len() == 2 => Self::boxcar(v[0], v[1]),
            ("const", Ok(v)) if v.len() == 1 => Ok(Self::constant(v[0])),
            _ => Err(Error::Parse(format!("unknown function '{spec}'"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn discontinuities(&self) -> &[BoundaryPoint] {
        &self.discontinuities
    }

    pub fn finite_discontinuities(&self) -> Vec<f64> {
        self.discontinuities.iter().filter_map(|p| p.as_finite()).collect()
    }

    pub fn value_at_infinity(&self) -> Option<f64> {
        self.value_at_infinity
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// Value at a boundary point; `None` at ∞ when no value is declared.
    pub fn eval_point(&self, p: BoundaryPoint) -> Option<f64> {
        match p {
            BoundaryPoint::Finite(x) => Some(self.eval(x)),
            BoundaryPoint::Infinity => self.value_at_infinity,
        }
    }

    /// `x ↦ φ(g·x)`.
    pub fn compose<M>(&self, g: &M) -> Self
    where
        M: BoundaryMap + Clone + Send + Sync + 'static,
    {
        let inner = self.clone();
        let map = g.clone();
        let at_inf = inner.value_at_infinity.unwrap_or(0.0);
        let eval = move |x: f64| inner.eval_point(map.apply(BoundaryPoint::Finite(x))).unwrap_or(at_inf);
        let ginv = g.inverse();
        let discontinuities = self.discontinuities.iter().map(|d| ginv.apply(*d)).collect();
        let value_at_infinity = self.eval_point(g.apply(BoundaryPoint::Infinity));
        Self {
            name: format!("{}∘g", self.name),
            eval: Arc::new(eval),
            sup_bound: self.sup_bound,
            discontinuities,
            value_at_infinity,
        }
    }

    /// `x ↦ φ(x - b)`.
    pub fn translate(&self, b: f64) -> Self {
        let inner = self.clone();
        let discontinuities = self
            .discontinuities
            .iter()
            .map(|d| match d {
                BoundaryPoint::Finite(x) => BoundaryPoint::Finite(x + b),
                BoundaryPoint::Infinity => BoundaryPoint::Infinity,
            })
            .collect();
        Self {
            name: format!("{}(·-{b})", self.name),
            eval: Arc::new(move |x| inner.eval(x - b)),
            sup_bound: self.sup_bound,
            discontinuities,
            value_at_infinity: self.value_at_infinity,
        }
    }

    /// `a·φ + b·ψ`.
    pub fn linear_combination(a: f64, phi: &Self, b: f64, psi: &Self) -> Self {
        let (f, g) = (phi.clone(), psi.clone());
        let mut discontinuities = phi.discontinuities.clone();
        for d in &psi.discontinuities {
            if !discontinuities.contains(d) {
                discontinuities.push(*d);
            }
        }
        let value_at_infinity = match (phi.value_at_infinity, psi.value_at_infinity) {
            (Some(u), Some(v)) => Some(a * u + b * v),
            _ => None,
        };
        let bound = (a.abs() * phi.sup_bound + b.abs() * psi.sup_bound).max(f64::MIN_POSITIVE);
        Self {
            name: format!("{a}*{}+{b}*{}", phi.name, psi.name),
            eval: Arc::new(move |x| a * f.eval(x) + b * g.eval(x)),
            sup_bound: bound,
            discontinuities,
            value_at_infinity,
        }
    }
}

/// `(1/π)·im z / ((x - re z)^2 + im z^2)`.
pub fn poisson_kernel(z: HalfPlanePoint, x: f64) -> f64 {
    let dx = x - z.re();
    z.im() / (PI * (dx * dx + z.im() * z.im()))
}

/// Poisson transform with the default absolute tolerance of `1e-9`.
pub fn poisson_transform(phi: &BoundaryFunction, z: HalfPlanePoint) -> Result<f64> {
    poisson_transform_with(
        phi,
        z,
        QuadOptions {
            abs_tol: 1e-9,
            rel_tol: 0.0,
            ..QuadOptions::default()
        },
    )
}

/// `∫ φ(x) P(z, x) dx` through `x = re z + im z · tan θ`, which turns the
/// integral into `(1/π)∫ φ dθ` over `(-π/2, π/2)`.
pub fn poisson_transform_with(phi: &BoundaryFunction, z: HalfPlanePoint, opts: QuadOptions) -> Result<f64> {
    let (re, im) = (z.re(), z.im());
    let mut breaks = vec![-FRAC_PI_2, 0.0, FRAC_PI_2];
    breaks.extend(phi.finite_discontinuities().into_iter().map(|d| ((d - re) / im).atan()));
    let r = integrate(
        |theta: f64| phi.eval(re + im * theta.tan()),
        &breaks,
        QuadOptions {
            abs_tol: opts.abs_tol * PI,
            ..opts
        },
    );
    let value = r.require(POISSON_ERROR_LIMIT * PI)? / PI;
    Ok(value.clamp(-phi.sup_bound, phi.sup_bound))
}

/// Closed-form Poisson transform of the sign function, `1 - 2 arg(z)/π`.
pub fn poisson_sign(z: HalfPlanePoint) -> f64 {
    1.0 - 2.0 * z.im().atan2(z.re()) / PI
}
