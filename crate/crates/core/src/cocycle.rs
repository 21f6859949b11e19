//! Functions of several boundary points, the homogeneous coboundary, and
//! the product lifting `λ_p` built from the tensor kernel `M_t^{⊗p}`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::domains::{check_t, Window};
use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::lifting::McEstimate;
use crate::moebius::{BoundaryPoint, GroupElement};
use crate::montecarlo::{chunk_rng, map_chunks, Moments};
use crate::poisson::BoundaryFunction;

type TupleEval = Arc<dyn Fn(&[BoundaryPoint]) -> f64 + Send + Sync>;

/// A bounded function on `(R ∪ {∞})^p`.
#[derive(Clone)]
pub struct TupleFunction {
    name: String,
    arity: usize,
    eval: TupleEval,
    sup_bound: f64,
}

impl fmt::Debug for TupleFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TupleFunction")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .field("sup_bound", &self.sup_bound)
            .finish()
    }
}

impl TupleFunction {
    pub fn new<F>(name: impl Into<String>, arity: usize, sup_bound: f64, eval: F) -> Result<Self>
    where
        F: Fn(&[BoundaryPoint]) -> f64 + Send + Sync + 'static,
    {
        if arity == 0 {
            return Err(Error::InvalidParameter("arity must be positive".into()));
        }
        if !(sup_bound > 0.0 && sup_bound.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sup bound must be positive, got {sup_bound}"
            )));
        }
        Ok(Self {
            name: name.into(),
            arity,
            eval: Arc::new(eval),
            sup_bound,
        })
    }

    pub fn constant(arity: usize, c: f64) -> Result<Self> {
        Self::new(format!("const:{c}"), arity, c.abs().max(1.0), move |_| c)
    }

    /// The orientation cocycle on triples.
    pub fn orientation() -> Self {
        Self::new("orientation", 3, 1.0, |x| orientation_cocycle(x[0], x[1], x[2]) as f64).unwrap()
    }

    /// `(x, y) ↦ or(x, y, ∞)`, which is `sign(y - x)` on finite pairs.
    pub fn orientation_slice() -> Self {
        Self::new("orientation-slice", 2, 1.0, |x| {
            orientation_cocycle(x[0], x[1], BoundaryPoint::Infinity) as f64
        })
        .unwrap()
    }

    /// `(x_1, …, x_p) ↦ Π sign(x_i)`, with sign(∞) = 0.
    pub fn sign_product(arity: usize) -> Result<Self> {
        Self::new(format!("sign-product-{arity}"), arity, 1.0, |x| {
            x.iter().map(|p| p.as_finite().map_or(0.0, sign)).product()
        })
    }

    /// A one-variable function, with `φ(∞)` taken from its declared value
    /// or 0.
    pub fn from_boundary(phi: &BoundaryFunction) -> Self {
        let phi = phi.clone();
        let bound = phi.sup_bound();
        Self::new(phi.name().to_string(), 1, bound, move |x| {
            phi.eval_point(x[0]).unwrap_or(0.0)
        })
        .unwrap()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn eval(&self, x: &[BoundaryPoint]) -> f64 {
        debug_assert_eq!(x.len(), self.arity);
        (self.eval)(x)
    }

    /// `x ↦ f(x_{σ(0)}, …, x_{σ(p-1)})`.
    pub fn permuted(&self, sigma: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.arity];
        if sigma.len() != self.arity
            || !sigma
                .iter()
                .all(|&i| i < self.arity && !std::mem::replace(&mut seen[i], true))
        {
            return Err(Error::InvalidParameter(format!(
                "{sigma:?} is not a permutation of {} points",
                self.arity
            )));
        }
        let f = self.clone();
        let sigma = sigma.to_vec();
        let name = format!("{}∘{sigma:?}", self.name);
        Self::new(name, self.arity, self.sup_bound, move |x| {
            let y: Vec<BoundaryPoint> = sigma.iter().map(|&i| x[i]).collect();
            f.eval(&y)
        })
    }

    /// The coboundary `d f`, a function of `p + 1` points.
    pub fn coboundary(&self) -> Self {
        let f = self.clone();
        let bound = (self.arity + 1) as f64 * self.sup_bound;
        Self::new(format!("d({})", self.name), self.arity + 1, bound, move |x| {
            coboundary(&f, x).unwrap()
        })
        .unwrap()
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Cyclic orientation of three points of the circle: +1 for positively
/// ordered triples, -1 for negatively ordered ones, 0 if two coincide.
pub fn orientation_cocycle(x: BoundaryPoint, y: BoundaryPoint, z: BoundaryPoint) -> i8 {
    use BoundaryPoint::{Finite, Infinity};
    if x == y || y == z || x == z {
        return 0;
    }
    let s = match (x, y, z) {
        (Finite(x), Finite(y), Finite(z)) => sign(y - x) * sign(z - y) * sign(z - x),
        (Finite(x), Finite(y), Infinity) => sign(y - x),
        (Finite(x), Infinity, Finite(z)) => sign(x - z),
        (Infinity, Finite(y), Finite(z)) => sign(z - y),
        _ => 0.0,
    };
    s as i8
}

/// `Σ_j (-1)^j f(x_0, …, x̂_j, …, x_p)`.
pub fn coboundary(f: &TupleFunction, tuple: &[BoundaryPoint]) -> Result<f64> {
    if tuple.len() != f.arity + 1 {
        return Err(Error::InvalidParameter(format!(
            "coboundary of an arity-{} function needs {} points, got {}",
            f.arity,
            f.arity + 1,
            tuple.len()
        )));
    }
    let mut face = Vec::with_capacity(f.arity);
    let mut total = 0.0;
    for j in 0..tuple.len() {
        face.clear();
        face.extend(tuple.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, p)| *p));
        let term = f.eval(&face);
        total += if j % 2 == 0 { term } else { -term };
    }
    Ok(total)
}

/// Parameters shared by every Monte Carlo product lifting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiftParams {
    pub t: f64,
    pub window: Window,
    pub samples: usize,
    pub seed: u64,
}

impl LiftParams {
    fn check(&self) -> Result<KernelSpec> {
        check_t(self.t)?;
        if self.samples < 2 {
            return Err(Error::InvalidParameter("need at least two samples".into()));
        }
        KernelSpec::new(self.t, self.window)
    }
}

/// `x = ξ + κ` with `κ ~ M_t`; at `ξ = ∞`, `x = S·κ = -1/κ`.
fn transported(xi: BoundaryPoint, kappa: f64) -> BoundaryPoint {
    match xi {
        BoundaryPoint::Finite(x) => BoundaryPoint::Finite(x + kappa),
        BoundaryPoint::Infinity => GroupElement::INVERSION.apply(BoundaryPoint::Finite(kappa)),
    }
}

/// Product lifting in which coordinate `i` draws from random stream
/// `streams[i]`; equal stream lists give identical draws.
pub fn lift_p_streams(
    phi: &TupleFunction,
    xi: &[BoundaryPoint],
    streams: &[u64],
    params: &LiftParams,
) -> Result<McEstimate> {
    let spec = params.check()?;
    if xi.len() != phi.arity || streams.len() != phi.arity {
        return Err(Error::InvalidParameter(format!(
            "arity {} function evaluated at {} points",
            phi.arity,
            xi.len()
        )));
    }
    let m: Moments = map_chunks(params.samples, |c, len| {
        let mut rngs: Vec<_> = streams.iter().map(|&s| chunk_rng(params.seed, c, s)).collect();
        let mut point = vec![BoundaryPoint::Infinity; xi.len()];
        let mut m = Moments::default();
        for _ in 0..len {
            for (i, rng) in rngs.iter_mut().enumerate() {
                point[i] = transported(xi[i], spec.draw(rng));
            }
            m.push(phi.eval(&point));
        }
        m
    })
    .into_iter()
    .collect();
    Ok(m.into())
}

/// `λ_p φ(ξ)` at finite `t`, by Monte Carlo over `Π M_t(x_i - ξ_i)`.
pub fn lift_p(phi: &TupleFunction, xi: &[BoundaryPoint], params: &LiftParams) -> Result<McEstimate> {
    let streams: Vec<u64> = (0..xi.len() as u64).collect();
    lift_p_streams(phi, xi, &streams, params)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntertwineReport {
    pub lifted_coboundary: f64,
    pub coboundary_of_lift: f64,
    pub residual: f64,
    /// Combined standard error of both sides.
    pub sigma: f64,
    pub pass: bool,
}

/// Compares `λ_{p+1}(d f)` with `d(λ_p f)` at `tuple`. Coordinate `i` of
/// the tuple uses the same random stream on both sides.
pub fn intertwine_check(f: &TupleFunction, tuple: &[BoundaryPoint], params: &LiftParams) -> Result<IntertwineReport> {
    if tuple.len() != f.arity + 1 {
        return Err(Error::InvalidParameter(format!(
            "need {} points, got {}",
            f.arity + 1,
            tuple.len()
        )));
    }
    let all: Vec<u64> = (0..tuple.len() as u64).collect();
    let lhs = lift_p_streams(&f.coboundary(), tuple, &all, params)?;
    let mut rhs = 0.0;
    let mut var = lhs.std_error.powi(2);
    for j in 0..tuple.len() {
        let face: Vec<BoundaryPoint> = tuple
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, p)| *p)
            .collect();
        let streams: Vec<u64> = all.iter().copied().filter(|&s| s != j as u64).collect();
        let e = lift_p_streams(f, &face, &streams, params)?;
        rhs += if j % 2 == 0 { e.value } else { -e.value };
        var += e.std_error.powi(2);
    }
    let residual = (lhs.value - rhs).abs();
    let sigma = var.sqrt();
    Ok(IntertwineReport {
        lifted_coboundary: lhs.value,
        coboundary_of_lift: rhs,
        residual,
        sigma,
        pass: residual <= 3.0 * sigma + 1e-12,
    })
}

/// `d(λ_p f)(tuple)` with each face estimated from its own seed, so the
/// returned error is a genuine sampling error.
pub fn lifted_coboundary(f: &TupleFunction, tuple: &[BoundaryPoint], params: &LiftParams) -> Result<McEstimate> {
    if tuple.len() != f.arity + 1 {
        return Err(Error::InvalidParameter(format!(
            "need {} points, got {}",
            f.arity + 1,
            tuple.len()
        )));
    }
    let (mut value, mut var) = (0.0, 0.0);
    for j in 0..tuple.len() {
        let face: Vec<BoundaryPoint> = tuple
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, p)| *p)
            .collect();
        let face_params = LiftParams {
            seed: params.seed.wrapping_add(0x9e37_79b9 * (j as u64 + 1)),
            ..*params
        };
        let e = lift_p(f, &face, &face_params)?;
        value += if j % 2 == 0 { e.value } else { -e.value };
        var += e.std_error.powi(2);
    }
    Ok(McEstimate {
        value,
        std_error: var.sqrt(),
        samples: params.samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use BoundaryPoint::{Finite, Infinity};

    fn params(t: f64, samples: usize, seed: u64) -> LiftParams {
        LiftParams {
            t,
            window: Window::SYMMETRIC,
            samples,
            seed,
        }
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orientation_cocycle(Finite(0.0), Finite(1.0), Finite(2.0)), 1);
        assert_eq!(orientation_cocycle(Finite(1.0), Finite(0.0), Finite(2.0)), -1);
        assert_eq!(orientation_cocycle(Finite(0.0), Finite(0.0), Finite(5.0)), 0);
        assert_eq!(orientation_cocycle(Finite(0.0), Finite(1.0), Infinity), 1);
        assert_eq!(orientation_cocycle(Finite(1.0), Infinity, Finite(0.0)), 1);
        assert_eq!(orientation_cocycle(Infinity, Finite(0.0), Finite(1.0)), 1);
        assert_eq!(orientation_cocycle(Infinity, Infinity, Finite(1.0)), 0);
    }

    #[test]
    fn coboundary_examples() {
        let c = TupleFunction::constant(1, 2.0).unwrap();
        assert_eq!(coboundary(&c, &[Finite(0.3), Finite(-1.0)]).unwrap(), 0.0);
        let or = TupleFunction::orientation();
        assert_eq!(
            coboundary(&or, &[Finite(0.0), Finite(1.0), Finite(2.0), Infinity]).unwrap(),
            0.0
        );
        let at = TupleFunction::from_boundary(&BoundaryFunction::atanned());
        // d f(x0, x1) = f(x1) - f(x0)
        assert!((coboundary(&at, &[Finite(0.0), Finite(1.0)]).unwrap() - 0.5).abs() < 1e-15);
        assert!(coboundary(&or, &[Finite(0.0)]).is_err());
    }

    fn point() -> impl Strategy<Value = BoundaryPoint> {
        prop_oneof![
            4 => (-3i32..=3).prop_map(|k| Finite(k as f64)),
            1 => Just(Infinity),
        ]
    }

    proptest! {
        #[test]
        fn orientation_is_cocycle(t in proptest::collection::vec(point(), 4)) {
            prop_assert_eq!(coboundary(&TupleFunction::orientation(), &t).unwrap(), 0.0);
        }

        #[test]
        fn orientation_is_alternating(x in point(), y in point(), z in point()) {
            let o = |a, b, c| orientation_cocycle(a, b, c);
            prop_assert_eq!(o(x, y, z), -o(y, x, z));
            prop_assert_eq!(o(x, y, z), o(y, z, x));
        }

        #[test]
        fn d_squared_vanishes(t in proptest::collection::vec(point(), 4)) {
            let slice = TupleFunction::orientation_slice();
            prop_assert_eq!(coboundary(&slice.coboundary(), &t).unwrap(), 0.0);
        }
    }

    #[test]
    fn lifted_sign_vanishes() {
        let p = params(8.0, 200_000, 1);
        let sign = TupleFunction::from_boundary(&BoundaryFunction::sign());
        let e = lift_p(&sign, &[Finite(0.0)], &p).unwrap();
        assert!(e.value.abs() <= 3.0 * e.std_error);
        let e = lift_p(&TupleFunction::orientation_slice(), &[Finite(0.0), Finite(0.0)], &p).unwrap();
        assert!(e.value.abs() <= 3.0 * e.std_error);
        let e = lift_p(
            &TupleFunction::sign_product(2).unwrap(),
            &[Finite(0.0), Finite(0.0)],
            &p,
        )
        .unwrap();
        assert!(e.value.abs() <= 3.0 * e.std_error);
    }

    #[test]
    fn lift_is_reproducible() {
        let p = params(4.0, 30_000, 9);
        let f = TupleFunction::orientation();
        let xi = [Finite(0.0), Finite(1.0), Infinity];
        assert_eq!(lift_p(&f, &xi, &p).unwrap(), lift_p(&f, &xi, &p).unwrap());
    }

    #[test]
    fn intertwining() {
        let p = params(16.0, 50_000, 2);
        let r = intertwine_check(
            &TupleFunction::orientation_slice(),
            &[Finite(0.0), Finite(1.0), Infinity],
            &p,
        )
        .unwrap();
        assert!(r.pass, "{r:?}");
        let c = TupleFunction::constant(2, 1.0).unwrap();
        assert!(
            intertwine_check(&c, &[Finite(0.0), Finite(0.0), Finite(3.0)], &p)
                .unwrap()
                .pass
        );
        let at = TupleFunction::from_boundary(&BoundaryFunction::atanned());
        assert!(intertwine_check(&at, &[Finite(2.0), Finite(2.0)], &p).unwrap().pass);
    }

    #[test]
    fn permutation_equivariance() {
        let f = TupleFunction::orientation();
        let xi = [Finite(-0.5), Finite(1.0), Infinity];
        let sigma = [1, 0, 2];
        let xi_perm = [xi[1], xi[0], xi[2]];
        let a = lift_p(&f, &xi, &params(6.0, 100_000, 4)).unwrap();
        let b = lift_p(&f.permuted(&sigma).unwrap(), &xi_perm, &params(6.0, 100_000, 5)).unwrap();
        assert!((a.value - b.value).abs() <= 3.0 * a.std_error.hypot(b.std_error));
        assert!(f.permuted(&[0, 0, 1]).is_err());
    }

    #[test]
    fn lifted_orientation_is_strict() {
        let p = params(8.0, 50_000, 7);
        let f = TupleFunction::orientation();
        for t in [
            [Finite(0.0), Finite(0.0), Finite(1.0), Infinity],
            [Infinity, Finite(2.0), Finite(2.0), Infinity],
        ] {
            let e = lifted_coboundary(&f, &t, &p).unwrap();
            assert!(e.value.abs() <= 3.0 * e.std_error + 1e-12, "{t:?}: {e:?}");
        }
    }
}
