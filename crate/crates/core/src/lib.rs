//! Equivariant linear liftings of bounded measurable functions on the
//! boundary R ∪ {∞} of the hyperbolic plane, for the Möbius action of
//! SL(2,R).
//!
//! The lifting of a bounded function class `φ` at a boundary point `ξ` is
//! the limit, as `t → ∞`, of the convolution of `φ` with an explicit
//! approximate identity `M_t` centred at `ξ`; equivalently, of the
//! normalised hyperbolic average of the Poisson transform of `φ` over a
//! truncated cone pointing at `ξ`. This crate evaluates both routes at
//! finite `t`, extrapolates in `1/t`, and measures the equivariance defects,
//! Følner overlaps and cocycle identities behind the construction.

// NaN must fail validation, hence `!(a < b)` rather than `a >= b`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Quadrature nodes are kept as published, digits beyond f64 included.
#![allow(clippy::excessive_precision)]

pub mod cocycle;
pub mod counterexample;
pub mod domains;
pub mod error;
pub mod kernel;
pub mod lifting;
pub mod moebius;
pub mod montecarlo;
pub mod poisson;
pub mod quadrature;

pub use cocycle::TupleFunction;
pub use domains::{DomainSpec, Window};
pub use error::{Error, Result};
pub use kernel::KernelSpec;
pub use lifting::LiftEstimate;
pub use moebius::{BoundaryMap, BoundaryPoint, GroupElement, HalfPlanePoint, PiecewiseElement};
pub use poisson::BoundaryFunction;
