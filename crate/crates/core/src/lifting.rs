//! Evaluation of the lifting `λφ(ξ)` at finite `t`, by convolution with
//! `M_t` and by cone averages of the Poisson transform, with extrapolation
//! in `1/t`.

use rayon::prelude::*;
use serde::Serialize;

use crate::domains::{check_t, sample_cone, Window};
use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::moebius::{chamber_rotation, BoundaryPoint, GroupElement};
use crate::montecarlo::{chunk_rng, map_chunks, Moments};
use crate::poisson::{poisson_transform, BoundaryFunction};
use crate::quadrature::QuadResult;

/// Error estimate above which a convolution integral is rejected.
pub const LIFT_ERROR_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftEstimate {
    pub t_values: Vec<f64>,
    pub estimates: Vec<f64>,
    pub quadrature_errors: Vec<f64>,
    /// Intercept of the least-squares fit of the estimates against `1/t`.
    pub extrapolated: f64,
    pub fit_residual: f64,
    /// Fit residual plus the largest quadrature error.
    pub error_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl From<Moments> for McEstimate {
    fn from(m: Moments) -> Self {
        Self {
            value: m.mean(),
            std_error: m.std_error(),
            samples: m.n as usize,
        }
    }
}

/// `∫ φ(ξ + y) M_t(y) dy` for finite `ξ`.
pub fn convolve(phi: &BoundaryFunction, xi: f64, spec: &KernelSpec) -> QuadResult {
    let mut points = vec![0.0];
    points.extend(phi.finite_discontinuities().into_iter().map(|d| d - xi));
    crate::quadrature::integrate_line(
        |y| phi.eval(xi + y) * spec.density(y),
        &points,
        spec.line_options(1e-11),
    )
}

/// The finite-`t` value at any boundary point; `ξ = ∞` is moved to 0 by
/// the inversion `S`, using `λ(φ∘S)(0) = λφ(S·0)`.
pub fn lift_at(phi: &BoundaryFunction, xi: BoundaryPoint, spec: &KernelSpec) -> Result<QuadResult> {
    let r = match xi {
        BoundaryPoint::Finite(x) => convolve(phi, x, spec),
        BoundaryPoint::Infinity => convolve(&phi.compose(&GroupElement::INVERSION), 0.0, spec),
    };
    r.require(LIFT_ERROR_LIMIT)?;
    Ok(r)
}

/// Intercept, slope and largest residual of the least-squares line through
/// `(x_i, y_i)`.
pub fn affine_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return (ys.first().copied().unwrap_or(0.0), 0.0, 0.0);
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    (intercept, slope, residual)
}

fn check_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::EmptySchedule);
    }
    for &t in schedule {
        check_t(t)?;
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("schedule must be strictly increasing".into()));
    }
    Ok(())
}

pub fn lift_eval(phi: &BoundaryFunction, xi: BoundaryPoint, schedule: &[f64], window: Window) -> Result<LiftEstimate> {
    check_schedule(schedule)?;
    let results: Vec<QuadResult> = schedule
        .par_iter()
        .map(|&t| lift_at(phi, xi, &KernelSpec::new(t, window)?))
        .collect::<Result<_>>()?;
    let estimates: Vec<f64> = results.iter().map(|r| r.value).collect();
    let quadrature_errors: Vec<f64> = results.iter().map(|r| r.error).collect();
    let inv_t: Vec<f64> = schedule.iter().map(|t| 1.0 / t).collect();
    let (extrapolated, _, fit_residual) = affine_fit(&inv_t, &estimates);
    let worst_quad = quadrature_errors.iter().copied().fold(0.0, f64::max);
    Ok(LiftEstimate {
        t_values: schedule.to_vec(),
        estimates,
        quadrature_errors,
        extrapolated,
        fit_residual,
        error_estimate: fit_residual + worst_quad,
    })
}

/// Monte Carlo mean of `Pφ` over the cone `V_t^ξ`, in the flat `(s, u)`
/// parametrization.
pub fn domain_average(
    phi: &BoundaryFunction,
    xi: BoundaryPoint,
    t: f64,
    window: Window,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_t(t)?;
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let k = chamber_rotation(xi);
    let parts: Vec<Result<Moments>> = map_chunks(samples, |c, len| {
        let mut rng = chunk_rng(seed, c, 0);
        let mut m = Moments::default();
        for _ in 0..len {
            let z = k.apply_h(sample_cone(&mut rng, t, window))?;
            m.push(poisson_transform(phi, z)?);
        }
        Ok(m)
    });
    let m: Moments = parts.into_iter().collect::<Result<Vec<_>>>()?.into_iter().collect();
    Ok(m.into())
}

/// `|λφ(ξ) - φ(ξ)|` with `λφ(ξ)` extrapolated from the schedule.
pub fn strong_check(phi: &BoundaryFunction, xi: BoundaryPoint, schedule: &[f64], window: Window) -> Result<f64> {
    let target = phi
        .eval_point(xi)
        .ok_or_else(|| Error::InvalidParameter(format!("{} has no value at {xi}", phi.name())))?;
    Ok((lift_eval(phi, xi, schedule, window)?.extrapolated - target).abs())
}
