//! Exact image curves of self-similar flows.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::{Curve, FlowHistory, Mat2};
use crate::solitons::SolitonSpec;
use crate::{Error, Result};

/// Scale `a(t) = sqrt(1 + 2 lambda t)` and rotation angle
/// `theta(t) = omega / (2 lambda) * log(1 + 2 lambda t)` (`omega t` when `lambda = 0`).
pub fn scale_and_angle(spec: &SolitonSpec, t: f64) -> Result<(f64, f64)> {
    let q = 1.0 + 2.0 * spec.lambda * t;
    if !(q > 0.0) {
        return Err(Error::param(
            "t",
            format!("1 + 2 lambda t = {q} is not positive (past extinction)"),
        ));
    }
    let theta = if spec.lambda == 0.0 {
        spec.omega * t
    } else {
        spec.omega / (2.0 * spec.lambda) * q.ln()
    };
    Ok((q.sqrt(), theta))
}

/// Image of the self-similar flow generated by `profile` at time `t`:
/// `a(t) R(theta(t)) profile + e t`.
///
/// The tangential reparametrization that makes the flow normal is not
/// applied, so sample `i` of the output is not the material point `i`.
pub fn analytic_selfsimilar_flow(spec: &SolitonSpec, profile: &Curve, t: f64) -> Result<Curve> {
    spec.validate()?;
    if spec.e.norm() != 0.0 && (spec.lambda != 0.0 || spec.omega != 0.0) {
        return Err(Error::param(
            "e",
            "translation combined with scaling or rotation has no closed form here",
        ));
    }
    let (a, theta) = scale_and_angle(spec, t)?;
    let r = Mat2::rotation(theta);
    let shift = spec.e * t;
    let pts = profile
        .points()
        .iter()
        .map(|&p| r.mul_vec(p) * a + shift)
        .collect();
    profile.with_points(pts)
}

/// [`analytic_selfsimilar_flow`] sampled at the given increasing times.
pub fn analytic_history(spec: &SolitonSpec, profile: &Curve, times: &[f64]) -> Result<FlowHistory> {
    let slices = times
        .iter()
        .map(|&t| Ok((t, analytic_selfsimilar_flow(spec, profile, t)?)))
        .collect::<Result<Vec<_>>>()?;
    FlowHistory::from_slices(slices)
}
