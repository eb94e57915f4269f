//! Harnack quantities of discrete flows and the closest-point test for rotators.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::{signed_curvature, Curve, FlowHistory, Topology, BOUNDARY_COLLAR};
use crate::solitons::{residual, SolitonSpec};
use crate::{Error, Result};

/// Optimal-V samples need `kappa` above this.
pub const KAPPA_CUTOFF: f64 = 1e-4;
/// Slices with `min kappa` below `-WEAK_CONVEXITY_TOL` are not weakly convex.
pub const WEAK_CONVEXITY_TOL: f64 = 1e-6;
/// Residual above which a curve is not accepted as a rotator profile.
pub const ROTATOR_RESIDUAL_GATE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum VMode {
    Zero,
    /// `V = -grad H / kappa`, the minimizer of the quadratic in `V`.
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HarnackSample {
    pub index: usize,
    pub t: f64,
    pub h: f64,
    pub dh_dt: f64,
    pub grad_h: f64,
    pub quantity: f64,
    pub v: f64,
    /// Weakly convex slice, interior sample, centered time difference, and
    /// (in optimal mode) `kappa > KAPPA_CUTOFF`.
    pub valid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeDerivative {
    pub value: f64,
    /// The time was the first or last slice, so a one-sided quotient was used.
    pub one_sided: bool,
}

fn curvatures(curve: &Curve) -> Result<Vec<f64>> {
    Ok(signed_curvature(curve)?.iter().map(|s| s.kappa).collect())
}

/// Derivative weights of the quadratic through `(-a, 0, b)` evaluated at 0.
fn three_point_weights(a: f64, b: f64) -> (f64, f64, f64) {
    (-b / (a * (a + b)), (b - a) / (a * b), a / (b * (a + b)))
}

/// `d kappa / dt` at fixed sample `i` and slice time `t`.
pub fn material_dh_dt(history: &FlowHistory, i: usize, t: f64) -> Result<TimeDerivative> {
    let all = material_dh_dt_all(history, t)?;
    let (values, one_sided) = all;
    values
        .get(i)
        .map(|&value| TimeDerivative { value, one_sided })
        .ok_or_else(|| Error::OutOfRange(format!("index {i} with {} samples", history.count())))
}

fn material_dh_dt_all(history: &FlowHistory, t: f64) -> Result<(Vec<f64>, bool)> {
    if history.len() < 2 {
        return Err(Error::param("history", "time derivatives need at least two slices"));
    }
    let k = history.index_of_time(t)?;
    let sl = history.slices();
    let m = sl.len();
    if k == 0 || k == m - 1 {
        let (a, b) = if k == 0 { (0, 1) } else { (m - 2, m - 1) };
        let (ka, kb) = (curvatures(&sl[a].curve)?, curvatures(&sl[b].curve)?);
        let dt = sl[b].t - sl[a].t;
        return Ok((ka.iter().zip(kb.iter()).map(|(x, y)| (y - x) / dt).collect(), true));
    }
    let (km, k0, kp) = (
        curvatures(&sl[k - 1].curve)?,
        curvatures(&sl[k].curve)?,
        curvatures(&sl[k + 1].curve)?,
    );
    let (wm, w0, wp) = three_point_weights(sl[k].t - sl[k - 1].t, sl[k + 1].t - sl[k].t);
    Ok((
        (0..km.len()).map(|i| wm * km[i] + w0 * k0[i] + wp * kp[i]).collect(),
        false,
    ))
}

/// Arclength derivative of per-sample values: three-point quotients on the
/// local (nonuniform) spacing, two-point at open ends.
pub fn arclength_gradient(curve: &Curve, values: &[f64]) -> Vec<f64> {
    let n = curve.len();
    let seg = curve.segment_lengths();
    let closed = curve.topology() == Topology::Closed;
    (0..n)
        .map(|i| {
            if !closed && i == 0 {
                (values[1] - values[0]) / seg[0]
            } else if !closed && i == n - 1 {
                (values[n - 1] - values[n - 2]) / seg[n - 2]
            } else {
                let (im, ip) = ((i + n - 1) % n, (i + 1) % n);
                let (a, b) = (seg[im], seg[i]);
                let (wm, w0, wp) = three_point_weights(a, b);
                wm * values[im] + w0 * values[i] + wp * values[ip]
            }
        })
        .collect()
}

fn harnack_samples(history: &FlowHistory, t: f64, mode: VMode, expanding: bool) -> Result<Vec<HarnackSample>> {
    let k = history.index_of_time(t)?;
    let curve = &history.slices()[k].curve;
    let t = history.slices()[k].t;
    let kappa = curvatures(curve)?;
    let (dh, one_sided) = material_dh_dt_all(history, t)?;
    let grad = arclength_gradient(curve, &kappa);
    let interior = curve.interior_range();
    let convex = interior.clone().all(|i| kappa[i] >= -WEAK_CONVEXITY_TOL);
    Ok((0..curve.len())
        .map(|i| {
            let h = kappa[i];
            let v = match mode {
                VMode::Zero => 0.0,
                VMode::Optimal if h > KAPPA_CUTOFF => -grad[i] / h,
                VMode::Optimal => 0.0,
            };
            let mut q = dh[i] + 2.0 * v * grad[i] + h * v * v;
            if expanding {
                q += h / (2.0 * t);
            }
            let valid = convex
                && !one_sided
                && interior.contains(&i)
                && (mode == VMode::Zero || h > KAPPA_CUTOFF);
            HarnackSample {
                index: i,
                t,
                h,
                dh_dt: dh[i],
                grad_h: grad[i],
                quantity: q,
                v,
                valid,
            }
        })
        .collect())
}

/// `dH/dt + 2 V grad H + kappa V^2` at every sample of the slice at time `t`.
pub fn steady_harnack(history: &FlowHistory, t: f64, mode: VMode) -> Result<Vec<HarnackSample>> {
    harnack_samples(history, t, mode, false)
}

/// `dH/dt + H / (2t) + 2 V grad H + kappa V^2`; needs `t > 0`.
pub fn expanding_harnack(history: &FlowHistory, t: f64, mode: VMode) -> Result<Vec<HarnackSample>> {
    if !(t > 0.0) {
        return Err(Error::param("t", "the expanding quantity is defined for t > 0"));
    }
    harnack_samples(history, t, mode, true)
}

/// `(t, sqrt(t) kappa_i(t))` over all slices.
pub fn sqrt_t_h_series(history: &FlowHistory, i: usize) -> Result<Vec<(f64, f64)>> {
    if i >= history.count() {
        return Err(Error::OutOfRange(format!("index {i} with {} samples", history.count())));
    }
    history
        .slices()
        .iter()
        .map(|sl| {
            if !(sl.t > 0.0) {
                return Err(Error::param("history", "sqrt(t) H needs t > 0"));
            }
            Ok((sl.t, sl.t.sqrt() * curvatures(&sl.curve)?[i]))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SqrtTHReport {
    pub index: usize,
    pub series: Vec<(f64, f64)>,
    pub min_slope: f64,
    pub max_abs_slope: f64,
    /// `min_slope >= -1e-6`.
    pub monotone: bool,
    /// Every slice is weakly convex, the hypothesis under which monotonicity is expected.
    pub valid: bool,
}

/// Slopes of `sqrt(t) H` at a fixed sample between consecutive slices.
pub fn sqrt_t_h_monotone(history: &FlowHistory, i: usize) -> Result<SqrtTHReport> {
    if history.len() < 3 {
        return Err(Error::param("history", "need at least three slices"));
    }
    let series = sqrt_t_h_series(history, i)?;
    let slopes: Vec<f64> = series
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    let min_slope = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_abs_slope = slopes.iter().map(|s| s.abs()).fold(0.0, f64::max);
    let mut valid = true;
    for sl in history.slices() {
        let k = curvatures(&sl.curve)?;
        if sl.curve.interior_range().any(|j| k[j] < -WEAK_CONVEXITY_TOL) {
            valid = false;
        }
    }
    Ok(SqrtTHReport {
        index: i,
        series,
        min_slope,
        max_abs_slope,
        monotone: min_slope >= -1e-6,
        valid,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RotatorReport {
    /// Sample closest to the origin.
    pub argmin: usize,
    /// Arclength offset of the refined minimizer from that sample.
    pub offset: f64,
    pub distance: f64,
    pub h_at_argmin: f64,
    /// `|<x, T>| / |x|` at the refined minimizer (0 when it is the origin).
    pub tangency_defect: f64,
    pub max_abs_kappa: f64,
    pub residual: f64,
    /// Residual below the gate, `|H| < 1e-3 max |kappa|`, and tangency defect below 1e-6.
    pub pass: bool,
}

/// At the point of a rotator profile closest to the origin the position is
/// normal, so `H = -omega <J x, x> = 0` there.
///
/// The minimizer of `|x|` is located to sub-sample accuracy on the parabola
/// through the nearest sample and its neighbours (parametrized by arclength);
/// `H` there is interpolated linearly.
pub fn rotator_minimality_check(curve: &Curve, omega: f64) -> Result<RotatorReport> {
    let spec = SolitonSpec::rotator(omega)?;
    let pts = curve.points();
    let n = pts.len();
    let mut a = 0;
    for i in 1..n {
        if pts[i].norm_sq() < pts[a].norm_sq() {
            a = i;
        }
    }
    if curve.topology() == Topology::Open && (a < BOUNDARY_COLLAR || a + BOUNDARY_COLLAR >= n) {
        return Err(Error::Inconclusive(format!(
            "closest sample {a} lies within the boundary collar of the truncated window"
        )));
    }
    let kappa = curvatures(curve)?;
    let max_abs_kappa = curve.interior_range().map(|i| kappa[i].abs()).fold(0.0, f64::max);
    let (im, ip) = ((a + n - 1) % n, (a + 1) % n);
    let (hm, hp) = (pts[a].distance(pts[im]), pts[ip].distance(pts[a]));

    // quadratic x(u) through (-hm, pm), (0, pa), (hp, pp)
    let (wm, w0, wp) = three_point_weights(hm, hp);
    let d1 = pts[im] * wm + pts[a] * w0 + pts[ip] * wp;
    let d2 = (pts[ip] * hm - pts[a] * (hm + hp) + pts[im] * hp) * (2.0 / (hm * hp * (hm + hp)));
    let x = |u: f64| pts[a] + d1 * u + d2 * (0.5 * u * u);
    let dx = |u: f64| d1 + d2 * u;
    let mut u = 0.0f64;
    if pts[a].norm() > 0.0 {
        for _ in 0..50 {
            let g = x(u).dot(dx(u));
            let dg = dx(u).norm_sq() + x(u).dot(d2);
            if !(dg > 0.0) {
                break;
            }
            let next = (u - g / dg).clamp(-hm, hp);
            if (next - u).abs() < 1e-16 * (hm + hp) {
                u = next;
                break;
            }
            u = next;
        }
    }
    let p = x(u);
    let distance = p.norm();
    let tangency_defect = if distance > 1e-12 {
        match dx(u).normalized() {
            Some(t) => p.dot(t).abs() / distance,
            None => 1.0,
        }
    } else {
        0.0
    };
    let h_at = if u >= 0.0 {
        kappa[a] + (kappa[ip] - kappa[a]) * (u / hp)
    } else {
        kappa[a] + (kappa[im] - kappa[a]) * (-u / hm)
    };
    let residual = residual(curve, &spec)?;
    let pass = residual < ROTATOR_RESIDUAL_GATE
        && h_at.abs() < 1e-3 * max_abs_kappa
        && tangency_defect < 1e-6;
    Ok(RotatorReport {
        argmin: a,
        offset: u,
        distance,
        h_at_argmin: h_at,
        tangency_defect,
        max_abs_kappa,
        residual,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;

    #[test]
    fn gradient_weights_are_exact_on_quadratics() {
        let pts: Vec<Vec2> = [0.0, 0.3, 0.45, 1.0, 1.2, 2.0]
            .iter()
            .map(|&x| Vec2::new(x, 0.0))
            .collect();
        let c = Curve::open(pts.clone(), false).unwrap();
        let vals: Vec<f64> = pts.iter().map(|p| 1.0 + 2.0 * p.x - 3.0 * p.x * p.x).collect();
        let g = arclength_gradient(&c, &vals);
        for i in 1..pts.len() - 1 {
            assert!((g[i] - (2.0 - 6.0 * pts[i].x)).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_is_not_a_rotator() {
        let c = Curve::circle(Vec2::ZERO, 2.0, 256).unwrap();
        let r = rotator_minimality_check(&c, 1.0).unwrap();
        assert!(!r.pass);
        assert!((r.residual - 0.5).abs() < 1e-3);
        assert!((r.h_at_argmin - 0.5).abs() < 1e-3);
    }

    #[test]
    fn collar_argmin_is_inconclusive() {
        let pts = (0..10).map(|i| Vec2::new(1.0 + i as f64, 0.1 * i as f64)).collect();
        let c = Curve::open(pts, true).unwrap();
        assert!(matches!(rotator_minimality_check(&c, 1.0), Err(Error::Inconclusive(_))));
    }
}
