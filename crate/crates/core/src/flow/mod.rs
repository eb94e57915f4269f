//! Time steppers for curve shortening flow and exact self-similar flows.
//!
//! All steppers move sample `i` of the input to sample `i` of the output, so
//! a [`FlowHistory`] built from them carries material correspondence.

mod analytic;
mod tridiag;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

pub use analytic::{analytic_history, analytic_selfsimilar_flow, scale_and_angle};
pub use tridiag::{solve_cyclic_tridiagonal, solve_tridiagonal};

use crate::geometry::{resample_by_arclength, signed_curvature, Curve, FlowHistory, Topology, Vec2};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "kebab-case")
)]
pub enum Scheme {
    /// Forward Euler on `x_t = kappa n`.
    Explicit,
    /// Backward Euler on the arclength Laplacian, lengths frozen per step.
    SemiImplicit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    /// `cfl * (min segment length)^2`, recomputed every step.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub scheme: Scheme,
    pub dt: TimeStep,
    /// Safety factor of the parabolic step bound, in `(0, 0.5]`.
    pub cfl: f64,
    /// Redistribute samples by arclength every `k` steps.
    pub redistribute: Option<usize>,
    /// Store every `k`-th step in the history (the final state is always stored).
    pub record_every: usize,
    /// Stop when `max |kappa|` exceeds this multiple of its initial value.
    pub curvature_blowup: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            scheme: Scheme::Explicit,
            dt: TimeStep::Auto,
            cfl: 0.2,
            redistribute: None,
            record_every: 1,
            curvature_blowup: 10.0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            return Err(Error::param("cfl", "must lie in (0, 0.5]"));
        }
        if let TimeStep::Fixed(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::param("dt", "must be positive"));
            }
        }
        if self.redistribute == Some(0) {
            return Err(Error::param("redistribute", "interval must be a positive step count"));
        }
        if self.record_every == 0 {
            return Err(Error::param("record_every", "must be positive"));
        }
        if !(self.curvature_blowup > 1.0) {
            return Err(Error::param("curvature_blowup", "must exceed 1"));
        }
        Ok(())
    }
}

/// Largest explicit step allowed by the parabolic bound.
pub fn stable_dt(curve: &Curve, cfl: f64) -> f64 {
    let h = curve.min_segment();
    cfl * h * h
}

/// The mean curvature vector `kappa n` at every sample.
pub fn curvature_velocity(curve: &Curve) -> Result<Vec<Vec2>> {
    Ok(signed_curvature(curve)?.iter().map(|s| s.vector()).collect())
}

fn rejected(reason: impl Into<String>) -> Error {
    Error::StepRejected {
        t: None,
        reason: reason.into(),
    }
}

fn finish_step(curve: &Curve, pts: Vec<Vec2>) -> Result<Curve> {
    curve.with_points(pts).map_err(|e| match e {
        Error::InvalidCurve(msg) => rejected(msg),
        other => other,
    })
}

/// One forward Euler step of `x_t = kappa n`.
pub fn step_csf(curve: &Curve, dt: f64) -> Result<Curve> {
    let v = curvature_velocity(curve)?;
    let pts = curve
        .points()
        .iter()
        .zip(v.iter())
        .map(|(&p, &vel)| p + vel * dt)
        .collect();
    finish_step(curve, pts)
}

/// One step of the drifted flow `x_t = kappa n - (x - x0)^T / (2 (t0 - t))`,
/// which moves the same image as [`step_csf`] up to a tangential reparametrization.
pub fn step_drifted(curve: &Curve, dt: f64, x0: Vec2, t0: f64, t: f64) -> Result<Curve> {
    let tau = t0 - t;
    if !(tau > dt) {
        return Err(Error::param(
            "dt",
            format!("drifted step needs t0 - t > dt (t0 - t = {tau}, dt = {dt})"),
        ));
    }
    let samples = signed_curvature(curve)?;
    let pts = curve
        .points()
        .iter()
        .zip(samples.iter())
        .map(|(&p, s)| {
            let drift = s.tangent * ((p - x0).dot(s.tangent) / (2.0 * tau));
            p + (s.vector() - drift) * dt
        })
        .collect();
    finish_step(curve, pts)
}

/// One backward Euler step of `x_t = Δ_s x` with the arclength Laplacian
/// built from the current segment lengths. Closed curves give a cyclic
/// tridiagonal system; open curves move their endpoints explicitly and solve
/// the interior with those endpoint values.
pub fn step_semi_implicit(curve: &Curve, dt: f64) -> Result<Curve> {
    let pts = curve.points();
    let n = pts.len();
    let seg = curve.segment_lengths();
    match curve.topology() {
        Topology::Closed => {
            let mut a = Vec::with_capacity(n);
            let mut b = Vec::with_capacity(n);
            let mut c = Vec::with_capacity(n);
            for i in 0..n {
                let hl = seg[(i + n - 1) % n];
                let hr = seg[i];
                let w = 2.0 * dt / (hl + hr);
                a.push(-w / hl);
                c.push(-w / hr);
                b.push(1.0 + w / hl + w / hr);
            }
            let xs: Vec<f64> = pts.iter().map(|p| p.x).collect();
            let ys: Vec<f64> = pts.iter().map(|p| p.y).collect();
            let nx = solve_cyclic_tridiagonal(&a, &b, &c, &xs)?;
            let ny = solve_cyclic_tridiagonal(&a, &b, &c, &ys)?;
            finish_step(curve, nx.into_iter().zip(ny).map(|(x, y)| Vec2::new(x, y)).collect())
        }
        Topology::Open => {
            let v = curvature_velocity(curve)?;
            let first = pts[0] + v[0] * dt;
            let last = pts[n - 1] + v[n - 1] * dt;
            let m = n - 2;
            let mut a = Vec::with_capacity(m);
            let mut b = Vec::with_capacity(m);
            let mut c = Vec::with_capacity(m);
            let mut dx = Vec::with_capacity(m);
            let mut dy = Vec::with_capacity(m);
            for i in 1..n - 1 {
                let hl = seg[i - 1];
                let hr = seg[i];
                let w = 2.0 * dt / (hl + hr);
                let (al, cr) = (-w / hl, -w / hr);
                let mut rhs = pts[i];
                if i == 1 {
                    rhs -= first * al;
                }
                if i == n - 2 {
                    rhs -= last * cr;
                }
                a.push(al);
                c.push(cr);
                b.push(1.0 + w / hl + w / hr);
                dx.push(rhs.x);
                dy.push(rhs.y);
            }
            let nx = solve_tridiagonal(&a, &b, &c, &dx)?;
            let ny = solve_tridiagonal(&a, &b, &c, &dy)?;
            let mut out = Vec::with_capacity(n);
            out.push(first);
            out.extend(nx.into_iter().zip(ny).map(|(x, y)| Vec2::new(x, y)));
            out.push(last);
            finish_step(curve, out)
        }
    }
}

fn max_interior_curvature(curve: &Curve) -> Result<f64> {
    let k = signed_curvature(curve)?;
    Ok(curve
        .interior_range()
        .map(|i| k[i].kappa.abs())
        .fold(0.0, f64::max))
}

/// Evolve `curve` from `t_start` to `t_end`.
///
/// The last step is shortened to land exactly on `t_end`. The solver stops
/// and marks `singular_time` when the smallest radius of curvature drops
/// below four mean segment lengths, or when the largest curvature exceeds
/// `curvature_blowup` times its initial value.
pub fn evolve(curve: &Curve, t_start: f64, t_end: f64, opts: &SolverOptions) -> Result<FlowHistory> {
    opts.validate()?;
    if !(t_end >= t_start) {
        return Err(Error::param("t_end", "must not precede t_start"));
    }
    let mut history = FlowHistory::new(t_start, curve.clone())?;
    if t_end == t_start {
        return Ok(history);
    }
    let n = curve.len();
    let initial_kmax = max_interior_curvature(curve)?;
    let mut current = curve.clone();
    let mut t = t_start;
    let mut steps = 0usize;
    let end_tol = 1e-14 * t_end.abs().max(1.0);
    loop {
        let bound = stable_dt(&current, opts.cfl);
        let mut dt = match opts.dt {
            TimeStep::Auto => bound,
            TimeStep::Fixed(dt) => {
                if opts.scheme == Scheme::Explicit && dt > bound {
                    return Err(Error::StepRejected {
                        t: Some(t),
                        reason: format!("fixed dt {dt:e} exceeds the explicit bound {bound:e}"),
                    });
                }
                dt
            }
        };
        let last = t + dt >= t_end - end_tol;
        if last {
            dt = t_end - t;
        }
        let stepped = match opts.scheme {
            Scheme::Explicit => step_csf(&current, dt),
            Scheme::SemiImplicit => step_semi_implicit(&current, dt),
        };
        current = stepped.map_err(|e| match e {
            Error::StepRejected { reason, .. } => Error::StepRejected { t: Some(t), reason },
            other => other,
        })?;
        t = if last { t_end } else { t + dt };
        steps += 1;
        if let Some(k) = opts.redistribute {
            if steps.is_multiple_of(k) && !last {
                current = resample_by_arclength(&current, n)?;
                history.resample_events.push(t);
            }
        }
        let kmax = max_interior_curvature(&current)?;
        let singular = (kmax > 0.0 && 1.0 / kmax < 4.0 * current.mean_segment())
            || (initial_kmax > 0.0 && kmax > opts.curvature_blowup * initial_kmax);
        if singular || last || steps.is_multiple_of(opts.record_every) {
            history.push(t, current.clone())?;
        }
        if singular {
            history.singular_time = Some(t);
            return Ok(history);
        }
        if last {
            return Ok(history);
        }
    }
}
