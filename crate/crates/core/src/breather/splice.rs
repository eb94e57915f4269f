use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::entropy::deficit;
use crate::geometry::{apply_similarity, signed_curvature, Curve, FlowHistory, Similarity, Vec2};
use crate::{Error, Result};

/// `|alpha - 1|` below this counts as a steady breather.
pub const STEADY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum SpliceMode {
    /// Ancient solution in backward time `tau = 1 - t`.
    Shrinking,
    /// Immortal solution on `[0, t_J]`.
    Expanding,
    /// Ancient solution on `[-J, 1]`.
    #[cfg_attr(feature = "serde", serde(rename = "steady"))]
    SteadyBackward,
    /// Eternal solution on `[-J, J + 1]`.
    #[cfg_attr(feature = "serde", serde(rename = "eternal"))]
    SteadyEternal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpliceResult {
    pub history: FlowHistory,
    pub mode: SpliceMode,
    /// Period data as detected on the input: `x(., 1)[i] = alpha R x(., 0)[shift(i)] + V`.
    pub similarity: Similarity,
    pub copies: usize,
    pub junction_times: Vec<f64>,
    /// At each junction, the largest distance between the slice given by the
    /// period ending there and the one starting there. Only the later one is
    /// stored in `history`.
    pub junction_gaps: Vec<f64>,
}

/// `tau_j = sum_{k <= j} alpha^{-2k}` for `j = 0..=J`, accumulated term by term.
pub fn shrinking_junction_times(alpha: f64, j_max: usize) -> Vec<f64> {
    geometric_partial_sums(alpha.powi(-2), j_max)
}

/// `t_j = sum_{k <= j} alpha^{2k}` for `j = 0..=J`.
pub fn expanding_junction_times(alpha: f64, j_max: usize) -> Vec<f64> {
    geometric_partial_sums(alpha * alpha, j_max)
}

fn geometric_partial_sums(q: f64, j_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(j_max + 1);
    let mut term = 1.0;
    let mut acc = 0.0;
    for _ in 0..=j_max {
        acc += term;
        out.push(acc);
        term *= q;
    }
    out
}

struct Period {
    map: Similarity,
    start: f64,
    scale: f64,
}

fn check_period(period: &FlowHistory) -> Result<()> {
    let (a, b) = (period.first().t, period.last().t);
    if (a - 0.0).abs() > 1e-9 || (b - 1.0).abs() > 1e-9 || period.len() < 2 {
        return Err(Error::InvalidHistory(format!(
            "a breather period must run over [0, 1] with at least two slices (got [{a}, {b}], {} slices)",
            period.len()
        )));
    }
    Ok(())
}

/// Lay copies of `base` (local parameter in `[0, 1]`, ascending) end to end.
fn assemble(
    base: &[(f64, &Curve)],
    periods: &[Period],
    mode: SpliceMode,
    similarity: Similarity,
    copies: usize,
) -> Result<SpliceResult> {
    let mut slices = Vec::new();
    let mut junction_times = Vec::new();
    let mut junction_gaps = Vec::new();
    let last = periods.len() - 1;
    for (j, p) in periods.iter().enumerate() {
        for &(sigma, curve) in base {
            if j < last && sigma >= 1.0 {
                continue;
            }
            slices.push((p.start + p.scale * sigma, apply_similarity(curve, &p.map)?));
        }
        if j < last {
            let next = &periods[j + 1];
            let end = apply_similarity(base[base.len() - 1].1, &p.map)?;
            let start = apply_similarity(base[0].1, &next.map)?;
            junction_times.push(next.start);
            junction_gaps.push(end.max_point_distance(&start));
        }
    }
    Ok(SpliceResult {
        history: FlowHistory::from_slices(slices)?,
        mode,
        similarity,
        copies,
        junction_times,
        junction_gaps,
    })
}

/// Ancient solution from a shrinking breather period `x` on `[0, 1]`.
///
/// In backward time `tau = 1 - t`, with `y_0(tau) = x(1 - tau)` and
/// `S = s^{-1}`, the copy `j` is `y_j(tau) = S^j y_0(alpha^{2j} (tau - tau_{j-1}))`
/// on `[tau_{j-1}, tau_j]`, `tau_{-1} = 0`. The result covers `[0, tau_J]`.
pub fn splice_shrinking(period: &FlowHistory, s: &Similarity, copies: usize) -> Result<SpliceResult> {
    check_period(period)?;
    if !(s.alpha < 1.0) {
        return Err(Error::param("alpha", "shrinking splice needs alpha < 1"));
    }
    check_shift(period, s)?;
    let base: Vec<(f64, &Curve)> = period
        .slices()
        .iter()
        .rev()
        .map(|sl| (clamp01(1.0 - sl.t), &sl.curve))
        .collect();
    let step = s.inverse();
    let taus = shrinking_junction_times(s.alpha, copies);
    let mut map = Similarity::identity();
    let mut periods = Vec::with_capacity(copies + 1);
    let mut scale = 1.0;
    for j in 0..=copies {
        if j > 0 {
            map = map.then(&step);
            scale /= s.alpha * s.alpha;
        }
        periods.push(Period {
            map,
            start: if j == 0 { 0.0 } else { taus[j - 1] },
            scale,
        });
    }
    assemble(&base, &periods, SpliceMode::Shrinking, *s, copies)
}

/// Immortal solution from an expanding breather period on `[0, 1]`:
/// `x_j(t) = s^j x_0(alpha^{-2j} (t - t_{j-1}))` on `[t_{j-1}, t_j]`.
pub fn splice_expanding(period: &FlowHistory, s: &Similarity, copies: usize) -> Result<SpliceResult> {
    check_period(period)?;
    if !(s.alpha > 1.0) {
        return Err(Error::param("alpha", "expanding splice needs alpha > 1"));
    }
    check_shift(period, s)?;
    let base = forward_base(period);
    let ts = expanding_junction_times(s.alpha, copies);
    let mut map = Similarity::identity();
    let mut periods = Vec::with_capacity(copies + 1);
    let mut scale = 1.0;
    for j in 0..=copies {
        if j > 0 {
            map = map.then(s);
            scale *= s.alpha * s.alpha;
        }
        periods.push(Period {
            map,
            start: if j == 0 { 0.0 } else { ts[j - 1] },
            scale,
        });
    }
    assemble(&base, &periods, SpliceMode::Expanding, *s, copies)
}

/// Ancient (`[-J, 1]`) or eternal (`[-J, J + 1]`) solution from a steady
/// breather: `x_m(t) = s^m x_0(t - m)` on `[m, m + 1]`. The scale is taken to
/// be exactly 1.
pub fn splice_steady(period: &FlowHistory, s: &Similarity, copies: usize, eternal: bool) -> Result<SpliceResult> {
    check_period(period)?;
    if !((s.alpha - 1.0).abs() < STEADY_TOL) {
        return Err(Error::param(
            "alpha",
            format!("steady splice needs |alpha - 1| < {STEADY_TOL:e} (alpha = {})", s.alpha),
        ));
    }
    check_shift(period, s)?;
    let mut unit = *s;
    unit.alpha = 1.0;
    let base = forward_base(period);
    let hi = if eternal { copies as i64 } else { 0 };
    let periods: Vec<Period> = (-(copies as i64)..=hi)
        .map(|m| Period {
            map: unit.pow(m),
            start: m as f64,
            scale: 1.0,
        })
        .collect();
    let mode = if eternal {
        SpliceMode::SteadyEternal
    } else {
        SpliceMode::SteadyBackward
    };
    assemble(&base, &periods, mode, *s, copies)
}

/// Dispatch on `mode`.
pub fn splice(period: &FlowHistory, s: &Similarity, mode: SpliceMode, copies: usize) -> Result<SpliceResult> {
    match mode {
        SpliceMode::Shrinking => splice_shrinking(period, s, copies),
        SpliceMode::Expanding => splice_expanding(period, s, copies),
        SpliceMode::SteadyBackward => splice_steady(period, s, copies, false),
        SpliceMode::SteadyEternal => splice_steady(period, s, copies, true),
    }
}

fn forward_base(period: &FlowHistory) -> Vec<(f64, &Curve)> {
    period
        .slices()
        .iter()
        .map(|sl| (clamp01(sl.t), &sl.curve))
        .collect()
}

fn clamp01(v: f64) -> f64 {
    if v.abs() < 1e-9 {
        0.0
    } else if (v - 1.0).abs() < 1e-9 {
        1.0
    } else {
        v
    }
}

fn check_shift(period: &FlowHistory, s: &Similarity) -> Result<()> {
    s.validate()?;
    if !s.shift.acts_on(period.topology(), period.count()) {
        return Err(Error::IncompatibleShift {
            offset: s.shift.offset,
            count: period.count(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct JunctionReport {
    pub time: f64,
    pub order: u8,
    /// Position mismatch between the two formulas (exact algebra, from the splice).
    pub position_gap: f64,
    /// Largest pointwise difference of the one-sided difference quotients.
    pub discrepancy: f64,
    /// Largest adjacent time step, the scale of the expected first-order error.
    pub dt_scale: f64,
}

/// Compare one-sided time difference quotients on either side of every
/// junction: of position (`order = 1`) or of the curvature vector (`order = 2`).
pub fn junction_smoothness(splice: &SpliceResult, order: u8) -> Result<Vec<JunctionReport>> {
    if order != 1 && order != 2 {
        return Err(Error::param("order", "must be 1 or 2"));
    }
    let h = &splice.history;
    let slices = h.slices();
    let mut out = Vec::with_capacity(splice.junction_times.len());
    for (j, &tj) in splice.junction_times.iter().enumerate() {
        let k = h.index_of_time(tj)?;
        if k < 2 || k + 2 >= slices.len() {
            return Err(Error::OutOfRange(format!(
                "junction at t = {tj} needs two slices on each side"
            )));
        }
        let field = |c: &Curve| -> Result<Vec<Vec2>> {
            if order == 1 {
                Ok(c.points().to_vec())
            } else {
                Ok(signed_curvature(c)?.iter().map(|s| s.vector()).collect())
            }
        };
        let (fm, f0, fp) = (
            field(&slices[k - 1].curve)?,
            field(&slices[k].curve)?,
            field(&slices[k + 1].curve)?,
        );
        let dm = slices[k].t - slices[k - 1].t;
        let dp = slices[k + 1].t - slices[k].t;
        let range = slices[k].curve.interior_range();
        let discrepancy = range
            .map(|i| ((fp[i] - f0[i]) / dp - (f0[i] - fm[i]) / dm).norm())
            .fold(0.0, f64::max);
        out.push(JunctionReport {
            time: tj,
            order,
            position_gap: splice.junction_gaps.get(j).copied().unwrap_or(0.0),
            discrepancy,
            dt_scale: dm.max(dp),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RescaleResult {
    pub j: usize,
    /// Rescaled flow on `[1, tau_{j+1} / tau_j]`.
    pub history: FlowHistory,
    pub tau_j: f64,
    /// `alpha^{2(j+1)} tau_j`, which tends to `c0`.
    pub scale_factor: f64,
    /// `(alpha^{-2} - 1)^{-1}`.
    pub c0: f64,
    /// `tau_j^{-1/2} sum_{k <= j} alpha^{-k} R'^k V'` for the step map
    /// `p -> alpha^{-1} R' p + V'` of the splice.
    pub drift: Vec2,
    /// `|drift| / |V'|`, absent when `V' = 0`.
    pub drift_ratio: Option<f64>,
}

/// `y~_j(p, tau) = tau_j^{-1/2} y(phi^{j+1}(p), tau_j tau)` over the copy
/// `j + 1` of a shrinking splice, with the index map undone so that sample
/// `i` of every slice comes from sample `i` of the input period.
pub fn rescale_sequence(splice: &SpliceResult, j: usize) -> Result<RescaleResult> {
    if splice.mode != SpliceMode::Shrinking {
        return Err(Error::param("splice", "rescaling applies to shrinking splices"));
    }
    if j + 1 > splice.copies {
        return Err(Error::OutOfRange(format!(
            "rescaling index {j} needs at least {} copies (have {})",
            j + 1,
            splice.copies
        )));
    }
    let alpha = splice.similarity.alpha;
    let taus = shrinking_junction_times(alpha, j + 1);
    let (tau_j, tau_next) = (taus[j], taus[j + 1]);
    let step = splice.similarity.inverse();
    let power = step.pow(j as i64 + 1);
    let undo = power.shift.inverse();
    let n = splice.history.count();
    let inv_root = 1.0 / tau_j.sqrt();
    let tol = 1e-9 * tau_next;
    let mut slices = Vec::new();
    for sl in splice.history.slices() {
        if sl.t < tau_j - tol || sl.t > tau_next + tol {
            continue;
        }
        let src = sl.curve.points();
        let pts = (0..n).map(|i| src[undo.apply(i, n)] * inv_root).collect();
        slices.push((sl.t / tau_j, sl.curve.with_points(pts)?));
    }
    let v = step.translation;
    let drift = power.translation * inv_root;
    Ok(RescaleResult {
        j,
        history: FlowHistory::from_slices(slices)?,
        tau_j,
        scale_factor: alpha.powi(2 * (j as i32 + 1)) * tau_j,
        c0: 1.0 / (alpha.powi(-2) - 1.0),
        drift,
        drift_ratio: if v.norm() > 0.0 {
            Some(drift.norm() / v.norm())
        } else {
            None
        },
    })
}

/// Time integral over `[lo, hi]` of the deficit of a rescaled (backward-time)
/// history, with center `0` and kernel scale equal to the rescaled time.
pub fn rescaled_deficit(history: &FlowHistory, lo: f64, hi: f64) -> Result<f64> {
    let w = history.window(lo, hi)?;
    let mut prev: Option<(f64, f64)> = None;
    let mut acc = 0.0;
    for sl in w.slices() {
        let d = deficit(&sl.curve, -sl.t, Vec2::ZERO, 0.0)?;
        if let Some((t0, d0)) = prev {
            acc += 0.5 * (d + d0) * (sl.t - t0);
        }
        prev = Some((sl.t, d));
    }
    Ok(acc)
}
