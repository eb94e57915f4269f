use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Range;
#[allow(unused_imports)]
use num_traits::Float;

use super::Vec2;
use crate::{Error, Result};

/// Number of samples at each end of an open curve excluded from pointwise diagnostics.
pub const BOUNDARY_COLLAR: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum Topology {
    Closed,
    Open,
}

impl Topology {
    pub fn min_points(self) -> usize {
        match self {
            Topology::Closed => 4,
            Topology::Open => 3,
        }
    }
}

/// An immersed polyline in the plane, closed or open.
///
/// Open curves flagged `truncated` stand for a finite window of a noncompact
/// immersion. Construction enforces the invariants: enough points, finite
/// coordinates, and no repeated consecutive points (including the closing
/// segment of a closed curve).
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    points: Vec<Vec2>,
    topology: Topology,
    truncated: bool,
}

/// Curvature data at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSample {
    /// Signed curvature, positive when the curve turns towards `normal`.
    pub kappa: f64,
    /// Unit tangent (bisector of the adjacent chords).
    pub tangent: Vec2,
    /// Unit normal, the tangent rotated by +90 degrees.
    pub normal: Vec2,
}

impl CurvatureSample {
    /// The curvature vector `kappa * n`.
    pub fn vector(&self) -> Vec2 {
        self.normal * self.kappa
    }
}

impl Curve {
    pub fn new(points: Vec<Vec2>, topology: Topology, truncated: bool) -> Result<Self> {
        let n = points.len();
        if n < topology.min_points() {
            return Err(Error::InvalidCurve(format!(
                "{topology:?} curve needs at least {} points, got {n}",
                topology.min_points()
            )));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidCurve(format!("non-finite coordinate at index {i}")));
        }
        let segments = match topology {
            Topology::Closed => n,
            Topology::Open => n - 1,
        };
        for i in 0..segments {
            let j = (i + 1) % n;
            if !(points[j].distance(points[i]) > 0.0) {
                return Err(Error::InvalidCurve(format!(
                    "repeated consecutive points at indices {i} and {j}"
                )));
            }
        }
        let truncated = truncated && topology == Topology::Open;
        Ok(Curve {
            points,
            topology,
            truncated,
        })
    }

    pub fn closed(points: Vec<Vec2>) -> Result<Self> {
        Curve::new(points, Topology::Closed, false)
    }

    pub fn open(points: Vec<Vec2>, truncated: bool) -> Result<Self> {
        Curve::new(points, Topology::Open, truncated)
    }

    /// Counterclockwise circle sampled at `n` equally spaced angles starting on
    /// the positive x-direction.
    pub fn circle(center: Vec2, radius: f64, n: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::param("radius", "must be positive"));
        }
        let pts = (0..n)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / n as f64;
                center + Vec2::from_angle(th) * radius
            })
            .collect();
        Curve::closed(pts)
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Vec2> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn is_closed(&self) -> bool {
        self.topology == Topology::Closed
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// Same topology and flags, new points (validated).
    pub fn with_points(&self, points: Vec<Vec2>) -> Result<Self> {
        Curve::new(points, self.topology, self.truncated)
    }

    pub fn segment_count(&self) -> usize {
        match self.topology {
            Topology::Closed => self.len(),
            Topology::Open => self.len() - 1,
        }
    }

    /// Length of segment `i` (from point `i` to the next one).
    pub fn segment_lengths(&self) -> Vec<f64> {
        let n = self.len();
        (0..self.segment_count())
            .map(|i| self.points[(i + 1) % n].distance(self.points[i]))
            .collect()
    }

    pub fn length(&self) -> f64 {
        self.segment_lengths().iter().sum()
    }

    pub fn min_segment(&self) -> f64 {
        self.segment_lengths().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn max_segment(&self) -> f64 {
        self.segment_lengths().into_iter().fold(0.0, f64::max)
    }

    pub fn mean_segment(&self) -> f64 {
        self.length() / self.segment_count() as f64
    }

    /// Cumulative chord length at each sample, starting from 0 at index 0.
    pub fn arclength_params(&self) -> Vec<f64> {
        let mut s = Vec::with_capacity(self.len());
        let mut acc = 0.0;
        s.push(0.0);
        for w in self.points.windows(2) {
            acc += w[1].distance(w[0]);
            s.push(acc);
        }
        s
    }

    pub fn centroid(&self) -> Vec2 {
        let sum = self.points.iter().fold(Vec2::ZERO, |a, &p| a + p);
        sum / self.len() as f64
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.points {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        (hi - lo).norm()
    }

    /// Indices used for pointwise diagnostics: all points of a closed curve,
    /// or the points of an open curve outside the boundary collar.
    pub fn interior_range(&self) -> Range<usize> {
        match self.topology {
            Topology::Closed => 0..self.len(),
            Topology::Open => {
                let n = self.len();
                if n > 2 * BOUNDARY_COLLAR {
                    BOUNDARY_COLLAR..n - BOUNDARY_COLLAR
                } else {
                    1..n - 1
                }
            }
        }
    }

    /// Maximum pointwise distance to another curve with the same sample count.
    pub fn max_point_distance(&self, other: &Curve) -> f64 {
        self.points
            .iter()
            .zip(other.points.iter())
            .map(|(a, b)| a.distance(*b))
            .fold(0.0, f64::max)
    }

    /// Open curve with the sample order reversed.
    pub fn reversed(&self) -> Curve {
        let mut pts = self.points.clone();
        pts.reverse();
        Curve {
            points: pts,
            topology: self.topology,
            truncated: self.truncated,
        }
    }
}

/// Resample `curve` at `n` points equally spaced in chord length.
///
/// Closed curves keep point 0 and place the others at `k L / n`; open curves
/// keep both endpoints and place points at `k L / (n - 1)`, with `L` the input
/// polygon length. Inside a segment the new point lies on the circular arc
/// through the segment's endpoints whose curvature is the mean of the
/// three-point curvatures there, so samples of a circle stay on the circle.
pub fn resample_by_arclength(curve: &Curve, n: usize) -> Result<Curve> {
    if n < curve.topology().min_points() {
        return Err(Error::param(
            "n",
            format!("{:?} curve needs at least {} points", curve.topology(), curve.topology().min_points()),
        ));
    }
    let pts = curve.points();
    let m = pts.len();
    let seg = curve.segment_lengths();
    let total: f64 = seg.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Degenerate("curve has zero length".into()));
    }
    let spacing = match curve.topology() {
        Topology::Closed => total / n as f64,
        Topology::Open => total / (n - 1) as f64,
    };
    let kappa: Vec<f64> = signed_curvature(curve)?.iter().map(|c| c.kappa).collect();
    let mut out = Vec::with_capacity(n);
    let mut seg_idx = 0usize;
    let mut seg_start = 0.0;
    for k in 0..n {
        if curve.topology() == Topology::Open && k == n - 1 {
            out.push(pts[m - 1]);
            break;
        }
        let target = k as f64 * spacing;
        while seg_idx + 1 < seg.len() && seg_start + seg[seg_idx] <= target {
            seg_start += seg[seg_idx];
            seg_idx += 1;
        }
        let a = pts[seg_idx];
        let b = pts[(seg_idx + 1) % m];
        let frac = ((target - seg_start) / seg[seg_idx]).clamp(0.0, 1.0);
        let k = 0.5 * (kappa[seg_idx] + kappa[(seg_idx + 1) % m]);
        out.push(if frac == 0.0 { a } else { arc_point(a, b, k, frac) });
    }
    curve.with_points(out)
}

/// Point at fraction `f` of the arc of signed curvature `kappa` from `a` to `b`.
fn arc_point(a: Vec2, b: Vec2, kappa: f64, f: f64) -> Vec2 {
    let chord = b - a;
    let l = chord.norm();
    let phi = (kappa * l / 2.0).clamp(-1.0, 1.0).asin();
    if phi.abs() < 1e-12 {
        return a + chord * f;
    }
    let ratio = (phi * f).sin() / phi.sin();
    let (s, c) = (phi * f - phi).sin_cos();
    a + Vec2::new(c * chord.x - s * chord.y, s * chord.x + c * chord.y) * ratio
}

/// Signed curvature, tangent, and normal at every sample.
///
/// Interior samples use the circle through the sample and its two neighbours;
/// the tangent bisects the adjacent unit chords. Endpoints of open curves use
/// the tangent of the circle through the three end samples and linearly
/// extrapolated curvature.
pub fn signed_curvature(curve: &Curve) -> Result<Vec<CurvatureSample>> {
    let pts = curve.points();
    let n = pts.len();
    let closed = curve.is_closed();
    let mut out = Vec::with_capacity(n);
    let stencil = |i: usize| -> Result<CurvatureSample> {
        let prev = pts[(i + n - 1) % n];
        let here = pts[i];
        let next = pts[(i + 1) % n];
        three_point(prev, here, next).ok_or_else(|| {
            Error::Degenerate(format!("curvature stencil collapses at index {i}"))
        })
    };
    if closed {
        for i in 0..n {
            out.push(stencil(i)?);
        }
        return Ok(out);
    }
    out.push(CurvatureSample {
        kappa: 0.0,
        tangent: Vec2::ZERO,
        normal: Vec2::ZERO,
    });
    for i in 1..n - 1 {
        out.push(stencil(i)?);
    }
    let (k0, kn) = if n >= 4 {
        (
            2.0 * out[1].kappa - out[2].kappa,
            2.0 * out[n - 2].kappa - out[n - 3].kappa,
        )
    } else {
        (out[1].kappa, out[1].kappa)
    };
    let t0 = end_tangent(pts[0], pts[1], out[1].kappa, -1.0);
    let tn = end_tangent(pts[n - 2], pts[n - 1], out[n - 2].kappa, 1.0);
    out[0] = CurvatureSample {
        kappa: k0,
        tangent: t0,
        normal: t0.perp(),
    };
    out.push(CurvatureSample {
        kappa: kn,
        tangent: tn,
        normal: tn.perp(),
    });
    Ok(out)
}

fn three_point(prev: Vec2, here: Vec2, next: Vec2) -> Option<CurvatureSample> {
    let a = here - prev;
    let b = next - here;
    let la = a.norm();
    let lb = b.norm();
    let lc = (next - prev).norm();
    if !(la > 0.0 && lb > 0.0 && lc > 0.0) {
        return None;
    }
    let tangent = (a / la + b / lb).normalized()?;
    let kappa = 2.0 * a.cross(b) / (la * lb * lc);
    Some(CurvatureSample {
        kappa,
        tangent,
        normal: tangent.perp(),
    })
}

/// Tangent of the osculating circle at an endpoint of the chord `a -> b`.
/// `side = -1` returns the tangent at `a`, `side = +1` the tangent at `b`.
fn end_tangent(a: Vec2, b: Vec2, kappa: f64, side: f64) -> Vec2 {
    let chord = b - a;
    let l = chord.norm();
    let u = chord / l;
    let half_turn = (kappa * l / 2.0).clamp(-1.0, 1.0).asin();
    let (s, c) = (side * half_turn).sin_cos();
    Vec2::new(c * u.x - s * u.y, s * u.x + c * u.y)
}

/// Trapezoid weights: half of the adjacent segment lengths at each sample.
pub fn measure_weights(curve: &Curve) -> Vec<f64> {
    let seg = curve.segment_lengths();
    let n = curve.len();
    match curve.topology() {
        Topology::Closed => (0..n)
            .map(|i| 0.5 * (seg[(i + n - 1) % n] + seg[i]))
            .collect(),
        Topology::Open => (0..n)
            .map(|i| {
                let left = if i > 0 { seg[i - 1] } else { 0.0 };
                let right = if i + 1 < n { seg[i] } else { 0.0 };
                0.5 * (left + right)
            })
            .collect(),
    }
}

/// Symmetric Hausdorff distance between two polylines (segments included).
pub fn hausdorff_distance(a: &Curve, b: &Curve) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

fn directed_hausdorff(from: &Curve, to: &Curve) -> f64 {
    let tp = to.points();
    let n = tp.len();
    from.points()
        .iter()
        .map(|&p| {
            (0..to.segment_count())
                .map(|i| point_segment_distance(p, tp[i], tp[(i + 1) % n]))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}
