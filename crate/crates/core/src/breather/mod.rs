//! Breather detection between two slices, spliced ancient, immortal and
//! eternal solutions, junction diagnostics, rescaled sequences, and orbits of
//! the index correspondence.

mod orbit;
mod splice;

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

pub use orbit::{orbit_boundedness, Direction, OrbitReport};
pub use splice::{
    expanding_junction_times, junction_smoothness, rescale_sequence, rescaled_deficit,
    shrinking_junction_times, splice, splice_expanding, splice_shrinking, splice_steady,
    JunctionReport, RescaleResult, SpliceMode, SpliceResult, STEADY_TOL,
};

use crate::geometry::{Curve, IndexShift, Mat2, Similarity, Topology, Vec2};
use crate::{Error, Result};

struct Centered {
    p: Vec<Vec2>,
    q: Vec<Vec2>,
    c1: Vec2,
    c2: Vec2,
    sp: f64,
    sq: f64,
}

fn mean(pts: &[Vec2]) -> Vec2 {
    pts.iter().fold(Vec2::ZERO, |a, &p| a + p) / pts.len() as f64
}

fn center(slice1: &Curve, slice2: &Curve) -> Result<Centered> {
    if slice1.len() != slice2.len() || slice1.topology() != slice2.topology() {
        return Err(Error::param(
            "slices",
            "both slices need the same point count and topology (resample first)",
        ));
    }
    if !(slice1.length() > 0.0) {
        return Err(Error::Degenerate("first slice has zero length".into()));
    }
    let c1 = mean(slice1.points());
    let c2 = mean(slice2.points());
    let p: Vec<Vec2> = slice1.points().iter().map(|&x| x - c1).collect();
    let q: Vec<Vec2> = slice2.points().iter().map(|&x| x - c2).collect();
    let sp = p.iter().map(|v| v.norm_sq()).sum();
    let sq = q.iter().map(|v| v.norm_sq()).sum();
    Ok(Centered { p, q, c1, c2, sp, sq })
}

/// Optimal rotation angle and squared residual sum for one correspondence.
fn align(c: &Centered, alpha: f64, shift: IndexShift, reflect: bool) -> (f64, f64) {
    let n = c.p.len();
    let (mut sd, mut sc) = (0.0, 0.0);
    for (i, q) in c.q.iter().enumerate() {
        let mut p = c.p[shift.apply(i, n)];
        if reflect {
            p.y = -p.y;
        }
        sd += p.dot(*q);
        sc += p.cross(*q);
    }
    let theta = sc.atan2(sd);
    let ss = alpha * alpha * c.sp + c.sq - 2.0 * alpha * sd.hypot(sc);
    (theta, ss.max(0.0))
}

fn candidates(topology: Topology, n: usize, allow_reflection: bool) -> Vec<(IndexShift, bool)> {
    let mut out = Vec::new();
    match topology {
        Topology::Closed => {
            for k in 0..n as i64 {
                for reversed in [false, true] {
                    out.push((IndexShift::new(k, reversed), false));
                    if allow_reflection {
                        out.push((IndexShift::new(k, reversed), true));
                    }
                }
            }
        }
        Topology::Open => {
            for shift in [IndexShift::IDENTITY, IndexShift::new(n as i64 - 1, true)] {
                out.push((shift, false));
                if allow_reflection {
                    out.push((shift, true));
                }
            }
        }
    }
    out
}

/// Recover `(alpha, R, V, shift)` with `slice2[i] ~ alpha R slice1[shift(i)] + V`.
///
/// `alpha` is the length ratio. Every cyclic shift, in both orientations of
/// the index map, is aligned by the closed-form orthogonal Procrustes
/// rotation about the centroids; reflections (`det R = -1`) are tried only
/// when `allow_reflection` is set. Ties go to the smallest offset, then to the
/// proper rotation. The returned `residual` is the RMS misfit in the length
/// units of `slice2`.
pub fn detect(slice1: &Curve, slice2: &Curve, allow_reflection: bool) -> Result<Similarity> {
    let c = center(slice1, slice2)?;
    let alpha = slice2.length() / slice1.length();
    let n = slice1.len();
    let tol = 1e-12 * (alpha * alpha * c.sp + c.sq);
    let mut best: Option<(IndexShift, bool, f64, f64)> = None;
    for (shift, reflect) in candidates(slice1.topology(), n, allow_reflection) {
        let (theta, ss) = align(&c, alpha, shift, reflect);
        if best.is_none_or(|b| ss < b.3 - tol) {
            best = Some((shift, reflect, theta, ss));
        }
    }
    let (shift, reflect, theta, _) = best.expect("at least one candidate");
    let mut rotation = Mat2::rotation(theta);
    if reflect {
        rotation = rotation.mul_mat(&Mat2::flip_y());
    }
    let translation = c.c2 - rotation.mul_vec(c.c1) * alpha;
    let mut sim = Similarity::new(alpha, rotation, translation, shift)?;
    let pts1 = slice1.points();
    let ss: f64 = slice2
        .points()
        .iter()
        .enumerate()
        .map(|(i, q)| (sim.map_point(pts1[shift.apply(i, n)]) - *q).norm_sq())
        .sum();
    sim.residual = (ss / n as f64).sqrt();
    Ok(sim)
}

/// Fractional index offset from a quadratic fit of the squared residual at the
/// detected offset and its two neighbours (closed curves only).
pub fn refine_shift(slice1: &Curve, slice2: &Curve, sim: &Similarity) -> Result<f64> {
    if slice1.topology() != Topology::Closed {
        return Err(Error::param("slices", "sub-sample refinement needs closed curves"));
    }
    let c = center(slice1, slice2)?;
    let reflect = sim.is_reflection();
    let k = sim.shift.offset;
    let at = |d: i64| align(&c, sim.alpha, IndexShift::new(k + d, sim.shift.reversed), reflect).1;
    let (rm, r0, rp) = (at(-1), at(0), at(1));
    let curv = rm - 2.0 * r0 + rp;
    let delta = if curv > 0.0 {
        (0.5 * (rm - rp) / curv).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    Ok(k as f64 + delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::apply_similarity;
    use core::f64::consts::PI;

    fn blob(n: usize) -> Curve {
        let pts = (0..n)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / n as f64;
                let r = 1.0 + 0.3 * (2.0 * th).cos() + 0.15 * (3.0 * th).sin();
                Vec2::new(r * th.cos() + 0.4, r * th.sin() - 0.2)
            })
            .collect();
        Curve::closed(pts).unwrap()
    }

    #[test]
    fn identity_is_recovered() {
        let c = blob(128);
        let s = detect(&c, &c, false).unwrap();
        assert!((s.alpha - 1.0).abs() < 1e-12);
        assert!(s.rotation.max_abs_diff(&Mat2::IDENTITY) < 1e-12);
        assert_eq!(s.shift, IndexShift::IDENTITY);
        assert!(s.residual < 1e-14);
    }

    #[test]
    fn synthetic_round_trip() {
        let c = blob(200);
        for (k, rev, refl) in [(17, false, false), (150, true, false), (3, false, true)] {
            let mut r = Mat2::rotation(1.1 + k as f64 * 0.01);
            if refl {
                r = r.mul_mat(&Mat2::flip_y());
            }
            let s = Similarity::new(0.63, r, Vec2::new(2.0, -1.5), IndexShift::new(k, rev)).unwrap();
            let c2 = apply_similarity(&c, &s).unwrap();
            let d = detect(&c, &c2, refl).unwrap();
            assert!((d.alpha - s.alpha).abs() < 1e-10);
            assert!(d.rotation.max_abs_diff(&s.rotation) < 1e-9);
            assert!(d.translation.distance(s.translation) < 1e-9);
            assert_eq!(d.shift.reduced(200), s.shift.reduced(200));
            let f = refine_shift(&c, &c2, &d).unwrap();
            assert!((f - d.shift.offset as f64).abs() < 0.05);
        }
    }

    #[test]
    fn mismatched_slices_are_rejected() {
        assert!(detect(&blob(10), &blob(11), false).is_err());
    }
}
