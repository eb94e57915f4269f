#![allow(dead_code)]

use std::f64::consts::PI;

use csflab_core::{Curve, Vec2};
use proptest::prelude::*;

/// Star-shaped closed curve `r(th) = 1 + sum a_k cos(k th + p_k)`, counterclockwise.
pub fn polar_curve(n: usize, center: Vec2, modes: &[(f64, f64)]) -> Curve {
    let pts = (0..n)
        .map(|i| {
            let th = 2.0 * PI * i as f64 / n as f64;
            let r = 1.0
                + modes
                    .iter()
                    .enumerate()
                    .map(|(k, &(a, p))| a * ((k as f64 + 2.0) * th + p).cos())
                    .sum::<f64>();
            center + Vec2::new(r * th.cos(), r * th.sin())
        })
        .collect();
    Curve::closed(pts).unwrap()
}

pub fn ellipse(n: usize, a: f64, b: f64) -> Curve {
    let pts = (0..n)
        .map(|i| {
            let th = 2.0 * PI * i as f64 / n as f64;
            Vec2::new(a * th.cos(), b * th.sin())
        })
        .collect();
    Curve::closed(pts).unwrap()
}

pub fn line(n: usize, half: f64, dir: Vec2, through: Vec2) -> Curve {
    let pts = (0..n)
        .map(|i| through + dir * (-half + 2.0 * half * i as f64 / (n - 1) as f64))
        .collect();
    Curve::open(pts, true).unwrap()
}

/// Modes for `polar_curve` small enough that the curve stays strictly convex
/// (`sum |a_k| (k+2)^2 < 1`).
pub fn convex_modes() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, 0.0..2.0 * PI), 1..4).prop_map(|raw| {
        let weight: f64 = raw
            .iter()
            .enumerate()
            .map(|(k, (a, _))| a.abs() * ((k + 2) * (k + 2)) as f64)
            .sum();
        let scale = if weight > 0.0 { 0.6 / weight.max(1.0) } else { 0.0 };
        raw.into_iter().map(|(a, p)| (a * scale, p)).collect()
    })
}

/// Modes with no convexity constraint (still embedded: `sum |a_k| < 0.5`).
pub fn wiggly_modes() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-0.15f64..0.15, 0.0..2.0 * PI), 1..4)
}

pub fn vec2(range: f64) -> impl Strategy<Value = Vec2> {
    (-range..range, -range..range).prop_map(|(x, y)| Vec2::new(x, y))
}
