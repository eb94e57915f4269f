use alloc::vec::Vec;

use crate::geometry::{FlowHistory, Similarity, Topology};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "lowercase")
)]
pub enum Direction {
    /// Iterate the correspondence `phi`.
    Forward,
    /// Iterate `phi^{-1}`.
    Backward,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OrbitReport {
    pub p0: usize,
    pub direction: Direction,
    /// Sample indices `phi^{±j}(p0)`, `j = 0, 1, ...`, while they stay on the curve.
    pub indices: Vec<usize>,
    /// `|x|` at those indices on the first slice.
    pub norms: Vec<f64>,
    pub sup: f64,
    /// The orbit left the sampled index range of an open curve.
    pub escaped: bool,
    /// Max over the last half of the iterates is at most 1.05 times the max
    /// over the first half (and the orbit did not escape).
    pub bounded: bool,
}

/// Follow `p0` under powers of the index correspondence of `similarity` and
/// record `|x|` on the first slice of `history`.
pub fn orbit_boundedness(
    history: &FlowHistory,
    similarity: &Similarity,
    p0: usize,
    direction: Direction,
    j: usize,
) -> Result<OrbitReport> {
    if j == 0 {
        return Err(Error::param("j", "need at least one iterate"));
    }
    let n = history.count();
    if p0 >= n {
        return Err(Error::OutOfRange(alloc::format!("p0 = {p0} with {n} samples")));
    }
    let map = match direction {
        Direction::Forward => similarity.shift,
        Direction::Backward => similarity.shift.inverse(),
    };
    let pts = history.first().curve.points();
    let mut indices = alloc::vec![p0];
    let mut escaped = false;
    let mut idx = p0 as i64;
    for _ in 0..j {
        idx = map.apply_unwrapped(idx);
        match history.topology() {
            Topology::Closed => idx = idx.rem_euclid(n as i64),
            Topology::Open => {
                if idx < 0 || idx >= n as i64 {
                    escaped = true;
                    break;
                }
            }
        }
        indices.push(idx as usize);
    }
    let norms: Vec<f64> = indices.iter().map(|&i| pts[i].norm()).collect();
    let sup = norms.iter().cloned().fold(0.0, f64::max);
    let half = norms.len() / 2;
    let first = norms[..half.max(1)].iter().cloned().fold(0.0, f64::max);
    let last = norms[half..].iter().cloned().fold(0.0, f64::max);
    Ok(OrbitReport {
        p0,
        direction,
        indices,
        norms,
        sup,
        escaped,
        bounded: !escaped && last <= 1.05 * first,
    })
}
