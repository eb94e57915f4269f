use alloc::format;
use alloc::vec::Vec;

use super::{Curve, Mat2, Topology, Vec2};
use crate::{Error, Result};

const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Discrete self-map of sample indices: `i -> offset + i`, or `i -> offset - i`
/// when `reversed`. Indices are taken modulo the point count on closed curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IndexShift {
    pub offset: i64,
    pub reversed: bool,
}

impl IndexShift {
    pub const IDENTITY: IndexShift = IndexShift {
        offset: 0,
        reversed: false,
    };

    pub fn new(offset: i64, reversed: bool) -> Self {
        IndexShift { offset, reversed }
    }

    fn sign(self) -> i64 {
        if self.reversed {
            -1
        } else {
            1
        }
    }

    /// Image of `i` without wrapping.
    pub fn apply_unwrapped(self, i: i64) -> i64 {
        self.offset + self.sign() * i
    }

    /// Image of `i` modulo `n`.
    pub fn apply(self, i: usize, n: usize) -> usize {
        self.apply_unwrapped(i as i64).rem_euclid(n as i64) as usize
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn after(self, other: IndexShift) -> IndexShift {
        IndexShift {
            offset: self.offset + self.sign() * other.offset,
            reversed: self.reversed != other.reversed,
        }
    }

    pub fn inverse(self) -> IndexShift {
        IndexShift {
            offset: -self.sign() * self.offset,
            reversed: self.reversed,
        }
    }

    /// Canonical form with the offset reduced modulo `n`.
    pub fn reduced(self, n: usize) -> IndexShift {
        IndexShift {
            offset: self.offset.rem_euclid(n as i64),
            reversed: self.reversed,
        }
    }

    /// Whether the map permutes `0..n` on a curve of the given topology.
    pub fn acts_on(self, topology: Topology, n: usize) -> bool {
        match topology {
            Topology::Closed => true,
            Topology::Open => {
                if self.reversed {
                    self.offset == n as i64 - 1
                } else {
                    self.offset == 0
                }
            }
        }
    }
}

/// Scaled isometry with an index correspondence:
/// `out[i] = alpha * R * c[shift(i)] + V`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Similarity {
    pub alpha: f64,
    pub rotation: Mat2,
    pub translation: Vec2,
    pub shift: IndexShift,
    /// RMS alignment error in absolute length units (0 for exact maps).
    pub residual: f64,
}

impl Similarity {
    pub fn new(alpha: f64, rotation: Mat2, translation: Vec2, shift: IndexShift) -> Result<Self> {
        let s = Similarity {
            alpha,
            rotation,
            translation,
            shift,
            residual: 0.0,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn identity() -> Self {
        Similarity {
            alpha: 1.0,
            rotation: Mat2::IDENTITY,
            translation: Vec2::ZERO,
            shift: IndexShift::IDENTITY,
            residual: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::param("alpha", "scale must be positive and finite"));
        }
        let defect = self.rotation.orthogonality_defect();
        if !(defect <= ORTHOGONALITY_TOL) {
            return Err(Error::param(
                "rotation",
                format!("not orthogonal (max |RᵀR - I| = {defect:e})"),
            ));
        }
        if !((self.rotation.det().abs() - 1.0).abs() <= ORTHOGONALITY_TOL) {
            return Err(Error::param("rotation", "determinant is not ±1"));
        }
        if !self.translation.is_finite() {
            return Err(Error::param("translation", "non-finite"));
        }
        if !(self.residual >= 0.0) {
            return Err(Error::param("residual", "must be nonnegative"));
        }
        Ok(())
    }

    /// Map a point (ignoring the index correspondence).
    pub fn map_point(&self, p: Vec2) -> Vec2 {
        self.rotation.mul_vec(p) * self.alpha + self.translation
    }

    /// Apply `self` first, then `next`.
    pub fn then(&self, next: &Similarity) -> Similarity {
        Similarity {
            alpha: next.alpha * self.alpha,
            rotation: next.rotation.mul_mat(&self.rotation),
            translation: next.map_point(self.translation),
            shift: self.shift.after(next.shift),
            residual: 0.0,
        }
    }

    pub fn inverse(&self) -> Similarity {
        let rt = self.rotation.transpose();
        Similarity {
            alpha: 1.0 / self.alpha,
            rotation: rt,
            translation: -(rt.mul_vec(self.translation) / self.alpha),
            shift: self.shift.inverse(),
            residual: 0.0,
        }
    }

    /// `self` composed with itself `exp` times (negative exponents use the inverse).
    pub fn pow(&self, exp: i64) -> Similarity {
        let base = if exp < 0 { self.inverse() } else { *self };
        let mut acc = Similarity::identity();
        for _ in 0..exp.unsigned_abs() {
            acc = acc.then(&base);
        }
        acc
    }

    /// Rotation angle of the proper part of `R`.
    pub fn angle(&self) -> f64 {
        self.rotation.angle()
    }

    pub fn is_reflection(&self) -> bool {
        self.rotation.det() < 0.0
    }
}

/// `out[i] = alpha * R * curve[shift(i)] + V`.
pub fn apply_similarity(curve: &Curve, s: &Similarity) -> Result<Curve> {
    let n = curve.len();
    if !s.shift.acts_on(curve.topology(), n) {
        return Err(Error::IncompatibleShift {
            offset: s.shift.offset,
            count: n,
        });
    }
    let pts = curve.points();
    let out: Vec<Vec2> = (0..n).map(|i| s.map_point(pts[s.shift.apply(i, n)])).collect();
    curve.with_points(out)
}
