use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
#[allow(unused_imports)]
use num_traits::Float;

/// A point or vector in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(from = "[f64; 2]", into = "[f64; 2]")
)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn from_angle(theta: f64) -> Self {
        Vec2::new(theta.cos(), theta.sin())
    }

    #[inline]
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3d cross product.
    #[inline]
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Rotation by +90 degrees, i.e. `J v` with `J = [[0, -1], [1, 0]]`.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    /// Unit vector in the same direction, `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self / n)
        } else {
            None
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for Vec2 {
    #[inline]
    fn sub_assign(&mut self, o: Vec2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// 2x2 matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(from = "[[f64; 2]; 2]", into = "[[f64; 2]; 2]")
)]
pub struct Mat2 {
    pub rows: [[f64; 2]; 2],
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        rows: [[1.0, 0.0], [0.0, 1.0]],
    };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 {
            rows: [[a, b], [c, d]],
        }
    }

    /// Counterclockwise rotation by `theta`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Mat2::new(c, -s, s, c)
    }

    /// Reflection across the x-axis.
    pub const fn flip_y() -> Self {
        Mat2::new(1.0, 0.0, 0.0, -1.0)
    }

    pub fn det(&self) -> f64 {
        self.rows[0][0] * self.rows[1][1] - self.rows[0][1] * self.rows[1][0]
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.rows[0][0], self.rows[1][0], self.rows[0][1], self.rows[1][1])
    }

    pub fn mul_vec(&self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.rows[0][0] * v.x + self.rows[0][1] * v.y,
            self.rows[1][0] * v.x + self.rows[1][1] * v.y,
        )
    }

    pub fn mul_mat(&self, o: &Mat2) -> Mat2 {
        let a = &self.rows;
        let b = &o.rows;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }

    /// Integer power by repeated squaring; negative exponents use the transpose,
    /// which is the inverse for orthogonal matrices only.
    pub fn orthogonal_pow(&self, exp: i64) -> Mat2 {
        let mut base = if exp < 0 { self.transpose() } else { *self };
        let mut e = exp.unsigned_abs();
        let mut acc = Mat2::IDENTITY;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mat(&base);
            }
            base = base.mul_mat(&base);
            e >>= 1;
        }
        acc
    }

    /// Largest entrywise deviation of `MᵀM` from the identity.
    pub fn orthogonality_defect(&self) -> f64 {
        let p = self.transpose().mul_mat(self);
        let mut worst: f64 = 0.0;
        for (i, row) in p.rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }

    /// Rotation angle of the proper part (for `det = -1` the angle of `M * flip_y`).
    pub fn angle(&self) -> f64 {
        if self.det() >= 0.0 {
            self.rows[1][0].atan2(self.rows[0][0])
        } else {
            let m = self.mul_mat(&Mat2::flip_y());
            m.rows[1][0].atan2(m.rows[0][0])
        }
    }

    pub fn max_abs_diff(&self, o: &Mat2) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.rows[i][j] - o.rows[i][j]).abs());
            }
        }
        worst
    }
}

impl From<[[f64; 2]; 2]> for Mat2 {
    fn from(rows: [[f64; 2]; 2]) -> Self {
        Mat2 { rows }
    }
}

impl From<Mat2> for [[f64; 2]; 2] {
    fn from(m: Mat2) -> Self {
        m.rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_powers_compose_angles() {
        let r = Mat2::rotation(0.3);
        let r5 = r.orthogonal_pow(5);
        assert!(r5.max_abs_diff(&Mat2::rotation(1.5)) < 1e-14);
        let back = r.orthogonal_pow(-5).mul_mat(&r5);
        assert!(back.max_abs_diff(&Mat2::IDENTITY) < 1e-14);
        assert!((r5.angle() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn reflection_has_negative_determinant() {
        let m = Mat2::rotation(0.7).mul_mat(&Mat2::flip_y());
        assert!((m.det() + 1.0).abs() < 1e-15);
        assert!(m.orthogonality_defect() < 1e-15);
        assert!((m.angle() - 0.7).abs() < 1e-14);
    }

    #[test]
    fn perp_is_counterclockwise() {
        assert_eq!(Vec2::new(1.0, 0.0).perp(), Vec2::new(0.0, 1.0));
        assert_eq!(Vec2::new(1.0, 0.0).cross(Vec2::new(0.0, 1.0)), 1.0);
    }
}
