//! Rigid transforms stored as a 3×3 rotation plus translation.

use libm::{cos, sin, sqrt};

pub type Vec3 = [f64; 3];

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm_sq(a: Vec3) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    sqrt(norm_sq(a))
}

/// Unit quaternion in `[w, x, y, z]` order.
pub type Quaternion = [f64; 4];

pub fn quaternion_norm(q: Quaternion) -> f64 {
    sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
}

/// Position plus orientation exactly as written in a file. The rotation is
/// kept un-normalized so that writing it back reproduces the input; use
/// [`Pose::to_transform`] for computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub translation: Vec3,
    pub rotation: Quaternion,
}

impl Pose {
    pub const IDENTITY: Pose = Pose { translation: [0.0; 3], rotation: [1.0, 0.0, 0.0, 0.0] };

    pub fn from_translation(translation: Vec3) -> Self {
        Pose { translation, rotation: [1.0, 0.0, 0.0, 0.0] }
    }

    pub fn to_transform(&self) -> Transform {
        Transform::from_quaternion(self.rotation, self.translation)
    }
}

impl Default for Pose {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// Homogeneous rigid transform `p ↦ R p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transform {
    pub rotation: [[f64; 3]; 3],
    pub translation: Vec3,
}

impl Default for Transform {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Transform {
    pub const IDENTITY: Transform = Transform {
        rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        translation: [0.0; 3],
    };

    pub fn from_translation(translation: Vec3) -> Self {
        Transform { translation, ..Self::IDENTITY }
    }

    /// Normalizes `q` before building the rotation matrix.
    pub fn from_quaternion(q: Quaternion, translation: Vec3) -> Self {
        let n = quaternion_norm(q);
        let [w, x, y, z] = [q[0] / n, q[1] / n, q[2] / n, q[3] / n];
        let rotation = [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ];
        Transform { rotation, translation }
    }

    /// Rotation by `angle` about the unit vector `axis` (Rodrigues).
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Self {
        let (s, c) = (sin(angle), cos(angle));
        let v = 1.0 - c;
        let [x, y, z] = axis;
        let rotation = [
            [c + x * x * v, x * y * v - z * s, x * z * v + y * s],
            [y * x * v + z * s, c + y * y * v, y * z * v - x * s],
            [z * x * v - y * s, z * y * v + x * s, c + z * z * v],
        ];
        Transform { rotation, translation: [0.0; 3] }
    }

    #[inline]
    pub fn rotate(&self, p: Vec3) -> Vec3 {
        let r = &self.rotation;
        [
            r[0][0] * p[0] + r[0][1] * p[1] + r[0][2] * p[2],
            r[1][0] * p[0] + r[1][1] * p[1] + r[1][2] * p[2],
            r[2][0] * p[0] + r[2][1] * p[1] + r[2][2] * p[2],
        ]
    }

    /// `Rᵀ p`.
    #[inline]
    pub fn rotate_inverse(&self, p: Vec3) -> Vec3 {
        let r = &self.rotation;
        [
            r[0][0] * p[0] + r[1][0] * p[1] + r[2][0] * p[2],
            r[0][1] * p[0] + r[1][1] * p[1] + r[2][1] * p[2],
            r[0][2] * p[0] + r[1][2] * p[1] + r[2][2] * p[2],
        ]
    }

    #[inline]
    pub fn apply(&self, p: Vec3) -> Vec3 {
        add(self.rotate(p), self.translation)
    }

    /// Maps a world point into this frame.
    #[inline]
    pub fn apply_inverse(&self, p: Vec3) -> Vec3 {
        self.rotate_inverse(sub(p, self.translation))
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Transform) -> Transform {
        let a = &self.rotation;
        let b = &other.rotation;
        let mut rotation = [[0.0; 3]; 3];
        for (i, row) in rotation.iter_mut().enumerate() {
            for (j, out) in row.iter_mut().enumerate() {
                *out = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        Transform { rotation, translation: self.apply(other.translation) }
    }

    pub fn inverse(&self) -> Transform {
        let r = &self.rotation;
        let rotation = [
            [r[0][0], r[1][0], r[2][0]],
            [r[0][1], r[1][1], r[2][1]],
            [r[0][2], r[1][2], r[2][2]],
        ];
        let t = Transform { rotation, translation: [0.0; 3] };
        let translation = scale(t.rotate(self.translation), -1.0);
        Transform { rotation, translation }
    }

    /// `RᵀR = I` and `det R = +1` within `tol`.
    pub fn is_orthonormal(&self, tol: f64) -> bool {
        let r = &self.rotation;
        for i in 0..3 {
            for j in 0..3 {
                let d = r[0][i] * r[0][j] + r[1][i] * r[1][j] + r[2][i] * r[2][j];
                let expect = if i == j { 1.0 } else { 0.0 };
                if (d - expect).abs() > tol {
                    return false;
                }
            }
        }
        let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
        (det - 1.0).abs() <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_2;

    fn close(a: Vec3, b: Vec3) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn quarter_turn_about_z() {
        let t = Transform::from_axis_angle([0.0, 0.0, 1.0], FRAC_PI_2);
        assert!(close(t.apply([1.0, 0.0, 0.0]), [0.0, 1.0, 0.0]));
        let h = sqrt(0.5);
        let q = Transform::from_quaternion([h, 0.0, 0.0, h], [0.0; 3]);
        assert!(close(q.apply([1.0, 0.0, 0.0]), [0.0, 1.0, 0.0]));
    }

    #[test]
    fn identity_composition_is_noop() {
        let t = Transform::from_quaternion([0.3, 0.1, -0.7, 0.2], [1.0, 2.0, 3.0]);
        assert_eq!(t.compose(&Transform::IDENTITY), t);
        assert_eq!(Transform::IDENTITY.compose(&t), t);
        assert!(t.is_orthonormal(1e-12));
    }

    #[test]
    fn inverse_round_trip() {
        let t = Transform::from_quaternion([0.9, 0.1, 0.3, -0.2], [0.5, -1.0, 2.0]);
        let p = [0.3, 0.4, -0.5];
        assert!(close(t.inverse().apply(t.apply(p)), p));
        assert!(close(t.apply_inverse(t.apply(p)), p));
    }

    #[test]
    fn composition_is_associative() {
        let a = Transform::from_quaternion([0.9, 0.1, 0.3, -0.2], [0.5, -1.0, 2.0]);
        let b = Transform::from_axis_angle([0.0, 1.0, 0.0], 0.7);
        let c = Transform::from_quaternion([0.2, -0.4, 0.1, 0.8], [0.0, 0.1, 0.0]);
        let l = a.compose(&b).compose(&c);
        let r = a.compose(&b.compose(&c));
        for i in 0..3 {
            assert!(close(l.rotation[i], r.rotation[i]));
        }
        assert!(close(l.translation, r.translation));
    }
}
