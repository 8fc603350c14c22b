//! Rotations and directions on the Poincaré sphere.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Active z-y-z Euler angles `(α, β, γ)`, in radians.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(Error::invalid("Euler angles must be finite"));
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub const fn identity() -> Self {
        Self { alpha: 0.0, beta: 0.0, gamma: 0.0 }
    }

    /// Angles of the inverse rotation.
    pub fn inverse(&self) -> Self {
        Self { alpha: -self.gamma, beta: -self.beta, gamma: -self.alpha }
    }

    /// The 3×3 orthogonal matrix `Rz(α) Ry(β) Rz(γ)`.
    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        rot_z(self.alpha) * rot_y(self.beta) * rot_z(self.gamma)
    }

    /// Recovers z-y-z angles from a proper rotation matrix. At the gimbal
    /// points (`β = 0` or `π`) the whole rotation about z is put into `α`.
    pub fn from_rotation_matrix(r: &Matrix3<f64>) -> Self {
        let beta = r[(2, 2)].clamp(-1.0, 1.0).acos();
        if beta.sin().abs() < 1e-12 {
            let alpha = if r[(2, 2)] > 0.0 { r[(1, 0)].atan2(r[(0, 0)]) } else { (-r[(0, 1)]).atan2(r[(1, 1)]) };
            return Self { alpha, beta, gamma: 0.0 };
        }
        Self { alpha: r[(1, 2)].atan2(r[(0, 2)]), beta, gamma: r[(2, 1)].atan2(-r[(2, 0)]) }
    }

    /// Rotation that carries the north pole onto `dir`.
    pub fn pointing_to(dir: Direction) -> Self {
        Self { alpha: dir.phi, beta: dir.theta, gamma: 0.0 }
    }
}

fn rot_z(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

fn rot_y(b: f64) -> Matrix3<f64> {
    let (s, c) = b.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Unit vector given by polar angle `theta ∈ [0, π]` and azimuth
/// `phi ∈ [0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Direction {
    pub theta: f64,
    pub phi: f64,
}

impl Direction {
    /// Builds a direction, wrapping `phi` into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::invalid("direction angles must be finite"));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::invalid(format!("polar angle {theta} outside [0, π]")));
        }
        Ok(Self { theta, phi: wrap_azimuth(phi) })
    }

    pub const fn north() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub fn from_vector(v: &Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::invalid("direction vector must be non-zero and finite"));
        }
        let u = v / norm;
        let theta = u.z.clamp(-1.0, 1.0).acos();
        let phi = if u.x == 0.0 && u.y == 0.0 { 0.0 } else { u.y.atan2(u.x) };
        Ok(Self { theta, phi: wrap_azimuth(phi) })
    }

    /// `(sinθ cosφ, sinθ sinφ, cosθ)`.
    pub fn unit_vector(&self) -> Vector3<f64> {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Vector3::new(st * cp, st * sp, ct)
    }

    pub fn rotated(&self, angles: &EulerAngles) -> Self {
        let v = angles.rotation_matrix() * self.unit_vector();
        Self::from_vector(&v).expect("rotation preserves unit norm")
    }
}

fn wrap_azimuth(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Deterministic, roughly uniform spiral of `n` directions.
pub fn spiral_directions(n: usize) -> Vec<Direction> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            Direction { theta: z.clamp(-1.0, 1.0).acos(), phi: wrap_azimuth(golden * i as f64) }
        })
        .collect()
}

/// First `n` points of the `n + 1` point spiral.
///
/// The plain spiral with an odd number of points is invariant under a
/// half-turn about a horizontal axis, which makes odd-rank harmonics
/// linearly dependent on it (three points are always coplanar). Dropping
/// one point breaks the symmetry.
pub fn asymmetric_spiral(n: usize) -> Vec<Direction> {
    let mut dirs = spiral_directions(n + 1);
    dirs.truncate(n);
    dirs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn asymmetric_spiral_triples_span_space() {
        let v: Vec<_> = asymmetric_spiral(3).iter().map(|d| d.unit_vector()).collect();
        let det = v[0].dot(&v[1].cross(&v[2]));
        assert!(det.abs() > 0.1, "{det}");
        let w: Vec<_> = spiral_directions(3).iter().map(|d| d.unit_vector()).collect();
        assert!(w[0].dot(&w[1].cross(&w[2])).abs() < 1e-12);
    }

    #[test]
    fn euler_round_trip() {
        let a = EulerAngles::new(0.3, 1.1, -2.0).unwrap();
        let b = EulerAngles::from_rotation_matrix(&a.rotation_matrix());
        assert!((a.rotation_matrix() - b.rotation_matrix()).norm() < 1e-12);
    }

    #[test]
    fn inverse_undoes_rotation() {
        let a = EulerAngles::new(0.7, 2.1, 0.4).unwrap();
        let r = a.rotation_matrix() * a.inverse().rotation_matrix();
        assert!((r - Matrix3::identity()).norm() < 1e-12);
    }

    #[test]
    fn pointing_to_hits_target() {
        let d = Direction::new(1.2, 4.0).unwrap();
        let n = Direction::north().rotated(&EulerAngles::pointing_to(d));
        assert!((n.unit_vector() - d.unit_vector()).norm() < 1e-12);
    }

    #[test]
    fn direction_range_checked() {
        assert!(Direction::new(-0.1, 0.0).is_err());
        assert!(Direction::new(4.0, 0.0).is_err());
        let d = Direction::new(1.0, -1.0).unwrap();
        assert!(d.phi > 0.0 && d.phi < TAU);
    }

    #[test]
    fn spiral_is_spread() {
        let dirs = spiral_directions(50);
        let mean: Vector3<f64> = dirs.iter().map(|d| d.unit_vector()).sum::<Vector3<f64>>() / 50.0;
        assert!(mean.norm() < 0.05);
    }
}
