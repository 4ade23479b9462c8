//! The model Dehn twist on `T*S^2` and its deformation.
//!
//! Points are pairs `(u, v)` in `R^3 x R^3` with `<u, v> = 0` and `|v| = 1`;
//! the symplectic form is `omega = du ^ dv`. The deformed forms are
//! `omega^s = omega + s beta` with `beta_v(X, Y) = <v, X x Y>` pulled back
//! from the sphere.

mod chart;
mod flow;
mod profile;
mod residual;
pub mod verify;

pub use chart::{Chart, ChartCoords, Pole};
pub use flow::{
    deformed_flow, fragility_family, geodesic_flow, isotopy_family, model_twist,
    DeformedStructure,
};
pub use profile::TwistProfile;
pub use residual::{sample_points, symplectic_residual};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

#[inline]
pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub(crate) fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub(crate) fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub(crate) fn axpy(s: f64, x: &Vec3, y: &Vec3) -> Vec3 {
    [s * x[0] + y[0], s * x[1] + y[1], s * x[2] + y[2]]
}

/// Numerical tolerances for the local model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Constraint slack, also the radius treated as the zero section.
    pub constraint: f64,
    /// Allowed return error of a full period of a circle action.
    pub period: f64,
    /// Finite-difference step.
    pub h_fd: f64,
    /// RK4 steps per `2 pi` of flow time.
    pub steps_per_period: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            constraint: 1e-9,
            period: 1e-6,
            h_fd: 1e-5,
            steps_per_period: 10_000,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("tol_constraint", self.constraint),
            ("tol_period", self.period),
            ("h_fd", self.h_fd),
        ] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {x}")));
            }
        }
        if self.steps_per_period == 0 {
            return Err(Error::Config("steps_per_period must be positive".into()));
        }
        Ok(())
    }

    /// Step count for a flow of the given duration.
    pub fn steps_for(&self, duration: f64) -> usize {
        let per = self.steps_per_period as f64 / std::f64::consts::TAU;
        ((duration.abs() * per).ceil() as usize).max(1)
    }
}

/// A point of `T*S^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CotangentPoint {
    pub u: Vec3,
    pub v: Vec3,
}

impl CotangentPoint {
    /// Checks `|<u, v>| <= tol` and `||v| - 1| <= tol`.
    pub fn new(u: Vec3, v: Vec3, tol: f64) -> Result<Self> {
        let p = CotangentPoint { u, v };
        let (ip, nv) = p.constraint_defects();
        if ip > tol || nv > tol {
            return Err(Error::Config(format!(
                "({u:?}, {v:?}) violates the constraints: |<u,v>| = {ip:e}, ||v|-1| = {nv:e}"
            )));
        }
        Ok(p)
    }

    /// Normalizes `v` and removes the `v`-component of `u`.
    pub fn projected(u: Vec3, v: Vec3) -> Self {
        let v = scale(&v, 1.0 / norm(&v));
        let u = axpy(-dot(&u, &v), &v, &u);
        CotangentPoint { u, v }
    }

    /// `(|<u, v>|, ||v| - 1|)`.
    pub fn constraint_defects(&self) -> (f64, f64) {
        (dot(&self.u, &self.v).abs(), (norm(&self.v) - 1.0).abs())
    }

    /// `h(u, v) = |u|`.
    pub fn fiber_norm(&self) -> f64 {
        norm(&self.u)
    }

    pub fn antipodal(&self) -> Self {
        CotangentPoint {
            u: scale(&self.u, -1.0),
            v: scale(&self.v, -1.0),
        }
    }

    /// Euclidean distance in `R^6`.
    pub fn distance(&self, other: &CotangentPoint) -> f64 {
        let du = axpy(-1.0, &other.u, &self.u);
        let dv = axpy(-1.0, &other.v, &self.v);
        (dot(&du, &du) + dot(&dv, &dv)).sqrt()
    }

    /// Applies a 3x3 matrix to both components.
    pub fn transformed(&self, m: &[[f64; 3]; 3]) -> Self {
        let ap = |x: &Vec3| -> Vec3 { [dot(&m[0], x), dot(&m[1], x), dot(&m[2], x)] };
        CotangentPoint {
            u: ap(&self.u),
            v: ap(&self.v),
        }
    }
}

/// Rotation by `angle` about the unit vector `axis` (right-hand rule).
pub fn rotation_matrix(axis: &Vec3, angle: f64) -> [[f64; 3]; 3] {
    let n = scale(axis, 1.0 / norm(axis));
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [c + n[0] * n[0] * t, n[0] * n[1] * t - n[2] * s, n[0] * n[2] * t + n[1] * s],
        [n[1] * n[0] * t + n[2] * s, c + n[1] * n[1] * t, n[1] * n[2] * t - n[0] * s],
        [n[2] * n[0] * t - n[1] * s, n[2] * n[1] * t + n[0] * s, c + n[2] * n[2] * t],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_satisfies_constraints() {
        let p = CotangentPoint::projected([1.0, 2.0, 3.0], [0.0, 3.0, 4.0]);
        let (ip, nv) = p.constraint_defects();
        assert!(ip < 1e-15 && nv < 1e-15);
        assert!(CotangentPoint::new([1.0, 0.0, 0.0], [1.0, 0.0, 0.0], 1e-9).is_err());
    }

    #[test]
    fn rotation_is_orthogonal() {
        let r = rotation_matrix(&[1.0, 2.0, -1.0], 0.7);
        for i in 0..3 {
            for j in 0..3 {
                let d = dot(&r[i], &r[j]);
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((d - e).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn tolerances_validate() {
        assert!(Tolerances::default().validate().is_ok());
        let bad = Tolerances {
            h_fd: 0.0,
            ..Tolerances::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!(Tolerances::default().steps_for(std::f64::consts::TAU), 10_000);
    }
}
