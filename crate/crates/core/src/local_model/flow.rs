use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::chart::{solve4, Chart, ChartCoords};
use super::profile::TwistProfile;
use super::{axpy, cross, dot, norm, rotation_matrix, scale, CotangentPoint, Tolerances, Vec3};
use crate::error::{Error, Result};

/// Distance to a chart's missing fiber at which integration changes chart.
const CHART_SWITCH: f64 = 0.3;

/// The normalized geodesic flow `sigma_t`.
///
/// On the zero section only multiples of `pi` are defined, acting as the
/// identity or the antipodal map.
pub fn geodesic_flow(t: f64, p: &CotangentPoint, tol: f64) -> Result<CotangentPoint> {
    let nu = norm(&p.u);
    if nu < tol {
        let k = t / PI;
        if (k - k.round()).abs() <= tol {
            return Ok(if (k.round() as i64).rem_euclid(2) == 1 {
                p.antipodal()
            } else {
                *p
            });
        }
        return Err(Error::ZeroSection { norm_u: nu });
    }
    let (s, c) = t.sin_cos();
    Ok(CotangentPoint {
        u: axpy(-s * nu, &p.v, &scale(&p.u, c)),
        v: axpy(s / nu, &p.u, &scale(&p.v, c)),
    })
}

/// `tau = sigma_{2 pi r'(|u|)}`, the antipodal map on the zero section.
pub fn model_twist(profile: &TwistProfile, p: &CotangentPoint, tol: f64) -> CotangentPoint {
    let nu = norm(&p.u);
    if nu < tol {
        return p.antipodal();
    }
    geodesic_flow(2.0 * PI * profile.r_prime(nu), p, tol).expect("off the zero section")
}

/// `psi_t = sigma_{4 pi t r'(|u|)}`; `psi_0` is the identity and `psi_1 = tau^2`.
/// Extends over the zero section only when `2t` is an integer.
pub fn isotopy_family(
    profile: &TwistProfile,
    t: f64,
    p: &CotangentPoint,
    tol: f64,
) -> Result<CotangentPoint> {
    geodesic_flow(4.0 * PI * t * profile.r_prime(norm(&p.u)), p, tol)
}

/// The form `omega + s beta` with moment map `mu^s = -s v - u x v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformedStructure {
    pub s: f64,
    /// `h^s` below this is treated as the fixed locus.
    pub zero_tol: f64,
}

impl DeformedStructure {
    pub fn new(s: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::Config(format!("deformation parameter s = {s} is not finite")));
        }
        Ok(DeformedStructure { s, zero_tol: 1e-9 })
    }

    pub fn with_zero_tol(mut self, tol: f64) -> Self {
        self.zero_tol = tol;
        self
    }

    pub fn moment_map(&self, p: &CotangentPoint) -> Vec3 {
        axpy(-self.s, &p.v, &scale(&cross(&p.u, &p.v), -1.0))
    }

    /// `h^s = |mu^s|`, equal to `sqrt(s^2 + |u|^2)` on the constraint set.
    pub fn hamiltonian(&self, p: &CotangentPoint) -> f64 {
        norm(&self.moment_map(p))
    }

    /// Ambient gradient `(dh/du, dh/dv)`.
    fn gradient(&self, p: &CotangentPoint) -> Result<(Vec3, Vec3)> {
        let m = self.moment_map(p);
        let h = norm(&m);
        if h < self.zero_tol {
            return Err(Error::ZeroSection { norm_u: norm(&p.u) });
        }
        let n = scale(&m, 1.0 / h);
        let du = scale(&cross(&p.v, &n), -1.0);
        let dv = axpy(-self.s, &n, &scale(&cross(&n, &p.u), -1.0));
        Ok((du, dv))
    }

    /// Rotation of both components by angle `t` about `mu^s / |mu^s|`.
    pub fn rotation_flow(&self, t: f64, p: &CotangentPoint) -> Result<CotangentPoint> {
        let m = self.moment_map(p);
        if norm(&m) < self.zero_tol {
            return Err(Error::ZeroSection { norm_u: norm(&p.u) });
        }
        Ok(p.transformed(&rotation_matrix(&m, t)))
    }

    /// Hamiltonian vector field of `h^s` in chart coordinates, `iota_X omega^s = -dh^s`.
    fn field(&self, chart: &Chart, c: &ChartCoords) -> Result<ChartCoords> {
        let p = chart.to_ambient(c);
        let (gu, gv) = self.gradient(&p)?;
        let jac = chart.jacobian(c);
        let grad: [f64; 4] = std::array::from_fn(|i| dot(&gu, &jac[i].0) + dot(&gv, &jac[i].1));
        let x = solve4(chart.omega(c, self.s), grad)
            .ok_or_else(|| Error::IntegrationDiverged(format!("degenerate form at {c:?}")))?;
        if x.iter().all(|z| z.is_finite()) {
            Ok(x)
        } else {
            Err(Error::IntegrationDiverged(format!("non-finite field at {c:?}")))
        }
    }
}

fn add4(c: &ChartCoords, h: f64, k: &ChartCoords) -> ChartCoords {
    std::array::from_fn(|i| c[i] + h * k[i])
}

/// Time-`t` Hamiltonian flow of `h^s` for `omega^s`, integrated by RK4 with
/// `steps` steps in stereographic charts.
pub fn deformed_flow(
    ds: &DeformedStructure,
    t: f64,
    p: &CotangentPoint,
    steps: usize,
) -> Result<CotangentPoint> {
    if ds.hamiltonian(p) < ds.zero_tol {
        return Err(Error::ZeroSection { norm_u: norm(&p.u) });
    }
    if steps == 0 {
        return Err(Error::IntegrationDiverged("zero steps".into()));
    }
    let dt = t / steps as f64;
    let mut chart = Chart::for_point(&p.v);
    let mut c = chart.from_ambient(p)?;
    for _ in 0..steps {
        let q = chart.to_ambient(&c);
        if chart.pole_distance(&q.v) < CHART_SWITCH {
            chart = chart.other();
            c = chart.from_ambient(&q)?;
        }
        let k1 = ds.field(&chart, &c)?;
        let k2 = ds.field(&chart, &add4(&c, 0.5 * dt, &k1))?;
        let k3 = ds.field(&chart, &add4(&c, 0.5 * dt, &k2))?;
        let k4 = ds.field(&chart, &add4(&c, dt, &k3))?;
        c = std::array::from_fn(|i| c[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        if !c.iter().all(|z| z.is_finite()) {
            return Err(Error::IntegrationDiverged(format!("state left every chart: {c:?}")));
        }
    }
    Ok(chart.to_ambient(&c))
}

/// `phi^s = flow of h^s for time 4 pi r'(|u|)`; `phi^0 = tau^2`.
///
/// Requires a profile with a plateau, so that the flow time is exactly one
/// period near the zero section.
pub fn fragility_family(
    ds: &DeformedStructure,
    profile: &TwistProfile,
    p: &CotangentPoint,
    tol: &Tolerances,
) -> Result<CotangentPoint> {
    if profile.plateau() <= 0.0 {
        return Err(Error::InvalidProfile(
            "the fragility family needs r' = 1/2 near zero".into(),
        ));
    }
    let angle = 4.0 * PI * profile.r_prime(norm(&p.u));
    if angle == 0.0 {
        return Ok(*p);
    }
    if ds.s == 0.0 {
        let once = model_twist(profile, p, tol.constraint);
        return Ok(model_twist(profile, &once, tol.constraint));
    }
    deformed_flow(ds, angle, p, tol.steps_for(angle))
}
