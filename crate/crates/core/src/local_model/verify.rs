//! Sampled numerical checks of the local model, reported as JSON records.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    deformed_flow, fragility_family, model_twist, norm, rotation_matrix, sample_points,
    symplectic_residual, CotangentPoint, DeformedStructure, Tolerances, TwistProfile,
};
use crate::error::Result;

/// Residual tolerance for finite-difference symplecticity checks.
pub const TOL_SYMPLECTIC: f64 = 1e-6;
/// RK4 against the closed-form rotation at time 1.
pub const TOL_CLOSED_FORM: f64 = 1e-8;
/// Equivariance defect of closed-form maps.
pub const TOL_EQUIVARIANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl VerificationReport {
    fn new(check: &str, samples: usize, max_residual: f64, tolerance: f64) -> Self {
        VerificationReport {
            check: check.to_string(),
            samples,
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
        }
    }
}

fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R) -> [[f64; 3]; 3] {
    let axis = sample_points(rng, 1, (1.0, 1.0))[0].v;
    let m = rotation_matrix(&axis, rng.gen_range(0.0..TAU));
    if rng.gen_bool(0.5) {
        m.map(|row| row.map(|x| -x))
    } else {
        m
    }
}

/// Symplecticity, `O(3)`-equivariance and the zero-section value of the model twist.
pub fn verify_twist<R: Rng + ?Sized>(
    profile: &TwistProfile,
    samples: usize,
    rng: &mut R,
    tol: &Tolerances,
) -> Result<Vec<VerificationReport>> {
    let twist = |p: &CotangentPoint| model_twist(profile, p, tol.constraint);
    let pts = sample_points(rng, samples, (0.01, 1.2 * profile.support()));
    let res = symplectic_residual(|p| Ok(twist(p)), 0.0, &pts, tol.h_fd)?;

    let mut equi = 0.0f64;
    for p in &pts {
        let a = random_orthogonal(rng);
        equi = equi.max(twist(&p.transformed(&a)).distance(&twist(p).transformed(&a)));
    }

    let mut zero = 0.0f64;
    for p in &pts {
        let z = CotangentPoint { u: [0.0; 3], v: p.v };
        zero = zero.max(twist(&z).distance(&z.antipodal()));
    }

    Ok(vec![
        VerificationReport::new("twist_symplectic", samples, res, TOL_SYMPLECTIC),
        VerificationReport::new("twist_equivariance", samples, equi, TOL_EQUIVARIANCE),
        VerificationReport::new("twist_zero_section", samples, zero, 0.0),
    ])
}

/// RK4 flow of `h^s` against the closed-form rotation, its period, the
/// constraints and symplecticity for `omega^s`.
pub fn verify_flow<R: Rng + ?Sized>(
    s: f64,
    samples: usize,
    rng: &mut R,
    tol: &Tolerances,
) -> Result<Vec<VerificationReport>> {
    let ds = DeformedStructure::new(s)?.with_zero_tol(tol.constraint);
    let lower = if s == 0.0 { 0.05 } else { 0.0 };
    let pts = sample_points(rng, samples, (lower, 1.0));

    let (mut closed, mut period, mut constraint) = (0.0f64, 0.0f64, 0.0f64);
    for p in &pts {
        let q = deformed_flow(&ds, 1.0, p, tol.steps_for(1.0))?;
        closed = closed.max(q.distance(&ds.rotation_flow(1.0, p)?));
        let r = deformed_flow(&ds, TAU, p, tol.steps_per_period)?;
        period = period.max(r.distance(p));
        for x in [q, r] {
            let (ip, nv) = x.constraint_defects();
            constraint = constraint.max(ip).max(nv);
        }
    }

    let n_sym = samples.min(20);
    let res = symplectic_residual(
        |p| deformed_flow(&ds, 1.0, p, tol.steps_for(1.0)),
        s,
        &pts[..n_sym],
        tol.h_fd,
    )?;

    Ok(vec![
        VerificationReport::new("flow_closed_form", samples, closed, TOL_CLOSED_FORM),
        VerificationReport::new("flow_period", samples, period, tol.period),
        VerificationReport::new("flow_constraints", samples, constraint, 10.0 * tol.constraint),
        VerificationReport::new("flow_symplectic", n_sym, res, TOL_SYMPLECTIC),
    ])
}

/// Fragility family: identity near the zero section, symplectic for
/// `omega^s`, and convergence to `tau^2` as `s -> 0`.
pub fn verify_fragility<R: Rng + ?Sized>(
    s: f64,
    profile: &TwistProfile,
    samples: usize,
    rng: &mut R,
    tol: &Tolerances,
) -> Result<Vec<VerificationReport>> {
    let ds = DeformedStructure::new(s)?.with_zero_tol(tol.constraint);
    let phi = |p: &CotangentPoint| fragility_family(&ds, profile, p, tol);

    let inner = sample_points(rng, samples, (0.0, 0.9 * profile.mu()));
    let mut ident = 0.0f64;
    for p in &inner {
        ident = ident.max(phi(p)?.distance(p));
    }

    let n_sym = samples.min(20);
    let outer = sample_points(rng, n_sym, (0.02, 1.1 * profile.support()));
    let res = symplectic_residual(phi, s, &outer, tol.h_fd)?;

    // distance to tau^2 must shrink along s = 0.1, 0.01, 0.001
    let limit_pts = sample_points(rng, samples.min(10), (profile.support() * 2.0 / 3.0, profile.support() * 2.0 / 3.0));
    let mut worst_ratio = 0.0f64;
    for p in &limit_pts {
        let once = model_twist(profile, p, tol.constraint);
        let tau2 = model_twist(profile, &once, tol.constraint);
        let mut prev = f64::INFINITY;
        for sk in [0.1, 0.01, 0.001] {
            let dk = DeformedStructure::new(sk)?.with_zero_tol(tol.constraint);
            let d = fragility_family(&dk, profile, p, tol)?.distance(&tau2);
            worst_ratio = worst_ratio.max(d / prev);
            prev = d;
        }
    }

    Ok(vec![
        VerificationReport::new("fragility_identity_near_zero", samples, ident, tol.period),
        VerificationReport::new("fragility_symplectic", n_sym, res, TOL_SYMPLECTIC),
        VerificationReport {
            check: "fragility_limit_monotone".into(),
            samples: limit_pts.len(),
            max_residual: worst_ratio,
            tolerance: 1.0,
            pass: worst_ratio < 1.0,
        },
    ])
}

/// Angle of `phi^s` at radius `|u|`; `2 pi` on the plateau.
pub fn fragility_angle(profile: &TwistProfile, p: &CotangentPoint) -> f64 {
    4.0 * PI * profile.r_prime(norm(&p.u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn twist_checks_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let prof = TwistProfile::smoothstep(1.0).unwrap();
        for r in verify_twist(&prof, 50, &mut rng, &Tolerances::default()).unwrap() {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn flow_checks_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for s in [0.0, 0.1] {
            for r in verify_flow(s, 5, &mut rng, &Tolerances::default()).unwrap() {
                assert!(r.pass, "{r:?}");
            }
        }
    }

    #[test]
    fn fragility_checks_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let prof = TwistProfile::with_plateau(1.0, 0.2).unwrap();
        for r in verify_fragility(0.2, &prof, 5, &mut rng, &Tolerances::default()).unwrap() {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn fragility_residual_has_margin_across_seeds() {
        let prof = TwistProfile::with_plateau(1.0, 0.2).unwrap();
        for seed in 0..4 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let reports = verify_fragility(0.1, &prof, 20, &mut rng, &Tolerances::default()).unwrap();
            let sym = reports.iter().find(|r| r.check == "fragility_symplectic").unwrap();
            assert!(sym.max_residual < 0.1 * TOL_SYMPLECTIC, "seed {seed}: {sym:?}");
        }
    }
}
