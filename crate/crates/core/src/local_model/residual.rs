use rand::Rng;

use super::chart::{Chart, ChartCoords};
use super::{axpy, dot, norm, scale, CotangentPoint, Vec3};
use crate::error::{Error, Result};

fn unit_sphere<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

/// Points with `v` uniform on the sphere, `u` in a uniform tangent direction
/// and `|u|` uniform in `radius`.
pub fn sample_points<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    radius: (f64, f64),
) -> Vec<CotangentPoint> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v = unit_sphere(rng);
        let w = unit_sphere(rng);
        let t = axpy(-dot(&w, &v), &v, &w);
        let nt = norm(&t);
        if nt < 1e-3 {
            continue;
        }
        let r = if radius.1 > radius.0 {
            rng.gen_range(radius.0..radius.1)
        } else {
            radius.0
        };
        out.push(CotangentPoint {
            u: scale(&t, r / nt),
            v,
        });
    }
    out
}

fn on_locus(e: Error) -> Error {
    match e {
        Error::ZeroSection { norm_u } => Error::SampleOnSingularLocus(format!(
            "map undefined near the zero section (|u| = {norm_u:e})"
        )),
        other => other,
    }
}

/// `max_p |J^T Omega^s(F p) J - Omega^s(p)|_F` with `J` the five-point
/// central-difference Jacobian of `map` in stereographic coordinates.
pub fn symplectic_residual<F>(map: F, s: f64, points: &[CotangentPoint], h_fd: f64) -> Result<f64>
where
    F: Fn(&CotangentPoint) -> Result<CotangentPoint>,
{
    let mut worst = 0.0f64;
    for p in points {
        let src = Chart::for_point(&p.v);
        let c0 = src.from_ambient(p)?;
        let fp = map(p).map_err(on_locus)?;
        let dst = Chart::for_point(&fp.v);
        let mut jac = [[0.0; 4]; 4];
        let image = |c: &ChartCoords| -> Result<ChartCoords> {
            let q = map(&src.to_ambient(c)).map_err(on_locus)?;
            dst.from_ambient(&q)
        };
        for i in 0..4 {
            let shifted = |m: f64| {
                let mut c = c0;
                c[i] += m * h_fd;
                image(&c)
            };
            let (p1, m1, p2, m2) = (shifted(1.0)?, shifted(-1.0)?, shifted(2.0)?, shifted(-2.0)?);
            for k in 0..4 {
                jac[k][i] = (8.0 * (p1[k] - m1[k]) - (p2[k] - m2[k])) / (12.0 * h_fd);
            }
        }
        let om_dst = dst.omega(&dst.from_ambient(&fp)?, s);
        let om_src = src.omega(&c0, s);
        let mut frob = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let mut pulled = 0.0;
                for a in 0..4 {
                    for b in 0..4 {
                        pulled += jac[a][i] * om_dst[a][b] * jac[b][j];
                    }
                }
                frob += (pulled - om_src[i][j]).powi(2);
            }
        }
        worst = worst.max(frob.sqrt());
    }
    Ok(worst)
}
