//! Stereographic charts on `T*S^2`.
//!
//! The north chart projects from `(0, 0, 1)`: `(a, b) -> v` and the fiber
//! coordinates are `p = (<u, dv/da>, <u, dv/db>)`, so `omega = dp ^ d(a, b)`.
//! The south chart is the north chart conjugated by `diag(1, 1, -1)`.

use serde::{Deserialize, Serialize};

use super::{cross, dot, CotangentPoint, Vec3};
use crate::error::{Error, Result};

/// `(a, b, p_a, p_b)`.
pub type ChartCoords = [f64; 4];

/// Minimum value of `1 - v_3` (in the chart's frame) accepted by the inverse.
const POLE_GUARD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pole {
    North,
    South,
}

/// The chart missing the fiber over `pole`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Chart {
    pub pole: Pole,
}

#[inline]
fn flip(x: &Vec3) -> Vec3 {
    [x[0], x[1], -x[2]]
}

impl Chart {
    pub const NORTH: Chart = Chart { pole: Pole::North };
    pub const SOUTH: Chart = Chart { pole: Pole::South };

    /// The chart whose missing fiber lies in the opposite hemisphere from `v`.
    pub fn for_point(v: &Vec3) -> Chart {
        if v[2] <= 0.0 {
            Chart::NORTH
        } else {
            Chart::SOUTH
        }
    }

    pub fn other(self) -> Chart {
        match self.pole {
            Pole::North => Chart::SOUTH,
            Pole::South => Chart::NORTH,
        }
    }

    pub fn pole_vector(&self) -> Vec3 {
        match self.pole {
            Pole::North => [0.0, 0.0, 1.0],
            Pole::South => [0.0, 0.0, -1.0],
        }
    }

    /// Distance from `v` to the missing fiber.
    pub fn pole_distance(&self, v: &Vec3) -> f64 {
        let p = self.pole_vector();
        let d = [v[0] - p[0], v[1] - p[1], v[2] - p[2]];
        dot(&d, &d).sqrt()
    }

    fn orient(&self, x: Vec3) -> Vec3 {
        match self.pole {
            Pole::North => x,
            Pole::South => flip(&x),
        }
    }

    pub fn to_ambient(&self, c: &ChartCoords) -> CotangentPoint {
        let [a, b, pa, pb] = *c;
        let rho = 1.0 + a * a + b * b;
        let v = [2.0 * a / rho, 2.0 * b / rho, (a * a + b * b - 1.0) / rho];
        let u = [
            0.5 * pa * (1.0 - a * a + b * b) - a * b * pb,
            0.5 * pb * (1.0 + a * a - b * b) - a * b * pa,
            a * pa + b * pb,
        ];
        CotangentPoint {
            u: self.orient(u),
            v: self.orient(v),
        }
    }

    pub fn from_ambient(&self, p: &CotangentPoint) -> Result<ChartCoords> {
        let u = self.orient(p.u);
        let v = self.orient(p.v);
        let d = 1.0 - v[2];
        if d < POLE_GUARD {
            return Err(Error::ChartSingularity { v: p.v });
        }
        let a = v[0] / d;
        let b = v[1] / d;
        let (ea, eb) = tangent_frame(a, b);
        Ok([a, b, dot(&u, &ea), dot(&u, &eb)])
    }

    /// Derivatives of `(u, v)` along `(a, b, p_a, p_b)`, as `(du, dv)` per column.
    pub fn jacobian(&self, c: &ChartCoords) -> [(Vec3, Vec3); 4] {
        let [a, b, pa, pb] = *c;
        let (ea, eb) = tangent_frame(a, b);
        let cols = [
            ([-a * pa - b * pb, a * pb - b * pa, pa], ea),
            ([b * pa - a * pb, -b * pb - a * pa, pb], eb),
            ([0.5 * (1.0 - a * a + b * b), -a * b, a], [0.0; 3]),
            ([-a * b, 0.5 * (1.0 + a * a - b * b), b], [0.0; 3]),
        ];
        cols.map(|(du, dv)| (self.orient(du), self.orient(dv)))
    }

    /// Matrix of `omega + s beta` in chart coordinates, `Omega[i][j] = omega^s(d_i, d_j)`.
    pub fn omega(&self, c: &ChartCoords, s: f64) -> [[f64; 4]; 4] {
        let v = self.to_ambient(c).v;
        let jac = self.jacobian(c);
        let mut m = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in (i + 1)..4 {
                let (ui, vi) = &jac[i];
                let (uj, vj) = &jac[j];
                let w = dot(ui, vj) - dot(uj, vi) + s * dot(&v, &cross(vi, vj));
                m[i][j] = w;
                m[j][i] = -w;
            }
        }
        m
    }
}

/// `(dv/da, dv/db)` of the north stereographic parametrization.
fn tangent_frame(a: f64, b: f64) -> (Vec3, Vec3) {
    let rho = 1.0 + a * a + b * b;
    let r2 = rho * rho;
    (
        [2.0 * (1.0 - a * a + b * b) / r2, -4.0 * a * b / r2, 4.0 * a / r2],
        [-4.0 * a * b / r2, 2.0 * (1.0 + a * a - b * b) / r2, 4.0 * b / r2],
    )
}

/// Solves `m x = rhs` by Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)] // pivot and target rows share one array
pub(crate) fn solve4(mut m: [[f64; 4]; 4], mut rhs: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in (col + 1)..4 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let tail: f64 = ((row + 1)..4).map(|k| m[row][k] * x[k]).sum();
        x[row] = (rhs[row] - tail) / m[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PTS: [ChartCoords; 4] = [
        [0.3, -0.2, 0.1, 0.4],
        [-1.1, 0.7, -0.3, 0.2],
        [0.0, 0.0, 0.5, -0.5],
        [2.0, 1.5, 0.05, 0.3],
    ];

    #[test]
    fn round_trip_and_constraints() {
        for chart in [Chart::NORTH, Chart::SOUTH] {
            for c in PTS {
                let p = chart.to_ambient(&c);
                let (ip, nv) = p.constraint_defects();
                assert!(ip < 1e-14 && nv < 1e-14);
                let back = chart.from_ambient(&p).unwrap();
                for i in 0..4 {
                    assert!((back[i] - c[i]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let h = 1e-6;
        for chart in [Chart::NORTH, Chart::SOUTH] {
            for c in PTS {
                let jac = chart.jacobian(&c);
                for i in 0..4 {
                    let mut cp = c;
                    let mut cm = c;
                    cp[i] += h;
                    cm[i] -= h;
                    let (pp, pm) = (chart.to_ambient(&cp), chart.to_ambient(&cm));
                    for k in 0..3 {
                        let du = (pp.u[k] - pm.u[k]) / (2.0 * h);
                        let dv = (pp.v[k] - pm.v[k]) / (2.0 * h);
                        assert!((du - jac[i].0[k]).abs() < 1e-7);
                        assert!((dv - jac[i].1[k]).abs() < 1e-7);
                    }
                }
            }
        }
    }

    #[test]
    fn chart_is_canonical_up_to_area_form() {
        for (chart, sign) in [(Chart::NORTH, -1.0), (Chart::SOUTH, 1.0)] {
            for c in PTS {
                let s = 0.3;
                let m = chart.omega(&c, s);
                let rho = 1.0 + c[0] * c[0] + c[1] * c[1];
                let area = sign * 4.0 / (rho * rho);
                let expect = [
                    [0.0, s * area, -1.0, 0.0],
                    [-s * area, 0.0, 0.0, -1.0],
                    [1.0, 0.0, 0.0, 0.0],
                    [0.0, 1.0, 0.0, 0.0],
                ];
                for i in 0..4 {
                    for j in 0..4 {
                        assert!((m[i][j] - expect[i][j]).abs() < 1e-13, "{i}{j}");
                    }
                }
            }
        }
    }

    #[test]
    fn pole_is_rejected() {
        let p = CotangentPoint {
            u: [1.0, 0.0, 0.0],
            v: [0.0, 0.0, 1.0],
        };
        assert!(matches!(
            Chart::NORTH.from_ambient(&p),
            Err(Error::ChartSingularity { .. })
        ));
        assert!(Chart::SOUTH.from_ambient(&p).is_ok());
        assert_eq!(Chart::for_point(&p.v), Chart::SOUTH);
    }

    #[test]
    fn solve4_inverts() {
        let m = [
            [0.0, 2.0, -1.0, 0.0],
            [-2.0, 0.0, 0.0, -1.0],
            [1.0, 0.0, 0.0, 3.0],
            [0.0, 1.0, -3.0, 0.0],
        ];
        let x = [1.0, -2.0, 0.5, 4.0];
        let rhs: [f64; 4] = std::array::from_fn(|i| (0..4).map(|j| m[i][j] * x[j]).sum());
        let y = solve4(m, rhs).unwrap();
        for i in 0..4 {
            assert!((x[i] - y[i]).abs() < 1e-13);
        }
    }
}
