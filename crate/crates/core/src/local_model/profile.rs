use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smoothstep `x^2 (3 - 2x)` on `[0, 1]`.
#[inline]
fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

/// Radial profile of a model Dehn twist.
///
/// `r'(t) = S((lambda/2 - t) / (lambda/2 - plateau)) / 2` for `t >= 0`, with
/// `S` the clamped smoothstep. So `r'` is `1/2` on `[0, plateau]`, decreases
/// to `0` at `lambda/2` and vanishes beyond; for negative arguments
/// `r'(-t) = 1 - r'(t)`, which is the derivative of `r(-t) = r(t) - t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistProfile {
    lambda: f64,
    plateau: f64,
}

impl TwistProfile {
    /// `r'(t) = S(1 - 2t/lambda) / 2`; the inner radius is `lambda / 4`.
    pub fn smoothstep(lambda: f64) -> Result<Self> {
        Self::with_plateau(lambda, 0.0)
    }

    /// Profile with `r' = 1/2` on `[0, plateau]`.
    pub fn with_plateau(lambda: f64, plateau: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidProfile(format!("lambda = {lambda} must be positive")));
        }
        if !(0.0..lambda / 2.0).contains(&plateau) {
            return Err(Error::InvalidProfile(format!(
                "plateau = {plateau} must lie in [0, lambda/2)"
            )));
        }
        Ok(TwistProfile { lambda, plateau })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn plateau(&self) -> f64 {
        self.plateau
    }

    /// Radius below which `r' >= 1/4`, taking the plateau itself when present.
    pub fn mu(&self) -> f64 {
        if self.plateau > 0.0 {
            self.plateau
        } else {
            // S(x) = 1/2 at x = 1/2
            self.lambda / 4.0
        }
    }

    /// Support radius `lambda / 2` of the twist.
    pub fn support(&self) -> f64 {
        self.lambda / 2.0
    }

    fn width(&self) -> f64 {
        self.lambda / 2.0 - self.plateau
    }

    pub fn r_prime(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 1.0 - self.r_prime(-t);
        }
        0.5 * smoothstep((self.support() - t) / self.width())
    }

    /// `r(t) = -int_t^inf r'`, extended by `r(-t) = r(t) - t`.
    pub fn r(&self, t: f64) -> f64 {
        if t < 0.0 {
            return self.r(-t) + t;
        }
        let w = self.width();
        if t >= self.support() {
            0.0
        } else if t >= self.plateau {
            let x = (self.support() - t) / w;
            -0.5 * w * (x.powi(3) - 0.5 * x.powi(4))
        } else {
            -(0.5 * (self.plateau - t) + 0.25 * w)
        }
    }

    /// Checks the bounds on `r'` over a grid of `n` points in `[0, lambda]`:
    /// `[1/4, 3/4]` below `mu`, `[0, 1/2]` up to `lambda/2`, zero beyond.
    pub fn check_wobbly(&self, n: usize) -> bool {
        (0..=n).all(|i| {
            let t = self.lambda * i as f64 / n as f64;
            let d = self.r_prime(t);
            if t < self.mu() {
                (0.25..=0.75).contains(&d)
            } else if t < self.support() {
                (0.0..=0.5).contains(&d)
            } else {
                d == 0.0
            }
        })
    }

    /// Pointwise convex combination of the derivatives, as a closure.
    pub fn interpolate(&self, other: &TwistProfile, theta: f64) -> impl Fn(f64) -> f64 + '_ {
        let other = *other;
        move |t| (1.0 - theta) * self.r_prime(t) + theta * other.r_prime(t)
    }
}
