//! lp balls, the extended exponent `p` in `[1, inf]`, and the arithmetic
//! conventions attached to it.
//!
//! Every exponent expression of the form `(p - 1)/p`, `(p - 2)/p`, `1/p`,
//! or `k^e` used elsewhere in the crate routes through this module, so the
//! conventions `0^0 = 0` and `inf/inf = 1` are applied in exactly one place.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The order of an lp norm: a real `p >= 1` or infinity. Infinity is a
/// distinct tag, never a large float.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PNorm {
    Finite(f64),
    Infinity,
}

impl PNorm {
    /// A finite order; fails unless `p >= 1`.
    pub fn new(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "norm order p = {p} must be a finite real >= 1 (or infinity)"
            )));
        }
        Ok(PNorm::Finite(p))
    }

    pub const fn infinity() -> Self {
        PNorm::Infinity
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, PNorm::Infinity)
    }

    /// The lp norm of `x`.
    pub fn norm(&self, x: &DVector<f64>) -> f64 {
        match *self {
            PNorm::Infinity => x.amax(),
            PNorm::Finite(p) if p == 1.0 => x.iter().map(|v| v.abs()).sum(),
            PNorm::Finite(p) if p == 2.0 => x.norm(),
            PNorm::Finite(p) => x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p),
        }
    }

    /// `1/p`, with `1/inf = 0`.
    pub fn inv(&self) -> f64 {
        match *self {
            PNorm::Infinity => 0.0,
            PNorm::Finite(p) => 1.0 / p,
        }
    }

    /// `(p - 1)/p`, equal to 1 when `p = inf` (the `inf/inf = 1` convention).
    pub fn frac_pm1(&self) -> f64 {
        match *self {
            PNorm::Infinity => 1.0,
            PNorm::Finite(p) => (p - 1.0) / p,
        }
    }

    /// `(p - 2)/p`, equal to 1 when `p = inf`.
    pub fn frac_pm2(&self) -> f64 {
        match *self {
            PNorm::Infinity => 1.0,
            PNorm::Finite(p) => (p - 2.0) / p,
        }
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PNorm::Infinity => write!(f, "inf"),
            PNorm::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for PNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(PNorm::Infinity),
            other => {
                let p: f64 = other.parse().map_err(|_| {
                    Error::InvalidParameter(format!("cannot parse norm order {s:?}"))
                })?;
                PNorm::new(p)
            }
        }
    }
}

/// `k^e` under the convention `0^0 = 0`. With it,
/// `(2n + 1 - m)^((p-1)/p)` vanishes when `m = 2n + 1` and `p = 1`.
pub fn pow_ext(k: f64, e: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        k.powf(e)
    }
}

/// A closed lp ball `{x : ||x - center||_p <= radius}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpBall {
    pub center: DVector<f64>,
    pub radius: f64,
    pub p: PNorm,
}

impl LpBall {
    pub fn new(center: DVector<f64>, radius: f64, p: PNorm) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "ball radius {radius} must be a positive finite real"
            )));
        }
        if center.is_empty() {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        Ok(Self { center, radius, p })
    }

    /// The unit-radius ball at the origin of R^n.
    pub fn unit(n: usize, p: PNorm) -> Self {
        Self {
            center: DVector::zeros(n),
            radius: 1.0,
            p,
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Membership test `||x - center||_p <= radius`, exact coordinatewise
    /// comparison when `p = inf`.
    pub fn contains(&self, x: &DVector<f64>) -> Result<bool> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        let d = x - &self.center;
        Ok(match self.p {
            PNorm::Infinity => d.iter().all(|v| v.abs() <= self.radius),
            _ => self.p.norm(&d) <= self.radius,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn rejects_orders_below_one() {
        assert!(PNorm::new(0.5).is_err());
        assert!(PNorm::new(f64::NAN).is_err());
        assert!(PNorm::new(f64::INFINITY).is_err());
    }

    #[test]
    fn parses_inf_tag() {
        assert_eq!("inf".parse::<PNorm>().unwrap(), PNorm::Infinity);
        assert_eq!("2".parse::<PNorm>().unwrap(), PNorm::Finite(2.0));
        assert!("0.3".parse::<PNorm>().is_err());
    }

    #[test]
    fn extended_fractions() {
        assert_eq!(PNorm::Infinity.frac_pm1(), 1.0);
        assert_eq!(PNorm::Infinity.frac_pm2(), 1.0);
        assert_eq!(PNorm::Finite(1.0).frac_pm1(), 0.0);
        assert_eq!(PNorm::Finite(2.0).frac_pm2(), 0.0);
        assert_eq!(PNorm::Infinity.inv(), 0.0);
    }

    #[test]
    fn zero_to_the_zero_is_zero() {
        assert_eq!(pow_ext(0.0, 0.0), 0.0);
        assert_eq!(pow_ext(0.0, 0.5), 0.0);
        assert_eq!(pow_ext(4.0, 0.5), 2.0);
        // k^0 = 1 for k > 0 is untouched by the convention.
        assert_eq!(pow_ext(3.0, 0.0), 1.0);
    }

    #[test]
    fn norms() {
        let x = dvector![3.0, -4.0];
        assert_eq!(PNorm::Finite(1.0).norm(&x), 7.0);
        assert_eq!(PNorm::Finite(2.0).norm(&x), 5.0);
        assert_eq!(PNorm::Infinity.norm(&x), 4.0);
    }

    #[test]
    fn infinity_membership_is_coordinatewise() {
        let ball = LpBall::new(dvector![1.0, -1.0], 2.0, PNorm::Infinity).unwrap();
        assert!(ball.contains(&dvector![3.0, 1.0]).unwrap());
        assert!(!ball.contains(&dvector![3.0 + 1e-12, 1.0]).unwrap());
    }

    #[test]
    fn rejects_nonpositive_radius() {
        assert!(LpBall::new(dvector![0.0], 0.0, PNorm::Finite(2.0)).is_err());
    }
}
