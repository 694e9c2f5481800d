//! Construction of the default initial interpolation set used by
//! trust-region methods built on underdetermined quadratic interpolation:
//! the starting point, a step of `delta` along each positive coordinate
//! direction, and steps along the first `m - n - 1` negative directions.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::set::InterpolationSet;

/// Builds the initial set of `m` points around `x0` with spacing `delta`:
///
/// * point 0: `x0`
/// * points `1..=n`: `x0 + delta * e_j`
/// * points `n+1..m`: `x0 - delta * e_j`
///
/// Requires `n + 2 <= m <= 2n + 1`; larger sets are rejected rather than
/// approximated.
pub fn powell_initial_set(
    n: usize,
    m: usize,
    delta: f64,
    x0: Option<&DVector<f64>>,
) -> Result<InterpolationSet> {
    if n < 1 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let (min, max) = (n + 2, 2 * n + 1);
    if m < min || m > max {
        return Err(Error::PointCountOutOfRange { m, n, min, max });
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} must be a positive finite real"
        )));
    }
    let origin = DVector::zeros(n);
    let x0 = match x0 {
        Some(v) if v.len() != n => {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: v.len(),
            })
        }
        Some(v) => v,
        None => &origin,
    };

    let mut points = Vec::with_capacity(m);
    points.push(x0.clone());
    for j in 0..n {
        let mut p = x0.clone();
        p[j] += delta;
        points.push(p);
    }
    for j in 0..m - n - 1 {
        let mut p = x0.clone();
        p[j] -= delta;
        points.push(p);
    }
    InterpolationSet::new(points)
}

/// The default point count `2n + 1`.
pub fn default_point_count(n: usize) -> usize {
    2 * n + 1
}
