//! Minimum Frobenius norm Lagrange polynomials: the generic numerical
//! path (one factorization, `m` unit right-hand sides) and the closed
//! forms available for the default initial interpolation set.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::interp::{interpolate_mfn_ungated, interpolate_mfn_with, KktSystem};
use crate::model::QuadraticModel;
use crate::set::InterpolationSet;

/// All `m` Lagrange polynomials of `set`: `L_i` interpolates the
/// Kronecker data `delta_{i,j}`. Index `i` is zero-based and refers to
/// `set.points()[i]`.
pub fn lagrange_polynomials_numeric(set: &InterpolationSet) -> Result<Vec<QuadraticModel>> {
    let sys = KktSystem::assemble(set)?;
    if !sys.is_nonsingular() {
        return Err(Error::NotPoised {
            condition: sys.condition(),
        });
    }
    let m = set.len();
    let mut out = Vec::with_capacity(m);
    let mut data = vec![0.0; m];
    for i in 0..m {
        data[i] = 1.0;
        out.push(interpolate_mfn_with(&sys, set, &data)?);
        data[i] = 0.0;
    }
    Ok(out)
}

/// Lagrange polynomials without the interpolation-residual gate, for
/// geometry repair of poorly conditioned (yet poised) sets.
pub(crate) fn lagrange_polynomials_ungated(
    set: &InterpolationSet,
) -> Result<Vec<QuadraticModel>> {
    let sys = KktSystem::assemble(set)?;
    let m = set.len();
    let mut out = Vec::with_capacity(m);
    let mut data = vec![0.0; m];
    for i in 0..m {
        data[i] = 1.0;
        out.push(interpolate_mfn_ungated(&sys, set, &data)?);
        data[i] = 0.0;
    }
    Ok(out)
}

/// The closed-form `i`-th Lagrange polynomial of the initial set with
/// parameters `(n, m, delta)`, emitted with base point 0 (`index` is
/// zero-based). With `k = m - n - 1` the four branches are, writing
/// coordinates one-based:
///
/// * `i = 1`: `1 - sum_{j<=k} x_j^2/delta^2 - sum_{j=k+1..n} x_j/delta`
/// * `2 <= i <= m - n`: `x_{i-1}^2/(2 delta^2) + x_{i-1}/(2 delta)`
/// * `m - n + 1 <= i <= n + 1`: `x_{i-1}/delta`
/// * `n + 2 <= i <= m`: `x_{i-n-1}^2/(2 delta^2) - x_{i-n-1}/(2 delta)`
pub fn powell_lagrange_closed_form(
    n: usize,
    m: usize,
    delta: f64,
    index: usize,
) -> Result<QuadraticModel> {
    let (min, max) = (n + 2, 2 * n + 1);
    if m < min || m > max {
        return Err(Error::PointCountOutOfRange { m, n, min, max });
    }
    if index >= m {
        return Err(Error::IndexOutOfRange { index, len: m });
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} must be a positive finite real"
        )));
    }

    let k = m - n - 1; // coordinates sampled in both directions
    let mut constant = 0.0;
    let mut g = DVector::zeros(n);
    let mut h = DMatrix::zeros(n, n);
    if index == 0 {
        constant = 1.0;
        for j in 0..k {
            h[(j, j)] = -2.0 / (delta * delta);
        }
        for j in k..n {
            g[j] = -1.0 / delta;
        }
    } else if index <= m - n - 1 {
        let j = index - 1;
        h[(j, j)] = 1.0 / (delta * delta);
        g[j] = 0.5 / delta;
    } else if index <= n {
        g[index - 1] = 1.0 / delta;
    } else {
        let j = index - n - 1;
        h[(j, j)] = 1.0 / (delta * delta);
        g[j] = -0.5 / delta;
    }
    QuadraticModel::new(DVector::zeros(n), constant, g, h)
}

/// All `m` closed-form Lagrange polynomials, translated so that the set
/// starts at `x0` when given.
pub fn powell_lagrange_closed_all(
    n: usize,
    m: usize,
    delta: f64,
    x0: Option<&DVector<f64>>,
) -> Result<Vec<QuadraticModel>> {
    (0..m)
        .map(|i| {
            let q = powell_lagrange_closed_form(n, m, delta, i)?;
            match x0 {
                Some(t) => q.translated(t),
                None => Ok(q),
            }
        })
        .collect()
}
