//! Assembly and solution of the saddle-point system behind minimum
//! Frobenius norm interpolation, plus the least-change (symmetric
//! Broyden) variant.
//!
//! With `s_i = y_i - b` the system is
//!
//! ```text
//! [ A  X ] [lambda]   [f]        A_ij  = ((s_i' s_j)^2) / 2
//! [ X' 0 ] [ c; g ] = [0]        X row = (1, s_i')
//! ```
//!
//! and the model Hessian is recovered as `H = sum_i lambda_i s_i s_i'`.

use nalgebra::{DMatrix, DVector, Dyn, SVD};

use crate::error::{Error, Result};
use crate::model::QuadraticModel;
use crate::set::InterpolationSet;

/// Condition estimates above this threshold are treated as singular.
/// The theory gives no tolerance; this policy matches the `1e-10`
/// interpolation-residual check at double precision.
pub const DEFAULT_CONDITION_LIMIT: f64 = 1e12;

/// Relative factor of the mandatory post-solve interpolation residual check.
pub const RESIDUAL_TOL_FACTOR: f64 = 1e-10;

/// The assembled and factorized saddle-point system for one set.
/// Unknown layout: `m` multipliers, then `c`, then the `n` gradient
/// entries; right-hand side `(f, 0)`.
///
/// Assembly divides the shifted points by their largest norm: the `A`
/// block otherwise grows with the fourth power of the point spread and
/// ruins the conditioning for spreads far from 1. Solutions are mapped
/// back to original coordinates.
pub struct KktSystem {
    matrix: DMatrix<f64>,
    svd: SVD<f64, Dyn, Dyn>,
    condition: f64,
    condition_limit: f64,
    base: DVector<f64>,
    scale: f64,
    m: usize,
    n: usize,
}

impl KktSystem {
    /// Assembles and factorizes the system for `set`, shifting by the
    /// set's base point. Requires `m >= n + 2`.
    pub fn assemble(set: &InterpolationSet) -> Result<Self> {
        Self::assemble_with_condition_limit(set, DEFAULT_CONDITION_LIMIT)
    }

    /// Same as [`KktSystem::assemble`] with an explicit singularity
    /// threshold on the condition estimate.
    pub fn assemble_with_condition_limit(
        set: &InterpolationSet,
        condition_limit: f64,
    ) -> Result<Self> {
        let m = set.len();
        let n = set.dim();
        if m < n + 2 {
            return Err(Error::TooFewPoints { m, needed: n + 2 });
        }
        let base = set.base_point().clone();
        let mut shifted: Vec<DVector<f64>> = set.points().iter().map(|y| y - &base).collect();
        let scale = shifted
            .iter()
            .map(|s| s.norm())
            .fold(0.0f64, f64::max)
            .max(f64::MIN_POSITIVE);
        for s in &mut shifted {
            *s /= scale;
        }

        let size = m + n + 1;
        let mut w = DMatrix::zeros(size, size);
        for i in 0..m {
            for j in i..m {
                let dot = shifted[i].dot(&shifted[j]);
                let a = 0.5 * dot * dot;
                w[(i, j)] = a;
                w[(j, i)] = a;
            }
        }
        for i in 0..m {
            w[(i, m)] = 1.0;
            w[(m, i)] = 1.0;
            for k in 0..n {
                w[(i, m + 1 + k)] = shifted[i][k];
                w[(m + 1 + k, i)] = shifted[i][k];
            }
        }

        let svd = w.clone().svd(true, true);
        let sv = &svd.singular_values;
        let smax = sv.max();
        let smin = sv.min();
        let condition = if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        };

        Ok(Self {
            matrix: w,
            svd,
            condition,
            condition_limit,
            base,
            scale,
            m,
            n,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Estimated condition number of the full system (infinite when
    /// numerically singular).
    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn base(&self) -> &DVector<f64> {
        &self.base
    }

    pub fn is_nonsingular(&self) -> bool {
        self.condition.is_finite() && self.condition <= self.condition_limit
    }

    /// Solves the system for interpolation data `fvals` and returns
    /// `(lambda, c, g)`.
    pub fn solve(&self, fvals: &[f64]) -> Result<(DVector<f64>, f64, DVector<f64>)> {
        if fvals.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                actual: fvals.len(),
            });
        }
        if !self.is_nonsingular() {
            return Err(Error::NotPoised {
                condition: self.condition,
            });
        }
        let mut rhs = DVector::zeros(self.m + self.n + 1);
        for (i, f) in fvals.iter().enumerate() {
            rhs[i] = *f;
        }
        let sol = self
            .svd
            .solve(&rhs, 0.0)
            .map_err(|_| Error::NotPoised {
                condition: self.condition,
            })?;
        // Undo the assembly normalization so that H = sum lambda_i s_i s_i'
        // and g act on original coordinates.
        let s4 = self.scale.powi(4);
        let lambda = DVector::from_fn(self.m, |i, _| sol[i] / s4);
        let c = sol[self.m];
        let g = DVector::from_fn(self.n, |k, _| sol[self.m + 1 + k] / self.scale);
        Ok((lambda, c, g))
    }
}

/// Assembles the saddle-point system of `set` (see [`KktSystem`]).
pub fn assemble_kkt(set: &InterpolationSet) -> Result<KktSystem> {
    KktSystem::assemble(set)
}

/// Whether the minimum Frobenius norm problem on `set` has a unique
/// solution for every right-hand side, together with the condition
/// estimate of the system. Degenerate input yields `(false, inf)`
/// rather than an error.
pub fn is_poised(set: &InterpolationSet) -> (bool, f64) {
    match KktSystem::assemble(set) {
        Ok(sys) if sys.is_nonsingular() => (true, sys.condition()),
        Ok(sys) => (false, sys.condition()),
        Err(_) => (false, f64::INFINITY),
    }
}

fn model_from_multipliers(
    set: &InterpolationSet,
    base: &DVector<f64>,
    lambda: &DVector<f64>,
    c: f64,
    g: DVector<f64>,
) -> QuadraticModel {
    let n = set.dim();
    let mut h = DMatrix::zeros(n, n);
    for (i, y) in set.points().iter().enumerate() {
        let s = y - base;
        for r in 0..n {
            for cidx in 0..=r {
                h[(r, cidx)] += lambda[i] * s[r] * s[cidx];
            }
        }
    }
    for r in 0..n {
        for cidx in r + 1..n {
            h[(r, cidx)] = h[(cidx, r)];
        }
    }
    QuadraticModel::new(base.clone(), c, g, h).expect("dimensions agree by construction")
}

fn check_residual(set: &InterpolationSet, fvals: &[f64], model: &QuadraticModel) -> Result<()> {
    let fmax = fvals.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let tolerance = RESIDUAL_TOL_FACTOR * (1.0 + fmax);
    let mut residual = 0.0f64;
    for (y, f) in set.points().iter().zip(fvals) {
        let q = model.evaluate(y).expect("point dimension matches model");
        residual = residual.max((q - f).abs());
    }
    if residual > tolerance {
        return Err(Error::ResidualViolation {
            residual,
            tolerance,
        });
    }
    Ok(())
}

/// The quadratic interpolant of `fvals` on `set` minimizing the Frobenius
/// norm of its Hessian. The interpolation residual is re-checked after the
/// solve so that ill-conditioning cannot pass silently.
pub fn interpolate_mfn(set: &InterpolationSet, fvals: &[f64]) -> Result<QuadraticModel> {
    let sys = KktSystem::assemble(set)?;
    interpolate_mfn_with(&sys, set, fvals)
}

/// Variant reusing an already assembled system (one factorization shared
/// across several right-hand sides).
pub fn interpolate_mfn_with(
    sys: &KktSystem,
    set: &InterpolationSet,
    fvals: &[f64],
) -> Result<QuadraticModel> {
    let (lambda, c, g) = sys.solve(fvals)?;
    let model = model_from_multipliers(set, sys.base(), &lambda, c, g);
    check_residual(set, fvals, &model)?;
    Ok(model)
}

/// Solve without the residual gate. Geometry repair needs Lagrange
/// polynomials of exactly the ill-conditioned sets that the gate
/// rejects; their accuracy only steers a maximization there.
pub(crate) fn interpolate_mfn_ungated(
    sys: &KktSystem,
    set: &InterpolationSet,
    fvals: &[f64],
) -> Result<QuadraticModel> {
    let (lambda, c, g) = sys.solve(fvals)?;
    Ok(model_from_multipliers(set, sys.base(), &lambda, c, g))
}

/// The least-change refit: the quadratic interpolating `fvals` on `set`
/// that minimizes the Frobenius norm of the Hessian change against
/// `previous`. Reduces to plain minimum Frobenius norm interpolation of
/// the residual data.
pub fn interpolate_sym_broyden(
    set: &InterpolationSet,
    fvals: &[f64],
    previous: &QuadraticModel,
) -> Result<QuadraticModel> {
    if previous.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            actual: previous.dim(),
        });
    }
    if fvals.len() != set.len() {
        return Err(Error::DimensionMismatch {
            expected: set.len(),
            actual: fvals.len(),
        });
    }
    let residual: Vec<f64> = set
        .points()
        .iter()
        .zip(fvals)
        .map(|(y, f)| Ok(f - previous.evaluate(y)?))
        .collect::<Result<_>>()?;
    let update = interpolate_mfn(set, &residual)?;
    let model = previous.rebased(set.base_point())?.add(&update)?;
    check_residual(set, fvals, &model)?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::powell::powell_initial_set;
    use approx::assert_abs_diff_eq;
    use nalgebra::dvector;

    #[test]
    fn kkt_size_and_diagonal_for_powell_set() {
        let set = powell_initial_set(2, 5, 1.0, None).unwrap();
        let sys = assemble_kkt(&set).unwrap();
        assert_eq!(sys.matrix().nrows(), 8);
        let expected = [0.0, 0.5, 0.5, 0.5, 0.5];
        for (i, e) in expected.iter().enumerate() {
            assert_abs_diff_eq!(sys.matrix()[(i, i)], *e);
        }
    }

    #[test]
    fn kkt_off_diagonal_one_dimensional() {
        let set =
            InterpolationSet::new(vec![dvector![0.0], dvector![1.0], dvector![-1.0]]).unwrap();
        let sys = assemble_kkt(&set).unwrap();
        assert_eq!(sys.matrix().nrows(), 5);
        // A = [[0,0,0],[0,1/2,1/2],[0,1/2,1/2]]
        assert_abs_diff_eq!(sys.matrix()[(1, 2)], 0.5);
        assert_abs_diff_eq!(sys.matrix()[(1, 1)], 0.5);
        assert_abs_diff_eq!(sys.matrix()[(0, 0)], 0.0);
        assert!(sys.is_nonsingular());
    }

    #[test]
    fn too_few_points_is_rejected() {
        let set = InterpolationSet::new(vec![dvector![0.0, 0.0], dvector![1.0, 0.0]]).unwrap();
        assert!(matches!(
            assemble_kkt(&set),
            Err(Error::TooFewPoints { m: 2, needed: 4 })
        ));
    }

    #[test]
    fn duplicated_point_is_singular() {
        let set = InterpolationSet::new(vec![
            dvector![0.0, 0.0],
            dvector![1.0, 0.0],
            dvector![1.0, 0.0],
            dvector![0.0, 1.0],
        ])
        .unwrap();
        let (poised, cond) = is_poised(&set);
        assert!(!poised);
        assert!(cond.is_infinite() || cond > DEFAULT_CONDITION_LIMIT);
    }

    #[test]
    fn collinear_points_are_not_poised() {
        // m = n + 2 points on one line through the origin (n = 2).
        let set = InterpolationSet::new(vec![
            dvector![0.0, 0.0],
            dvector![1.0, 1.0],
            dvector![2.0, 2.0],
            dvector![-1.0, -1.0],
        ])
        .unwrap();
        let (poised, _) = is_poised(&set);
        assert!(!poised);
    }

    #[test]
    fn powell_sets_are_poised() {
        let set = powell_initial_set(3, 7, 1.0, None).unwrap();
        let (poised, cond) = is_poised(&set);
        assert!(poised);
        assert!(cond.is_finite());
    }

    #[test]
    fn constant_data_yields_constant_model() {
        let set = powell_initial_set(3, 6, 0.5, None).unwrap();
        let fvals = vec![1.0; 6];
        let q = interpolate_mfn(&set, &fvals).unwrap();
        assert_abs_diff_eq!(q.constant(), 1.0, epsilon = 1e-12);
        assert!(q.gradient().amax() <= 1e-12);
        assert!(q.hessian().amax() <= 1e-12);
    }

    #[test]
    fn linear_data_reproduced_exactly() {
        let set = powell_initial_set(2, 5, 1.0, None).unwrap();
        let fvals: Vec<f64> = set.points().iter().map(|y| y[0]).collect();
        let q = interpolate_mfn(&set, &fvals).unwrap();
        assert!(q.hessian().amax() <= 1e-12);
        assert_abs_diff_eq!(q.evaluate(&dvector![0.3, -0.7]).unwrap(), 0.3, epsilon = 1e-12);
    }

    #[test]
    fn separable_square_recovers_diagonal_hessian() {
        let set = powell_initial_set(2, 5, 1.0, None).unwrap();
        let fvals: Vec<f64> = set.points().iter().map(|y| y[0] * y[0]).collect();
        let q = interpolate_mfn(&set, &fvals).unwrap();
        assert_abs_diff_eq!(q.hessian()[(0, 0)], 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(q.hessian()[(1, 1)], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(q.hessian()[(0, 1)], 0.0, epsilon = 1e-10);
    }

    #[test]
    fn least_change_fixed_point() {
        let set = powell_initial_set(2, 4, 1.0, None).unwrap();
        let prev = QuadraticModel::new(
            DVector::zeros(2),
            0.7,
            dvector![1.0, -2.0],
            nalgebra::dmatrix![3.0, 1.0; 1.0, -1.0],
        )
        .unwrap();
        let fvals: Vec<f64> = set
            .points()
            .iter()
            .map(|y| prev.evaluate(y).unwrap())
            .collect();
        let q = interpolate_sym_broyden(&set, &fvals, &prev).unwrap();
        assert!(q.coefficient_distance(&prev).unwrap() <= 1e-12);
    }

    #[test]
    fn zero_previous_model_matches_plain_interpolation() {
        let set = powell_initial_set(3, 7, 1.0, None).unwrap();
        let fvals: Vec<f64> = set
            .points()
            .iter()
            .map(|y| 1.0 + y[0] - 2.0 * y[1] * y[2])
            .collect();
        let a = interpolate_mfn(&set, &fvals).unwrap();
        let b = interpolate_sym_broyden(&set, &fvals, &QuadraticModel::zero(3)).unwrap();
        assert!(a.coefficient_distance(&b).unwrap() <= 1e-12);
    }

    #[test]
    fn identity_previous_hessian_absorbs_curvature() {
        // Data from f(x) = ||x||^2 / 2 with previous Hessian I: the
        // residual data is affine, so the refit keeps H = I.
        let set = powell_initial_set(2, 5, 1.0, None).unwrap();
        let prev = QuadraticModel::new(
            DVector::zeros(2),
            0.0,
            DVector::zeros(2),
            DMatrix::identity(2, 2),
        )
        .unwrap();
        let fvals: Vec<f64> = set.points().iter().map(|y| 0.5 * y.norm_squared()).collect();
        let q = interpolate_sym_broyden(&set, &fvals, &prev).unwrap();
        assert!((q.hessian() - DMatrix::identity(2, 2)).amax() <= 1e-10);
        assert!(q.gradient().amax() <= 1e-10);
        assert!(q.constant().abs() <= 1e-10);
    }
}
