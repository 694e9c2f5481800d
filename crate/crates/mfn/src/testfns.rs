//! Small corpus of objective functions with known minimizers for solver
//! and interpolation tests.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A named objective with its minimizer and minimum when they exist
/// (the linear function has none).
pub struct TestFunction {
    pub name: String,
    pub n: usize,
    objective: Box<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>,
    pub minimizer: Option<DVector<f64>>,
    pub minimum: Option<f64>,
}

impl TestFunction {
    pub fn eval(&self, x: &DVector<f64>) -> f64 {
        (self.objective)(x)
    }

    /// Borrows the objective as a plain callable.
    pub fn as_fn(&self) -> impl Fn(&DVector<f64>) -> f64 + '_ {
        move |x| (self.objective)(x)
    }
}

/// Looks up a test function by name. `seed` only affects
/// `quadratic-crossterms`, whose Hessian is `A'A + I` with `A` drawn
/// uniformly from `[-1, 1]` entries so the true minimum is available in
/// closed form from the recorded coefficients.
pub fn get_function(name: &str, n: usize, seed: u64) -> Result<TestFunction> {
    if n < 1 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    match name {
        "sphere" => Ok(TestFunction {
            name: name.into(),
            n,
            objective: Box::new(|x| x.norm_squared()),
            minimizer: Some(DVector::zeros(n)),
            minimum: Some(0.0),
        }),
        "linear" => Ok(TestFunction {
            name: name.into(),
            n,
            objective: Box::new(|x| x.sum()),
            minimizer: None,
            minimum: None,
        }),
        "rosenbrock" => {
            if n < 2 {
                return Err(Error::InvalidParameter(
                    "rosenbrock requires dimension at least 2".into(),
                ));
            }
            Ok(TestFunction {
                name: name.into(),
                n,
                objective: Box::new(|x| {
                    let mut f = 0.0;
                    for i in 0..x.len() - 1 {
                        let a = x[i + 1] - x[i] * x[i];
                        let b = 1.0 - x[i];
                        f += 100.0 * a * a + b * b;
                    }
                    f
                }),
                minimizer: Some(DVector::from_element(n, 1.0)),
                minimum: Some(0.0),
            })
        }
        "quadratic-crossterms" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..=1.0));
            let h = a.transpose() * &a + DMatrix::identity(n, n);
            let g = DVector::from_fn(n, |_, _| rng.random_range(-1.0..=1.0));
            let minimizer = h
                .clone()
                .cholesky()
                .expect("A'A + I is positive definite")
                .solve(&(-&g));
            let minimum = 0.5 * g.dot(&minimizer);
            let (hh, gg) = (h.clone(), g.clone());
            Ok(TestFunction {
                name: name.into(),
                n,
                objective: Box::new(move |x| gg.dot(x) + 0.5 * (&hh * x).dot(x)),
                minimizer: Some(minimizer),
                minimum: Some(minimum),
            })
        }
        other => Err(Error::UnknownFunction { name: other.into() }),
    }
}

/// Names accepted by [`get_function`].
pub const FUNCTION_NAMES: [&str; 4] = ["sphere", "quadratic-crossterms", "rosenbrock", "linear"];

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::dvector;

    #[test]
    fn sphere_minimum() {
        let f = get_function("sphere", 3, 0).unwrap();
        assert_eq!(f.eval(&DVector::zeros(3)), 0.0);
        assert_eq!(f.minimum, Some(0.0));
    }

    #[test]
    fn rosenbrock_minimum() {
        let f = get_function("rosenbrock", 2, 0).unwrap();
        assert_eq!(f.eval(&dvector![1.0, 1.0]), 0.0);
        assert!(f.eval(&dvector![-1.2, 1.0]) > 1.0);
    }

    #[test]
    fn unknown_name_is_rejected() {
        assert!(matches!(
            get_function("himmelblau", 2, 0),
            Err(Error::UnknownFunction { .. })
        ));
    }

    #[test]
    fn reported_minima_are_attained() {
        for (name, n) in [("sphere", 4), ("rosenbrock", 3), ("quadratic-crossterms", 2)] {
            let f = get_function(name, n, 7).unwrap();
            let (xstar, fstar) = (f.minimizer.clone().unwrap(), f.minimum.unwrap());
            assert_abs_diff_eq!(f.eval(&xstar), fstar, epsilon = 1e-12);
        }
    }

    #[test]
    fn seeded_quadratic_minimum_is_stationary() {
        let f = get_function("quadratic-crossterms", 2, 7).unwrap();
        let xstar = f.minimizer.clone().unwrap();
        let fstar = f.minimum.unwrap();
        // Probe around the minimizer: no direction improves.
        for d in [
            dvector![1e-4, 0.0],
            dvector![0.0, 1e-4],
            dvector![-1e-4, 1e-4],
        ] {
            assert!(f.eval(&(&xstar + &d)) >= fstar - 1e-12);
        }
    }
}
