//! Quadratic polynomial models `Q(x) = c + g'(x - b) + (x - b)'H(x - b)/2`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A quadratic polynomial on R^n, stored around a base point `b`:
///
/// `Q(x) = c + g'(x - b) + (x - b)' H (x - b) / 2`
///
/// The Hessian is kept exactly symmetric: constructors symmetrize their
/// input by averaging `(H + H')/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ModelRepr", try_from = "ModelRepr")]
pub struct QuadraticModel {
    base: DVector<f64>,
    constant: f64,
    gradient: DVector<f64>,
    hessian: DMatrix<f64>,
}

impl QuadraticModel {
    /// Builds a model from its coefficients. The Hessian is symmetrized.
    pub fn new(
        base: DVector<f64>,
        constant: f64,
        gradient: DVector<f64>,
        hessian: DMatrix<f64>,
    ) -> Result<Self> {
        let n = base.len();
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if gradient.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: gradient.len(),
            });
        }
        if hessian.nrows() != n || hessian.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: hessian.nrows().max(hessian.ncols()),
            });
        }
        let hessian = (&hessian + hessian.transpose()) * 0.5;
        Ok(Self {
            base,
            constant,
            gradient,
            hessian,
        })
    }

    /// The zero polynomial on R^n with base at the origin.
    pub fn zero(n: usize) -> Self {
        Self {
            base: DVector::zeros(n),
            constant: 0.0,
            gradient: DVector::zeros(n),
            hessian: DMatrix::zeros(n, n),
        }
    }

    /// The constant polynomial `Q == value` on R^n.
    pub fn constant_poly(n: usize, value: f64) -> Self {
        let mut q = Self::zero(n);
        q.constant = value;
        q
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &DVector<f64> {
        &self.base
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn gradient(&self) -> &DVector<f64> {
        &self.gradient
    }

    pub fn hessian(&self) -> &DMatrix<f64> {
        &self.hessian
    }

    /// Evaluates `Q(x)`.
    pub fn evaluate(&self, x: &DVector<f64>) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        let d = x - &self.base;
        Ok(self.constant + self.gradient.dot(&d) + 0.5 * (&self.hessian * &d).dot(&d))
    }

    /// Gradient of `Q` at `x`: `g + H(x - b)`.
    pub fn gradient_at(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        let d = x - &self.base;
        Ok(&self.gradient + &self.hessian * d)
    }

    /// Frobenius norm of the Hessian.
    pub fn hessian_frobenius_norm(&self) -> f64 {
        self.hessian.norm()
    }

    /// The same polynomial expressed around a new base point
    /// (completing the square leaves values unchanged).
    pub fn rebased(&self, new_base: &DVector<f64>) -> Result<Self> {
        if new_base.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: new_base.len(),
            });
        }
        let d = new_base - &self.base;
        let constant = self.constant + self.gradient.dot(&d) + 0.5 * (&self.hessian * &d).dot(&d);
        let gradient = &self.gradient + &self.hessian * &d;
        Ok(Self {
            base: new_base.clone(),
            constant,
            gradient,
            hessian: self.hessian.clone(),
        })
    }

    /// The polynomial `x -> Q(x - t)`, i.e. the graph translated by `t`.
    pub fn translated(&self, t: &DVector<f64>) -> Result<Self> {
        if t.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: t.len(),
            });
        }
        Ok(Self {
            base: &self.base + t,
            ..self.clone()
        })
    }

    /// Pointwise sum `Q + other` (other is rebased onto `Q`'s base first).
    pub fn add(&self, other: &Self) -> Result<Self> {
        let other = other.rebased(&self.base)?;
        Ok(Self {
            base: self.base.clone(),
            constant: self.constant + other.constant,
            gradient: &self.gradient + &other.gradient,
            hessian: &self.hessian + &other.hessian,
        })
    }

    /// Pointwise `alpha * Q`.
    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            base: self.base.clone(),
            constant: alpha * self.constant,
            gradient: alpha * &self.gradient,
            hessian: alpha * &self.hessian,
        }
    }

    /// Maximum absolute coefficient difference against `other`, after
    /// rebasing both to the origin. Used to compare polynomials as
    /// polynomials rather than pointwise.
    pub fn coefficient_distance(&self, other: &Self) -> Result<f64> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        let origin = DVector::zeros(self.dim());
        let a = self.rebased(&origin)?;
        let b = other.rebased(&origin)?;
        let mut d: f64 = (a.constant - b.constant).abs();
        d = d.max((&a.gradient - &b.gradient).amax());
        d = d.max((&a.hessian - &b.hessian).amax());
        Ok(d)
    }
}

/// Wire representation: `{n, b, c, g, H}` with `H` flattened row-major.
#[derive(Serialize, Deserialize, Clone)]
struct ModelRepr {
    n: usize,
    b: Vec<f64>,
    c: f64,
    g: Vec<f64>,
    #[serde(rename = "H")]
    h: Vec<f64>,
}

impl From<QuadraticModel> for ModelRepr {
    fn from(q: QuadraticModel) -> Self {
        let n = q.dim();
        let mut h = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                h.push(q.hessian[(i, j)]);
            }
        }
        ModelRepr {
            n,
            b: q.base.iter().copied().collect(),
            c: q.constant,
            g: q.gradient.iter().copied().collect(),
            h,
        }
    }
}

impl TryFrom<ModelRepr> for QuadraticModel {
    type Error = Error;

    fn try_from(r: ModelRepr) -> Result<Self> {
        if r.b.len() != r.n || r.g.len() != r.n {
            return Err(Error::DimensionMismatch {
                expected: r.n,
                actual: r.b.len().min(r.g.len()),
            });
        }
        if r.h.len() != r.n * r.n {
            return Err(Error::DimensionMismatch {
                expected: r.n * r.n,
                actual: r.h.len(),
            });
        }
        QuadraticModel::new(
            DVector::from_vec(r.b),
            r.c,
            DVector::from_vec(r.g),
            DMatrix::from_row_slice(r.n, r.n, &r.h),
        )
    }
}
