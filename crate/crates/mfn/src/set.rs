//! Ordered interpolation sets with a distinguished base point.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered list of `m` points in R^n. Point order is significant:
/// Lagrange index `i` always refers to `points[i]`. The base index marks
/// the point used to shift the saddle-point system for conditioning
/// (the first point by default).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "SetRepr", try_from = "SetRepr")]
pub struct InterpolationSet {
    points: Vec<DVector<f64>>,
    base_index: usize,
}

impl InterpolationSet {
    /// Builds a set from its points; the first point is the base.
    pub fn new(points: Vec<DVector<f64>>) -> Result<Self> {
        Self::with_base_index(points, 0)
    }

    /// Builds a set with an explicit base index.
    pub fn with_base_index(points: Vec<DVector<f64>>, base_index: usize) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter(
                "interpolation set must contain at least one point".into(),
            ));
        }
        let n = points[0].len();
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        for p in &points {
            if p.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: p.len(),
                });
            }
        }
        if base_index >= points.len() {
            return Err(Error::IndexOutOfRange {
                index: base_index,
                len: points.len(),
            });
        }
        Ok(Self { points, base_index })
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    /// Number of points `m`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Result<&DVector<f64>> {
        self.points.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: self.points.len(),
        })
    }

    pub fn base_index(&self) -> usize {
        self.base_index
    }

    pub fn base_point(&self) -> &DVector<f64> {
        &self.points[self.base_index]
    }

    /// Changes the base index (e.g. to track the incumbent in a solver).
    pub fn set_base_index(&mut self, index: usize) -> Result<()> {
        if index >= self.points.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.points.len(),
            });
        }
        self.base_index = index;
        Ok(())
    }

    /// Replaces the point at `index`, keeping the order of the others.
    pub fn replace_point(&mut self, index: usize, point: DVector<f64>) -> Result<()> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: point.len(),
            });
        }
        if index >= self.points.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.points.len(),
            });
        }
        self.points[index] = point;
        Ok(())
    }

    /// The set translated by `t` (base index unchanged).
    pub fn translated(&self, t: &DVector<f64>) -> Result<Self> {
        if t.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: t.len(),
            });
        }
        Ok(Self {
            points: self.points.iter().map(|p| p + t).collect(),
            base_index: self.base_index,
        })
    }

    /// Index of the first point equal to `x` within `tol` in the max norm.
    pub fn position_of(&self, x: &DVector<f64>, tol: f64) -> Option<usize> {
        self.points.iter().position(|p| (p - x).amax() <= tol)
    }
}

/// Wire representation: `{n, points}` with one row per point.
#[derive(Serialize, Deserialize, Clone)]
struct SetRepr {
    n: usize,
    points: Vec<Vec<f64>>,
    #[serde(default)]
    base_index: usize,
}

impl From<InterpolationSet> for SetRepr {
    fn from(s: InterpolationSet) -> Self {
        SetRepr {
            n: s.dim(),
            points: s
                .points
                .iter()
                .map(|p| p.iter().copied().collect())
                .collect(),
            base_index: s.base_index,
        }
    }
}

impl TryFrom<SetRepr> for InterpolationSet {
    type Error = Error;

    fn try_from(r: SetRepr) -> Result<Self> {
        let points = r
            .points
            .into_iter()
            .map(|row| {
                if row.len() != r.n {
                    Err(Error::DimensionMismatch {
                        expected: r.n,
                        actual: row.len(),
                    })
                } else {
                    Ok(DVector::from_vec(row))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        InterpolationSet::with_base_index(points, r.base_index)
    }
}
