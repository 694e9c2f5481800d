//! Maximization of quadratics (and of their absolute value) over lp
//! balls: the engine behind the well-poisedness constants.
//!
//! Exact, certified paths:
//! * `p = 2` for any quadratic (trust-region subproblem machinery);
//! * diagonal Hessians, any `p` (separable / group allocation);
//! * `p = inf` for general quadratics up to dimension 12 (face
//!   enumeration).
//!
//! Everything else falls back to a deterministic multistart ascent whose
//! result is feasible (hence a lower bound) but flagged `certified = false`.

mod boxmax;
mod multistart;
mod separable;
mod trs;

pub use separable::{max_lq_norm_over_lp_ball, max_lq_norm_over_lp_ball_numeric};
pub use trs::{maximize_on_euclidean_ball, TrsSolution};

use nalgebra::DVector;

use crate::ball::{LpBall, PNorm};
use crate::error::{Error, Result};
use crate::model::QuadraticModel;

/// Effort limits for the heuristic path.
#[derive(Debug, Clone)]
pub struct Budget {
    /// Number of multistart points.
    pub starts: usize,
    /// Ascent iterations per start.
    pub iterations: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            starts: 32,
            iterations: 200,
        }
    }
}

/// Result of maximizing a quadratic over a ball.
#[derive(Debug, Clone)]
pub struct BallMax {
    pub maximizer: DVector<f64>,
    pub value: f64,
    /// True only when an exact path produced the result.
    pub certified: bool,
}

/// Result of maximizing `|Q|` over a ball.
#[derive(Debug, Clone)]
pub struct AbsBallMax {
    pub value: f64,
    pub witness: DVector<f64>,
    pub certified: bool,
}

/// Maximizes `Q` over `ball`. The returned point is feasible up to
/// `radius * (1 + 1e-12)`; heuristic paths return their best point with
/// `certified = false` rather than failing.
pub fn max_quadratic_over_ball(
    q: &QuadraticModel,
    ball: &LpBall,
    budget: &Budget,
) -> Result<BallMax> {
    if q.dim() != ball.dim() {
        return Err(Error::DimensionMismatch {
            expected: ball.dim(),
            actual: q.dim(),
        });
    }
    let centered = q.rebased(&ball.center)?;
    let c0 = centered.constant();
    let g = centered.gradient();
    let h = centered.hessian();
    let delta = ball.radius;

    let (mut step, value, certified) = match ball.p {
        PNorm::Finite(p) if p == 2.0 => {
            let sol = trs::maximize_on_euclidean_ball(g, h, delta);
            let v = c0 + g.dot(&sol.step) + 0.5 * (h * &sol.step).dot(&sol.step);
            (sol.step, v, true)
        }
        PNorm::Infinity => {
            if let Some(d) = separable::try_diagonal(h, g, c0, delta) {
                let (s, v) = separable::max_box_diagonal(c0, g, &d, delta);
                (s, v, true)
            } else if q.dim() <= boxmax::MAX_FACE_DIM {
                let (s, v) = boxmax::max_box_general(g, h, delta);
                (s, c0 + v, true)
            } else {
                let (s, v) = multistart::max_heuristic(g, h, ball.p, delta, budget);
                (s, c0 + v, false)
            }
        }
        PNorm::Finite(p) => {
            let exact = separable::try_diagonal(h, g, c0, delta)
                .and_then(|d| separable::max_lp_diagonal(c0, g, &d, p, delta));
            match exact {
                Some((s, v)) => (s, v, true),
                None => {
                    let (s, v) = multistart::max_heuristic(g, h, ball.p, delta, budget);
                    (s, c0 + v, false)
                }
            }
        }
    };

    let norm = ball.p.norm(&step);
    if norm > delta * (1.0 + 1e-12) {
        step *= delta / norm;
    }
    Ok(BallMax {
        maximizer: &ball.center + step,
        value,
        certified,
    })
}

fn lex_less(a: &DVector<f64>, b: &DVector<f64>) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Maximizes `|Q|` over `ball` by maximizing `Q` and `-Q`. Ties between
/// the two sides resolve to the lexicographically smaller witness; the
/// result is certified only when both sides are.
pub fn max_abs_quadratic_over_ball(
    q: &QuadraticModel,
    ball: &LpBall,
    budget: &Budget,
) -> Result<AbsBallMax> {
    let pos = max_quadratic_over_ball(q, ball, budget)?;
    let neg = max_quadratic_over_ball(&q.scaled(-1.0), ball, budget)?;
    let certified = pos.certified && neg.certified;
    let (value, witness) = if neg.value > pos.value
        || (neg.value == pos.value && lex_less(&neg.maximizer, &pos.maximizer))
    {
        (neg.value, neg.maximizer)
    } else {
        (pos.value, pos.maximizer)
    };
    Ok(AbsBallMax {
        value,
        witness,
        certified,
    })
}
