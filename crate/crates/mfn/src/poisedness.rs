//! Constants of well-poisedness: the numeric constant of an arbitrary
//! poised set in an lp ball, the closed forms available for the default
//! initial set, bounds, the optimality comparison against that set, and
//! sweeps over the point count.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ball::{pow_ext, LpBall, PNorm};
use crate::ballmax::{max_abs_quadratic_over_ball, Budget};
use crate::error::{Error, Result};
use crate::interp::is_poised;
use crate::lagrange::lagrange_polynomials_numeric;
use crate::model::QuadraticModel;
use crate::powell::powell_initial_set;
use crate::set::InterpolationSet;

/// Ties within this relative tolerance resolve to the lowest index when
/// locating the per-index maximum.
const ARGMAX_TIE_TOL: f64 = 1e-12;

/// How a reported constant was obtained, ordered by decreasing strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxMethod {
    /// Evaluated from an exact formula.
    ClosedForm,
    /// Numerical maximization along a certified (exact) path.
    CertifiedNumeric,
    /// Best-found value from the multistart heuristic.
    HeuristicNumeric,
}

impl std::fmt::Display for MaxMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MaxMethod::ClosedForm => write!(f, "closed-form"),
            MaxMethod::CertifiedNumeric => write!(f, "certified-numeric"),
            MaxMethod::HeuristicNumeric => write!(f, "heuristic-numeric"),
        }
    }
}

/// Per-index Lagrange maxima over a ball and their maximum.
#[derive(Debug, Clone)]
pub struct PoisednessReport {
    /// `max |L_i|` over the ball, one entry per point.
    pub per_index_maxima: Vec<f64>,
    /// The constant of well-poisedness: the largest per-index maximum.
    pub lambda: f64,
    /// Index attaining `lambda` (ties resolve to the lowest index).
    pub argmax_index: usize,
    /// A maximizer witness per index.
    pub witnesses: Vec<DVector<f64>>,
    /// Weakest certification used across the indices.
    pub method: MaxMethod,
    pub ball: LpBall,
}

/// Computes the constant of well-poisedness of `set` in `ball` by
/// maximizing `|L_i|` for every minimum Frobenius norm Lagrange
/// polynomial. A single-point set has the constant interpolant
/// `L_1 == 1`, so its constant is 1 in any ball.
pub fn poisedness_constant_numeric(
    set: &InterpolationSet,
    ball: &LpBall,
    budget: &Budget,
) -> Result<PoisednessReport> {
    if set.dim() != ball.dim() {
        return Err(Error::DimensionMismatch {
            expected: ball.dim(),
            actual: set.dim(),
        });
    }
    if set.len() == 1 {
        return Ok(PoisednessReport {
            per_index_maxima: vec![1.0],
            lambda: 1.0,
            argmax_index: 0,
            witnesses: vec![ball.center.clone()],
            method: MaxMethod::CertifiedNumeric,
            ball: ball.clone(),
        });
    }
    let polys = lagrange_polynomials_numeric(set)?;
    report_from_polynomials(&polys, ball, budget)
}

/// Shared tail of the numeric constant: maximize each `|L_i|` and fold.
pub(crate) fn report_from_polynomials(
    polys: &[QuadraticModel],
    ball: &LpBall,
    budget: &Budget,
) -> Result<PoisednessReport> {
    let mut maxima = Vec::with_capacity(polys.len());
    let mut witnesses = Vec::with_capacity(polys.len());
    let mut all_certified = true;
    for li in polys {
        let r = max_abs_quadratic_over_ball(li, ball, budget)?;
        maxima.push(r.value);
        witnesses.push(r.witness);
        all_certified &= r.certified;
    }
    let lambda = maxima.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = ARGMAX_TIE_TOL * (1.0 + lambda.abs());
    let argmax_index = maxima
        .iter()
        .position(|&v| v >= lambda - tol)
        .unwrap_or(0);
    Ok(PoisednessReport {
        per_index_maxima: maxima,
        lambda,
        argmax_index,
        witnesses,
        method: if all_certified {
            MaxMethod::CertifiedNumeric
        } else {
            MaxMethod::HeuristicNumeric
        },
        ball: ball.clone(),
    })
}

/// Which exact result produced a closed-form constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormSource {
    /// Exact value for `p <= 2`, any valid point count.
    PAtMostTwo,
    /// Exact value for the full default set `m = 2n + 1`, any `p`.
    FullSet,
    /// Exact value for `p = inf`, any valid point count.
    PInfinity,
}

impl std::fmt::Display for ClosedFormSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClosedFormSource::PAtMostTwo => write!(f, "p<=2"),
            ClosedFormSource::FullSet => write!(f, "m=2n+1"),
            ClosedFormSource::PInfinity => write!(f, "p=inf"),
        }
    }
}

fn validate_range(n: usize, m: usize) -> Result<()> {
    let (min, max) = (n + 2, 2 * n + 1);
    if n < 1 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if m < min || m > max {
        return Err(Error::PointCountOutOfRange { m, n, min, max });
    }
    Ok(())
}

/// The closed-form constant of well-poisedness of the default initial
/// set in the lp ball of its own radius, when one applies:
///
/// * `p <= 2`: `1 + (2n + 1 - m)^((p-1)/p)` (with `0^0 = 0`);
/// * `m = 2n + 1`: `max{1, n^((p-2)/p) - 1}`;
/// * `p = inf`: `max{n - 1, 2n - m + 2}`.
///
/// Returns `None` when no formula applies (`2 < p < inf` with
/// `m < 2n + 1`). When several apply their agreement is asserted.
pub fn lambda_p_closed(n: usize, m: usize, p: PNorm) -> Result<Option<(f64, ClosedFormSource)>> {
    validate_range(n, m)?;
    let nf = n as f64;
    let excess = (2 * n + 1 - m) as f64;

    let mut candidates: Vec<(f64, ClosedFormSource)> = Vec::new();
    if let PNorm::Finite(pv) = p {
        if pv <= 2.0 {
            let value = 1.0 + pow_ext(excess, p.frac_pm1());
            candidates.push((value, ClosedFormSource::PAtMostTwo));
        }
    }
    if m == 2 * n + 1 {
        let value = 1.0f64.max(nf.powf(p.frac_pm2()) - 1.0);
        candidates.push((value, ClosedFormSource::FullSet));
    }
    if p.is_infinite() {
        let value = (nf - 1.0).max(2.0 * nf - m as f64 + 2.0);
        candidates.push((value, ClosedFormSource::PInfinity));
    }

    match candidates.split_first() {
        None => Ok(None),
        Some((first, rest)) => {
            for other in rest {
                debug_assert!(
                    (first.0 - other.0).abs() <= 1e-12 * (1.0 + first.0.abs()),
                    "closed forms disagree: {first:?} vs {other:?}"
                );
            }
            Ok(Some(*first))
        }
    }
}

/// Lower and upper bounds `1 + (2n + 1 - m)^((p-1)/p) <= lambda <= n`.
pub fn lambda_p_bounds(n: usize, m: usize, p: PNorm) -> Result<(f64, f64)> {
    validate_range(n, m)?;
    let excess = (2 * n + 1 - m) as f64;
    let lower = 1.0 + pow_ext(excess, p.frac_pm1());
    let upper = n as f64;
    debug_assert!(lower <= upper + 1e-12);
    Ok((lower, upper))
}

/// Largest `p` for which the optimality of the full default set is
/// guaranteed: infinite when `n <= 2`, else `2 log n / log(n/2)`.
pub fn optimality_p_limit(n: usize) -> f64 {
    if n <= 2 {
        f64::INFINITY
    } else {
        let nf = n as f64;
        2.0 * nf.ln() / (nf / 2.0).ln()
    }
}

/// Outcome of comparing a set's constant against the full default set.
#[derive(Debug, Clone)]
pub struct OptimalityCheck {
    /// Numeric constant of the tested set.
    pub lambda: f64,
    /// Constant of the default set with `m = 2n + 1` in the same ball.
    pub reference: f64,
    /// `lambda >= reference - 1e-8`.
    pub satisfies_theorem: bool,
}

/// Compares the constant of `set` (which must contain the ball center)
/// against the full default set's constant in the same ball.
pub fn optimality_gap(
    set: &InterpolationSet,
    ball: &LpBall,
    budget: &Budget,
) -> Result<OptimalityCheck> {
    let tol = 1e-12 * (1.0 + ball.center.amax());
    if set.position_of(&ball.center, tol).is_none() {
        return Err(Error::CenterNotInSet);
    }
    let n = set.dim();
    let report = poisedness_constant_numeric(set, ball, budget)?;
    let (reference, _) = lambda_p_closed(n, 2 * n + 1, ball.p)?
        .expect("the full-set closed form always applies when m = 2n + 1");
    Ok(OptimalityCheck {
        lambda: report.lambda,
        reference,
        satisfies_theorem: report.lambda >= reference - 1e-8,
    })
}

/// Requested columns of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Closed,
    Numeric,
    Both,
}

/// One row of a point-count sweep at fixed `(n, p, delta)`.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub m: usize,
    pub closed: Option<f64>,
    pub closed_source: Option<ClosedFormSource>,
    pub numeric: Option<f64>,
    pub method: Option<MaxMethod>,
    pub abs_diff: Option<f64>,
}

/// Tabulates the constant of the default initial set against the point
/// count `m in [n + 2, 2n + 1]`, numerically and/or by closed form.
/// Rows are emitted in increasing `m` regardless of evaluation order.
pub fn sweep_lambda_vs_m(
    n: usize,
    p: PNorm,
    delta: f64,
    mode: SweepMode,
    budget: &Budget,
) -> Result<Vec<SweepRow>> {
    if n < 1 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let mut rows = Vec::new();
    for m in n + 2..=2 * n + 1 {
        let closed = if mode != SweepMode::Numeric {
            lambda_p_closed(n, m, p)?
        } else {
            None
        };
        let (numeric, method) = if mode != SweepMode::Closed {
            let set = powell_initial_set(n, m, delta, None)?;
            let ball = LpBall::new(DVector::zeros(n), delta, p)?;
            let report = poisedness_constant_numeric(&set, &ball, budget)?;
            (Some(report.lambda), Some(report.method))
        } else {
            (None, None)
        };
        let abs_diff = match (closed, numeric) {
            (Some((c, _)), Some(v)) => Some((c - v).abs()),
            _ => None,
        };
        rows.push(SweepRow {
            m,
            closed: closed.map(|(v, _)| v),
            closed_source: closed.map(|(_, s)| s),
            numeric,
            method,
            abs_diff,
        });
    }
    Ok(rows)
}

/// Draws a poised set of `m` points inside `ball` whose first point is
/// the center; used by the optimality experiments. Sampling is uniform
/// on the ball (box sampling with rejection); draws whose saddle-point
/// system is near singular are rejected and retried.
pub fn sample_poised_set_containing_center(
    n: usize,
    m: usize,
    ball: &LpBall,
    seed: u64,
    max_tries: usize,
) -> Result<InterpolationSet> {
    if ball.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: ball.dim(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_tries {
        let mut points = Vec::with_capacity(m);
        points.push(ball.center.clone());
        while points.len() < m {
            let candidate = DVector::from_fn(n, |j, _| {
                ball.center[j] + rng.random_range(-ball.radius..=ball.radius)
            });
            if ball.contains(&candidate)? {
                points.push(candidate);
            }
        }
        let set = InterpolationSet::new(points)?;
        let (poised, _) = is_poised(&set);
        if poised {
            return Ok(set);
        }
    }
    Err(Error::NotPoised {
        condition: f64::INFINITY,
    })
}
