//! A compact derivative-free trust-region solver demonstrating the
//! least-change (symmetric Broyden) refit, single-point set updates,
//! and Lagrange-based geometry repair.
//!
//! The loop: fit a model on the initial set, maximize the negated model
//! over the Euclidean trust region, evaluate the candidate, accept or
//! reject by the reduction ratio, swap exactly one interpolation point,
//! and refit. A geometry iteration replaces the farthest point by a
//! maximizer of its Lagrange polynomial when a rejected step coincides
//! with a spread-out set.

use nalgebra::DVector;

use crate::ball::{LpBall, PNorm};
use crate::ballmax::{max_abs_quadratic_over_ball, max_quadratic_over_ball, Budget};
use crate::error::{Error, Result};
use crate::interp::{interpolate_mfn, interpolate_sym_broyden, is_poised};
use crate::lagrange::{lagrange_polynomials_numeric, lagrange_polynomials_ungated};
use crate::model::QuadraticModel;
use crate::powell::{default_point_count, powell_initial_set};
use crate::set::InterpolationSet;

const RATIO_ACCEPT: f64 = 0.1;
const RATIO_EXPAND: f64 = 0.7;
const RADIUS_SHRINK: f64 = 0.5;
const RADIUS_EXPAND: f64 = 2.0;
const RADIUS_CONVERGED: f64 = 1e-8;
const RADIUS_STALL: f64 = 1e-13;

/// Options of [`solve`].
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Number of interpolation points (default `2n + 1`).
    pub points: Option<usize>,
    /// Initial trust-region radius.
    pub initial_radius: f64,
    /// Hard cap on objective evaluations.
    pub max_evaluations: usize,
    /// Target model-gradient norm at the incumbent.
    pub stationarity_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            points: None,
            initial_radius: 1.0,
            max_evaluations: 500,
            stationarity_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Model gradient below tolerance with a collapsed trust radius.
    Converged,
    BudgetExhausted,
    /// The trust radius collapsed without meeting the gradient target.
    Stalled,
    /// The objective returned a non-finite value.
    AbortedNonFinite,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveStatus::Converged => write!(f, "converged"),
            SolveStatus::BudgetExhausted => write!(f, "budget-exhausted"),
            SolveStatus::Stalled => write!(f, "stalled"),
            SolveStatus::AbortedNonFinite => write!(f, "aborted-non-finite"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Init,
    Accept,
    Reject,
    Geometry,
    Shrink,
}

impl std::fmt::Display for StepKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StepKind::Init => write!(f, "init"),
            StepKind::Accept => write!(f, "accept"),
            StepKind::Reject => write!(f, "reject"),
            StepKind::Geometry => write!(f, "geometry"),
            StepKind::Shrink => write!(f, "shrink"),
        }
    }
}

/// One history row per iteration.
#[derive(Debug, Clone)]
pub struct HistoryRecord {
    pub iteration: usize,
    pub evaluations: usize,
    pub best_value: f64,
    pub trust_radius: f64,
    pub step: StepKind,
}

/// Final outcome of a solver run.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub best_point: DVector<f64>,
    pub best_value: f64,
    pub evaluations: usize,
    pub status: SolveStatus,
    pub history: Vec<HistoryRecord>,
}

/// The stepping interface: construct, then call [`Solver::step`] until it
/// returns `false` (or use [`Solver::run`]). State is inspectable between
/// steps, which the tests use to check the one-point-update discipline
/// and the interpolation invariant.
pub struct Solver<F> {
    objective: F,
    options: SolveOptions,
    set: InterpolationSet,
    fvals: Vec<f64>,
    model: QuadraticModel,
    radius: f64,
    best_index: usize,
    best_seen_point: DVector<f64>,
    best_seen_value: f64,
    evaluations: usize,
    iteration: usize,
    geometry_due: bool,
    status: Option<SolveStatus>,
    history: Vec<HistoryRecord>,
    ball_budget: Budget,
}

impl<F: FnMut(&DVector<f64>) -> f64> Solver<F> {
    pub fn new(mut objective: F, x0: &DVector<f64>, options: SolveOptions) -> Result<Self> {
        let n = x0.len();
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let m = options.points.unwrap_or_else(|| default_point_count(n));
        if options.max_evaluations < m {
            return Err(Error::InvalidParameter(format!(
                "max_evaluations = {} cannot cover the {m} initial evaluations",
                options.max_evaluations
            )));
        }
        let set = powell_initial_set(n, m, options.initial_radius, Some(x0))?;

        let mut fvals = Vec::with_capacity(m);
        let mut status = None;
        for y in set.points() {
            let f = objective(y);
            if !f.is_finite() {
                status = Some(SolveStatus::AbortedNonFinite);
                break;
            }
            fvals.push(f);
        }
        let evaluations = fvals.len();
        let (best_index, best_value) = fvals
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((0, f64::INFINITY));

        let mut set = set;
        let model = if status.is_none() {
            set.set_base_index(best_index)?;
            match interpolate_mfn(&set, &fvals) {
                Ok(q) => q,
                Err(_) => {
                    status = Some(SolveStatus::Stalled);
                    QuadraticModel::zero(n)
                }
            }
        } else {
            QuadraticModel::zero(n)
        };

        let best_seen_point = set.point(best_index)?.clone();
        let history = vec![HistoryRecord {
            iteration: 0,
            evaluations,
            best_value,
            trust_radius: options.initial_radius,
            step: StepKind::Init,
        }];
        Ok(Self {
            objective,
            radius: options.initial_radius,
            options,
            set,
            fvals,
            model,
            best_index,
            best_seen_point,
            best_seen_value: best_value,
            evaluations,
            iteration: 0,
            geometry_due: false,
            status,
            history,
            ball_budget: Budget::default(),
        })
    }

    pub fn set(&self) -> &InterpolationSet {
        &self.set
    }

    pub fn fvals(&self) -> &[f64] {
        &self.fvals
    }

    pub fn model(&self) -> &QuadraticModel {
        &self.model
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    pub fn best_value(&self) -> f64 {
        self.best_seen_value
    }

    pub fn best_point(&self) -> &DVector<f64> {
        &self.best_seen_point
    }

    pub fn status(&self) -> Option<SolveStatus> {
        self.status
    }

    pub fn history(&self) -> &[HistoryRecord] {
        &self.history
    }

    fn record(&mut self, step: StepKind) {
        self.history.push(HistoryRecord {
            iteration: self.iteration,
            evaluations: self.evaluations,
            best_value: self.best_seen_value,
            trust_radius: self.radius,
            step,
        });
    }

    fn evaluate(&mut self, x: &DVector<f64>) -> Option<f64> {
        let f = (self.objective)(x);
        self.evaluations += 1;
        if !f.is_finite() {
            self.status = Some(SolveStatus::AbortedNonFinite);
            return None;
        }
        if f < self.best_seen_value {
            self.best_seen_value = f;
            self.best_seen_point = x.clone();
        }
        Some(f)
    }

    /// Index of the point farthest from the incumbent, skipping the
    /// incumbent itself; ties resolve to the largest `|L_i|` at `probe`
    /// (when given), then to the lowest index.
    fn farthest_index(&self, probe: Option<&DVector<f64>>) -> (usize, f64) {
        let center = self.set.point(self.best_index).expect("incumbent in set");
        let lagrange_at_probe: Option<Vec<f64>> = probe.and_then(|x| {
            lagrange_polynomials_numeric(&self.set).ok().map(|ls| {
                ls.iter()
                    .map(|l| l.evaluate(x).map(f64::abs).unwrap_or(0.0))
                    .collect()
            })
        });
        let mut best = (self.best_index, -1.0f64, 0.0f64);
        for (i, y) in self.set.points().iter().enumerate() {
            if i == self.best_index {
                continue;
            }
            let dist = (y - center).norm();
            let tie = lagrange_at_probe.as_ref().map_or(0.0, |v| v[i]);
            let better = dist > best.1 + 1e-14 * (1.0 + dist)
                || ((dist - best.1).abs() <= 1e-14 * (1.0 + dist) && tie > best.2);
            if better {
                best = (i, dist, tie);
            }
        }
        (best.0, best.1)
    }

    fn refit(&mut self) -> bool {
        match interpolate_sym_broyden(&self.set, &self.fvals, &self.model) {
            Ok(q) => {
                self.model = q;
                true
            }
            Err(_) => match interpolate_mfn(&self.set, &self.fvals) {
                Ok(q) => {
                    self.model = q;
                    true
                }
                Err(_) => false,
            },
        }
    }

    /// Runs one iteration. Returns `false` once a terminal status is set.
    pub fn step(&mut self) -> bool {
        if self.status.is_some() {
            return false;
        }
        self.iteration += 1;

        let incumbent = self.set.point(self.best_index).expect("incumbent").clone();
        let f_incumbent = self.fvals[self.best_index];

        // Stationarity proxy.
        let grad_norm = self
            .model
            .gradient_at(&incumbent)
            .map(|g| g.norm())
            .unwrap_or(f64::INFINITY);
        if grad_norm <= self.options.stationarity_tol && self.radius <= RADIUS_CONVERGED {
            self.status = Some(SolveStatus::Converged);
            return false;
        }

        let ball = LpBall::new(incumbent.clone(), self.radius, PNorm::Finite(2.0))
            .expect("positive radius");

        if self.geometry_due {
            self.geometry_due = false;
            let (far, dist) = self.farthest_index(None);
            if dist > 2.0 * self.radius {
                return self.geometry_step(far, &ball);
            }
        }

        // Trust-region candidate: maximize the negated model.
        let trs = max_quadratic_over_ball(&self.model.scaled(-1.0), &ball, &self.ball_budget)
            .expect("dimensions agree");
        let candidate = trs.maximizer;
        let predicted = trs.value + self.model.evaluate(&incumbent).expect("dim");
        if predicted <= 1e-14 * (1.0 + f_incumbent.abs()) {
            if self.radius <= RADIUS_STALL {
                self.status = Some(SolveStatus::Stalled);
                return false;
            }
            self.radius *= RADIUS_SHRINK;
            self.record(StepKind::Shrink);
            return true;
        }
        if self.evaluations >= self.options.max_evaluations {
            self.status = Some(SolveStatus::BudgetExhausted);
            return false;
        }

        let Some(f_candidate) = self.evaluate(&candidate) else {
            self.record(StepKind::Reject);
            return false;
        };
        let ratio = (f_incumbent - f_candidate) / predicted;

        // Swap exactly one point: the farthest from the incumbent, ties
        // by the candidate's Lagrange magnitudes.
        let (swap, far_dist) = self.farthest_index(Some(&candidate));
        let old_point = self.set.point(swap).expect("index in range").clone();
        let old_value = self.fvals[swap];
        self.set
            .replace_point(swap, candidate.clone())
            .expect("dimension agrees");
        self.fvals[swap] = f_candidate;
        let old_best = self.best_index;
        if f_candidate < f_incumbent {
            self.best_index = swap;
        }
        self.set
            .set_base_index(self.best_index)
            .expect("index in range");

        if !self.refit() {
            // The swap broke poisedness: undo it and schedule a repair.
            self.set
                .replace_point(swap, old_point)
                .expect("dimension agrees");
            self.fvals[swap] = old_value;
            self.best_index = old_best;
            self.set
                .set_base_index(self.best_index)
                .expect("index in range");
            self.geometry_due = true;
        }

        if ratio >= RATIO_EXPAND {
            self.radius = (self.radius * RADIUS_EXPAND)
                .min(1e3 * self.options.initial_radius.max(1.0));
        } else if ratio < RATIO_ACCEPT {
            self.radius *= RADIUS_SHRINK;
            if far_dist > 2.0 * self.radius {
                self.geometry_due = true;
            }
        }

        self.record(if ratio >= RATIO_ACCEPT {
            StepKind::Accept
        } else {
            StepKind::Reject
        });
        true
    }

    fn geometry_step(&mut self, index: usize, ball: &LpBall) -> bool {
        if self.evaluations >= self.options.max_evaluations {
            self.status = Some(SolveStatus::BudgetExhausted);
            return false;
        }
        let Ok(point) = geometry_improvement_point(&self.set, index, ball, &self.ball_budget)
        else {
            self.status = Some(SolveStatus::Stalled);
            return false;
        };
        let Some(f) = self.evaluate(&point) else {
            self.record(StepKind::Geometry);
            return false;
        };
        self.set
            .replace_point(index, point)
            .expect("dimension agrees");
        self.fvals[index] = f;
        if f < self.fvals[self.best_index] {
            self.best_index = index;
        }
        self.set
            .set_base_index(self.best_index)
            .expect("index in range");
        if !self.refit() {
            self.status = Some(SolveStatus::Stalled);
            return false;
        }
        self.record(StepKind::Geometry);
        true
    }

    /// Iterates to termination and returns the result.
    pub fn run(mut self) -> SolveResult {
        while self.step() {}
        SolveResult {
            best_point: self.best_seen_point,
            best_value: self.best_seen_value,
            evaluations: self.evaluations,
            status: self.status.unwrap_or(SolveStatus::Stalled),
            history: self.history,
        }
    }
}

/// Minimizes `objective` from `x0`; see [`SolveOptions`] for knobs.
pub fn solve<F: FnMut(&DVector<f64>) -> f64>(
    objective: F,
    x0: &DVector<f64>,
    options: SolveOptions,
) -> Result<SolveResult> {
    Ok(Solver::new(objective, x0, options)?.run())
}

/// A point maximizing `|L_index|` over `ball`: swapping `y_index` for it
/// cannot worsen the constant of well-poisedness in that ball.
pub fn geometry_improvement_point(
    set: &InterpolationSet,
    index: usize,
    ball: &LpBall,
    budget: &Budget,
) -> Result<DVector<f64>> {
    if index >= set.len() {
        return Err(Error::IndexOutOfRange {
            index,
            len: set.len(),
        });
    }
    let (poised, condition) = is_poised(set);
    if !poised {
        return Err(Error::NotPoised { condition });
    }
    let polys = lagrange_polynomials_ungated(set)?;
    let best = max_abs_quadratic_over_ball(&polys[index], ball, budget)?;
    Ok(best.witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn sphere_converges_quickly() {
        let result = solve(
            |x: &DVector<f64>| x.norm_squared(),
            &dvector![1.0, 1.0, 1.0],
            SolveOptions {
                max_evaluations: 100,
                ..SolveOptions::default()
            },
        )
        .unwrap();
        assert!(result.best_value <= 1e-8, "best {}", result.best_value);
        assert!(result.evaluations <= 100);
    }

    #[test]
    fn budget_is_honored_and_best_is_monotone() {
        let mut solver = Solver::new(
            |x: &DVector<f64>| (x[0] - 0.3).powi(2) + (x[1] + 0.2).powi(4),
            &dvector![2.0, -2.0],
            SolveOptions {
                max_evaluations: 60,
                ..SolveOptions::default()
            },
        )
        .unwrap();
        let mut last_best = f64::INFINITY;
        while solver.step() {
            assert!(solver.evaluations() <= 60);
            assert!(solver.best_value() <= last_best + 1e-15);
            last_best = solver.best_value();
        }
        assert!(solver.evaluations() <= 60);
    }

    #[test]
    fn init_uses_exactly_m_evaluations() {
        let mut count = 0usize;
        let solver = Solver::new(
            |x: &DVector<f64>| {
                count += 1;
                x.norm_squared()
            },
            &dvector![1.0, 2.0],
            SolveOptions {
                points: Some(4),
                max_evaluations: 10,
                ..SolveOptions::default()
            },
        )
        .unwrap();
        assert_eq!(solver.evaluations(), 4);
        drop(solver);
        assert_eq!(count, 4);
    }

    #[test]
    fn non_finite_objective_aborts() {
        let result = solve(
            |x: &DVector<f64>| {
                if x[0] > 0.5 {
                    f64::NAN
                } else {
                    x.norm_squared()
                }
            },
            &dvector![0.0, 0.0],
            SolveOptions {
                max_evaluations: 50,
                ..SolveOptions::default()
            },
        )
        .unwrap();
        assert_eq!(result.status, SolveStatus::AbortedNonFinite);
    }

    #[test]
    fn geometry_point_of_default_set_is_the_center() {
        let set = powell_initial_set(2, 5, 1.0, None).unwrap();
        let ball = LpBall::unit(2, PNorm::Finite(2.0));
        let point = geometry_improvement_point(&set, 0, &ball, &Budget::default()).unwrap();
        assert!(point.amax() <= 1e-8);
    }

    #[test]
    fn geometry_index_out_of_range() {
        let set = powell_initial_set(2, 5, 1.0, None).unwrap();
        let ball = LpBall::unit(2, PNorm::Finite(2.0));
        assert!(matches!(
            geometry_improvement_point(&set, 9, &ball, &Budget::default()),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn geometry_repairs_a_degraded_set() {
        // Nearly duplicated point: poised but with terrible geometry.
        let mut set = powell_initial_set(2, 5, 1.0, None).unwrap();
        set.replace_point(3, dvector![1.0 - 1e-5, 0.0]).unwrap();
        let (poised_before, cond_before) = is_poised(&set);
        assert!(poised_before);
        let ball = LpBall::unit(2, PNorm::Finite(2.0));
        let point = geometry_improvement_point(&set, 3, &ball, &Budget::default()).unwrap();
        set.replace_point(3, point).unwrap();
        let (poised_after, cond_after) = is_poised(&set);
        assert!(poised_after);
        assert!(cond_after < cond_before);
    }
}
