//! Certified maximization of separable (diagonal-Hessian) quadratics
//! over lp balls, and lq-norm maximization over lp balls.
//!
//! After rebasing to the ball center the objective splits into
//! per-coordinate terms `g_j u_j + d_j u_j^2 / 2`. For `p = inf` the box
//! decouples and each coordinate is maximized exactly. For finite `p`
//! the coordinates are grouped by equal `(d, |g|)`; within a group the
//! best use of an lp budget `r` has a closed form (a norm-equivalence
//! factor), and the budget split across groups is a low-dimensional
//! allocation problem solved by grid search plus golden-section
//! refinement.

use nalgebra::{DMatrix, DVector};

use crate::ball::PNorm;

const DIAG_REL_TOL: f64 = 1e-11;
const GROUP_REL_TOL: f64 = 1e-9;
const ZERO_REL_TOL: f64 = 1e-10;

/// Returns the Hessian diagonal when the off-diagonal part is negligible
/// relative to the model scale, else `None`.
pub(crate) fn try_diagonal(
    h: &DMatrix<f64>,
    g: &DVector<f64>,
    c0: f64,
    delta: f64,
) -> Option<DVector<f64>> {
    let n = h.nrows();
    let mut diag_max = 0.0f64;
    let mut off_max = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let v = h[(i, j)].abs();
            if i == j {
                diag_max = diag_max.max(v);
            } else {
                off_max = off_max.max(v);
            }
        }
    }
    let scale = (diag_max * delta * delta)
        .max(g.amax() * delta)
        .max(c0.abs());
    if off_max * delta * delta <= DIAG_REL_TOL * scale || off_max == 0.0 {
        Some(DVector::from_fn(n, |i, _| h[(i, i)]))
    } else {
        None
    }
}

/// `max {||x||_q : ||x||_p <= 1}` as the closed form
/// `max{1, n^(1/q - 1/p)}` under the extended-exponent conventions.
pub fn max_lq_norm_over_lp_ball(n: usize, p: PNorm, q: PNorm) -> f64 {
    let e = q.inv() - p.inv();
    (1.0f64).max((n as f64).powf(e))
}

/// Numerical counterpart of [`max_lq_norm_over_lp_ball`]: stationarity
/// confines candidates to vectors that are uniform on their support, so
/// the maximum is found by enumerating the support size. Independent of
/// the closed form, and the oracle used to validate it.
pub fn max_lq_norm_over_lp_ball_numeric(n: usize, p: PNorm, q: PNorm) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for k in 1..=n {
        let kf = k as f64;
        let u = match p {
            PNorm::Infinity => 1.0,
            PNorm::Finite(pv) => kf.powf(-1.0 / pv),
        };
        let value = match q {
            PNorm::Infinity => u,
            PNorm::Finite(qv) => kf.powf(1.0 / qv) * u,
        };
        best = best.max(value);
    }
    best
}

/// Exact per-coordinate maximization over the box `||s||_inf <= delta`.
/// Ties prefer the smaller coordinate value for determinism.
pub(crate) fn max_box_diagonal(
    c0: f64,
    g: &DVector<f64>,
    d: &DVector<f64>,
    delta: f64,
) -> (DVector<f64>, f64) {
    let n = g.len();
    let mut s = DVector::zeros(n);
    let mut value = c0;
    for j in 0..n {
        let (u, v) = max_scalar_quadratic(g[j], d[j], delta);
        s[j] = u;
        value += v;
    }
    (s, value)
}

/// Maximum of `g u + d u^2 / 2` over `[-r, r]`, ties to the smaller `u`.
fn max_scalar_quadratic(g: f64, d: f64, r: f64) -> (f64, f64) {
    let eval = |u: f64| g * u + 0.5 * d * u * u;
    let mut candidates = [-r, r, 0.0, 0.0];
    let mut count = 2;
    if d < 0.0 {
        let crit = -g / d;
        if crit.abs() <= r {
            candidates[count] = crit;
            count += 1;
        }
    }
    let mut best_u = candidates[0];
    let mut best_v = eval(best_u);
    for &u in &candidates[1..count] {
        let v = eval(u);
        if v > best_v || (v == best_v && u < best_u) {
            best_u = u;
            best_v = v;
        }
    }
    (best_u, best_v)
}

#[derive(Debug)]
enum ItemKind {
    /// `d > 0`, `g = 0` on every coordinate of the group.
    Quad,
    /// `d = 0`, common `|g| > 0`.
    Linear,
    /// Single coordinate with arbitrary `(g, d)`.
    Mixed,
}

struct Item {
    coords: Vec<usize>,
    d: f64,
    gabs: f64,
    signs: Vec<f64>,
    kind: ItemKind,
}

impl Item {
    /// Best objective contribution of the group given lp budget `r`.
    fn value(&self, r: f64, p: f64) -> f64 {
        let nu = self.coords.len() as f64;
        match self.kind {
            ItemKind::Quad => {
                // max ||u||_2 over the group's lp ball of radius r.
                let m2 = 1.0f64.max(nu.powf(0.5 - 1.0 / p));
                0.5 * self.d * (r * m2) * (r * m2)
            }
            ItemKind::Linear => {
                let m1 = nu.powf(1.0 - 1.0 / p);
                self.gabs * r * m1
            }
            ItemKind::Mixed => max_scalar_quadratic(self.signs[0] * self.gabs, self.d, r).1,
        }
    }

    /// Writes the maximizing coordinates for budget `r` into `s`.
    fn witness(&self, r: f64, p: f64, s: &mut DVector<f64>) {
        let nu = self.coords.len() as f64;
        match self.kind {
            ItemKind::Quad => {
                if p <= 2.0 {
                    s[self.coords[0]] = -r;
                } else {
                    let u = r * nu.powf(-1.0 / p);
                    for &j in &self.coords {
                        s[j] = -u;
                    }
                }
            }
            ItemKind::Linear => {
                let u = r * nu.powf(-1.0 / p);
                for (idx, &j) in self.coords.iter().enumerate() {
                    s[j] = self.signs[idx] * u;
                }
            }
            ItemKind::Mixed => {
                s[self.coords[0]] = max_scalar_quadratic(self.signs[0] * self.gabs, self.d, r).0;
            }
        }
    }
}

/// Certified maximization of a diagonal quadratic over a finite-p ball.
/// Returns `None` when the coordinate structure does not reduce to at
/// most three allocation groups (the caller falls back to a heuristic).
pub(crate) fn max_lp_diagonal(
    c0: f64,
    g: &DVector<f64>,
    d: &DVector<f64>,
    p: f64,
    delta: f64,
) -> Option<(DVector<f64>, f64)> {
    let n = g.len();
    let scale = (d.amax() * delta * delta)
        .max(g.amax() * delta)
        .max(c0.abs());
    if scale == 0.0 {
        return Some((DVector::zeros(n), c0));
    }
    let zero_d = ZERO_REL_TOL * scale / (delta * delta);
    let zero_g = ZERO_REL_TOL * scale / delta;
    let same_d = GROUP_REL_TOL * scale / (delta * delta);
    let same_g = GROUP_REL_TOL * scale / delta;

    let mut items: Vec<Item> = Vec::new();
    for j in 0..n {
        let dj = if d[j].abs() <= zero_d { 0.0 } else { d[j] };
        let gj = if g[j].abs() <= zero_g { 0.0 } else { g[j] };
        if dj == 0.0 && gj == 0.0 {
            continue;
        }
        // Negative-curvature pure-quadratic coordinates never receive
        // budget: their best contribution is 0 at the center.
        if gj == 0.0 && dj < 0.0 {
            continue;
        }
        let mixed = dj != 0.0 && gj != 0.0;
        if let Some(item) = items.iter_mut().find(|it| {
            !mixed
                && matches!(it.kind, ItemKind::Quad | ItemKind::Linear)
                && (it.d - dj).abs() <= same_d
                && (it.gabs - gj.abs()).abs() <= same_g
        }) {
            item.coords.push(j);
            item.signs.push(gj.signum());
            continue;
        }
        let kind = if mixed {
            ItemKind::Mixed
        } else if dj != 0.0 {
            ItemKind::Quad
        } else {
            ItemKind::Linear
        };
        items.push(Item {
            coords: vec![j],
            d: dj,
            gabs: gj.abs(),
            signs: vec![if gj == 0.0 { 1.0 } else { gj.signum() }],
            kind,
        });
    }

    if items.len() > 3 {
        return None;
    }
    let mut s = DVector::zeros(n);
    if items.is_empty() {
        return Some((s, c0));
    }
    let (gain, radii) = allocate(&items, delta, p);
    for (item, r) in items.iter().zip(&radii) {
        item.witness(*r, p, &mut s);
    }
    Some((s, c0 + gain))
}

/// Splits an lp budget across groups, maximizing the summed group values.
/// One group takes the whole budget; two or three groups nest a 1-D
/// search over the budget share `t` (grid plus golden-section polish).
fn allocate(items: &[Item], budget: f64, p: f64) -> (f64, Vec<f64>) {
    if items.len() == 1 {
        return (items[0].value(budget, p), vec![budget]);
    }
    let split = |t: f64| -> (f64, f64) {
        let r0 = budget * t.powf(1.0 / p);
        let r1 = budget * (1.0 - t).powf(1.0 / p);
        (r0, r1)
    };
    let eval = |t: f64| -> f64 {
        let (r0, rest) = split(t);
        items[0].value(r0, p) + allocate(&items[1..], rest, p).0
    };

    let grid = if items.len() == 2 { 4096 } else { 256 };
    let mut best_t = 0.0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=grid {
        let t = i as f64 / grid as f64;
        let v = eval(t);
        if v > best_v {
            best_v = v;
            best_t = t;
        }
    }
    // Golden-section refinement around the best grid node.
    let mut a = (best_t - 1.0 / grid as f64).max(0.0);
    let mut b = (best_t + 1.0 / grid as f64).min(1.0);
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    for _ in 0..80 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1);
        }
    }
    let t_refined = 0.5 * (a + b);
    let v_refined = eval(t_refined);
    let (t, v) = if v_refined > best_v {
        (t_refined, v_refined)
    } else {
        (best_t, best_v)
    };
    let (r0, rest) = split(t);
    let (_, mut radii) = allocate(&items[1..], rest, p);
    radii.insert(0, r0);
    (v, radii)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::dvector;

    #[test]
    fn box_vertex_for_linear_objective() {
        let (s, v) = max_box_diagonal(
            0.0,
            &dvector![1.0, 1.0, 1.0],
            &DVector::zeros(3),
            1.0,
        );
        assert_eq!(v, 3.0);
        assert_eq!(s, dvector![1.0, 1.0, 1.0]);
    }

    #[test]
    fn box_tie_prefers_smaller_coordinate() {
        // Pure positive quadratic: both endpoints give the same value.
        let (s, v) = max_box_diagonal(0.0, &dvector![0.0], &dvector![2.0], 1.0);
        assert_eq!(v, 1.0);
        assert_eq!(s[0], -1.0);
    }

    #[test]
    fn norm_equivalence_closed_form() {
        assert_eq!(
            max_lq_norm_over_lp_ball(9, PNorm::Finite(1.0), PNorm::Finite(2.0)),
            1.0
        );
        assert_eq!(
            max_lq_norm_over_lp_ball(9, PNorm::Infinity, PNorm::Finite(2.0)),
            3.0
        );
        assert_eq!(
            max_lq_norm_over_lp_ball(4, PNorm::Finite(2.0), PNorm::Finite(1.0)),
            2.0
        );
    }

    #[test]
    fn norm_enumeration_matches_closed_form() {
        let orders = [
            PNorm::Finite(1.0),
            PNorm::Finite(1.5),
            PNorm::Finite(2.0),
            PNorm::Finite(3.0),
            PNorm::Infinity,
        ];
        for n in 1..=8usize {
            for p in orders {
                for q in orders {
                    let closed = max_lq_norm_over_lp_ball(n, p, q);
                    let numeric = max_lq_norm_over_lp_ball_numeric(n, p, q);
                    assert_abs_diff_eq!(closed, numeric, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn euclidean_group_allocation_recovers_sphere_maximum() {
        // max of ||x||_2^2 over the l1 ball: concentrate on one axis.
        let n = 3;
        let (s, v) = max_lp_diagonal(
            0.0,
            &DVector::zeros(n),
            &DVector::from_element(n, 2.0),
            1.0,
            1.0,
        )
        .unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(PNorm::Finite(1.0).norm(&s), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn two_group_split_beats_single_group_choices() {
        // -L1 shape with one curved and three straight coordinates at p = 3.
        let g = dvector![0.0, 1.0, 1.0, 1.0];
        let d = dvector![2.0, 0.0, 0.0, 0.0];
        let (_, v) = max_lp_diagonal(-1.0, &g, &d, 3.0, 1.0).unwrap();
        // All-linear endpoint: -1 + 3^(2/3); all-quad endpoint: 0.
        let endpoint = -1.0 + 3.0f64.powf(2.0 / 3.0);
        assert!(v >= endpoint - 1e-12);
        // The interior split (see the stationarity analysis of the
        // allocation curve) must not fall below either endpoint.
        assert!(v >= 0.0 - 1e-12);
    }

    #[test]
    fn permutation_and_sign_flip_invariance() {
        let g = dvector![0.5, 0.0, -0.5];
        let d = dvector![0.0, -1.0, 0.0];
        let (_, v1) = max_lp_diagonal(0.2, &g, &d, 1.5, 2.5).unwrap();
        // Permute coordinates and flip the sign of the linear terms.
        let g2 = dvector![-0.5, 0.5, 0.0];
        let d2 = dvector![0.0, 0.0, -1.0];
        let (_, v2) = max_lp_diagonal(0.2, &g2, &d2, 1.5, 2.5).unwrap();
        assert_abs_diff_eq!(v1, v2, epsilon = 1e-10);
    }
}
