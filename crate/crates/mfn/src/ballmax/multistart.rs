//! Multistart ascent fallback for ball shapes without an exact path.
//!
//! Starts are the center, the axis points, a vertex sample (for boxes),
//! and seeded boundary points; each start runs a backtracking gradient
//! ascent with radial pull-in to stay feasible. The returned value is
//! attained at a feasible point, so it always lower-bounds the true
//! maximum; results are merged deterministically (best value, then
//! lexicographically smallest witness).

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ball::PNorm;
use crate::ballmax::Budget;

const SEED: u64 = 0x6d66_6e5f_6d73;

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

fn pull_in(s: &mut DVector<f64>, p: PNorm, delta: f64) {
    let norm = p.norm(s);
    if norm > delta {
        *s *= delta / norm;
    }
}

/// Best-found maximization of `g's + s'Hs/2` over `||s||_p <= delta`.
pub(crate) fn max_heuristic(
    g: &DVector<f64>,
    h: &DMatrix<f64>,
    p: PNorm,
    delta: f64,
    budget: &Budget,
) -> (DVector<f64>, f64) {
    let n = g.len();
    let eval = |s: &DVector<f64>| g.dot(s) + 0.5 * (h * s).dot(s);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    let mut starts: Vec<DVector<f64>> = Vec::with_capacity(budget.starts.max(1));
    starts.push(DVector::zeros(n));
    for j in 0..n {
        for sign in [1.0, -1.0] {
            let mut s = DVector::zeros(n);
            s[j] = sign * delta;
            starts.push(s);
        }
    }
    if p.is_infinite() {
        // Vertex sample: the gradient-aligned corner plus seeded corners.
        let mut corner = DVector::from_fn(n, |j, _| if g[j] >= 0.0 { delta } else { -delta });
        starts.push(corner.clone());
        for _ in 0..4 {
            for j in 0..n {
                corner[j] = if rng.random::<bool>() { delta } else { -delta };
            }
            starts.push(corner.clone());
        }
    }
    while starts.len() < budget.starts.max(1) {
        let mut z = DVector::from_fn(n, |_, _| rng.random_range(-1.0..=1.0));
        let norm = p.norm(&z);
        if norm == 0.0 {
            continue;
        }
        z *= delta / norm;
        starts.push(z);
    }
    starts.truncate(budget.starts.max(1));

    let mut best_s = DVector::zeros(n);
    let mut best_v = eval(&best_s);
    for start in starts {
        let mut s = start;
        pull_in(&mut s, p, delta);
        let mut value = eval(&s);
        let mut alpha = delta;
        for _ in 0..budget.iterations {
            let grad = g + h * &s;
            let gnorm = grad.norm();
            if gnorm <= 1e-15 * (1.0 + value.abs()) || alpha <= 1e-16 * delta {
                break;
            }
            let mut trial = &s + (alpha / gnorm) * &grad;
            pull_in(&mut trial, p, delta);
            let tv = eval(&trial);
            if tv > value + 1e-16 * (1.0 + value.abs()) {
                s = trial;
                value = tv;
                alpha *= 1.3;
            } else {
                alpha *= 0.5;
            }
        }
        if value > best_v || (value == best_v && lex_less(&s, &best_s)) {
            best_v = value;
            best_s = s;
        }
    }
    (best_s, best_v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    #[test]
    fn finds_linear_maximum_on_l3_ball() {
        let (s, v) = max_heuristic(
            &dvector![1.0, 0.0],
            &DMatrix::zeros(2, 2),
            PNorm::Finite(3.0),
            1.0,
            &Budget::default(),
        );
        assert!((v - 1.0).abs() <= 1e-6, "value {v}");
        assert!((s[0] - 1.0).abs() <= 1e-3);
    }

    #[test]
    fn stays_feasible() {
        let (s, _) = max_heuristic(
            &dvector![1.0, -2.0, 0.5],
            &dmatrix![1.0, 0.2, 0.0; 0.2, -1.0, 0.4; 0.0, 0.4, 2.0],
            PNorm::Finite(1.5),
            0.7,
            &Budget::default(),
        );
        assert!(PNorm::Finite(1.5).norm(&s) <= 0.7 * (1.0 + 1e-12));
    }
}
