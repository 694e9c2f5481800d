//! Exact maximization of a quadratic over a Euclidean ball.
//!
//! Maximizing `g's + s'Hs/2` on `||s||_2 <= delta` is the (negated)
//! trust-region subproblem. A maximizer satisfies
//! `(H - mu I) s = -g` with `mu >= 0`, `mu (||s|| - delta) = 0`, and
//! `H - mu I` negative semidefinite, so `mu >= max(0, lambda_max(H))`.
//! The multiplier is located on the secular curve
//! `phi(mu) = ||(mu I - H)^{-1} g||` by safeguarded bisection; the hard
//! case (no pole at `lambda_max`) is closed with an eigenvector step to
//! the boundary.

use nalgebra::{DMatrix, DVector};

/// Maximizer of `g's + s'Hs/2` over the centered Euclidean ball.
#[derive(Debug, Clone)]
pub struct TrsSolution {
    pub step: DVector<f64>,
    /// Multiplier `mu >= 0` of the stationarity condition `(H - mu I)s = -g`.
    pub multiplier: f64,
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

/// `||t(mu)||` with `t_i = d_i / (mu - lambda_i)`; infinite at poles.
fn phi(eigs: &[f64], d: &DVector<f64>, mu: f64) -> f64 {
    let mut sum = 0.0f64;
    for (i, &l) in eigs.iter().enumerate() {
        let den = mu - l;
        if den == 0.0 {
            if d[i] != 0.0 {
                return f64::INFINITY;
            }
            continue;
        }
        let t = d[i] / den;
        sum += t * t;
    }
    sum.sqrt()
}

fn step_for(mu: f64, eigs: &[f64], d: &DVector<f64>, v: &DMatrix<f64>) -> DVector<f64> {
    let n = eigs.len();
    let mut t = DVector::zeros(n);
    for i in 0..n {
        let den = mu - eigs[i];
        t[i] = if den != 0.0 { d[i] / den } else { 0.0 };
    }
    v * t
}

pub fn maximize_on_euclidean_ball(g: &DVector<f64>, h: &DMatrix<f64>, delta: f64) -> TrsSolution {
    let n = g.len();
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let eigs: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let v = eig.eigenvectors;
    let d = v.transpose() * g;

    let lambda_max = eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = eigs
        .iter()
        .fold(g.amax(), |a, &l| a.max(l.abs()))
        .max(1.0);

    // Interior stationary point: mu = 0 needs H negative semidefinite and
    // a consistent system H s = -g.
    if lambda_max <= 0.0 {
        let consistent = eigs
            .iter()
            .enumerate()
            .all(|(i, &l)| l != 0.0 || d[i].abs() <= 1e-14 * scale);
        if consistent {
            let s = step_for(0.0, &eigs, &d, &v);
            if s.norm() <= delta {
                return TrsSolution {
                    step: s,
                    multiplier: 0.0,
                };
            }
        }
    }

    let mu_edge = lambda_max.max(0.0);

    // Hard case: no pole at the edge and the limit step is short.
    let gap_tol = 1e-12 * scale;
    let in_gap: Vec<bool> = eigs.iter().map(|&l| lambda_max - l <= gap_tol).collect();
    let pole_mass: f64 = (0..n)
        .filter(|&i| in_gap[i])
        .map(|i| d[i] * d[i])
        .sum::<f64>()
        .sqrt();
    if lambda_max >= 0.0 && pole_mass <= 1e-12 * scale {
        let mut t = DVector::zeros(n);
        for i in 0..n {
            if !in_gap[i] {
                t[i] = d[i] / (mu_edge - eigs[i]);
            }
        }
        let s_tail = &v * &t;
        let tail_norm = s_tail.norm();
        if tail_norm < delta {
            let tau = (delta * delta - tail_norm * tail_norm).sqrt();
            let dir = v.column(
                (0..n)
                    .find(|&i| in_gap[i])
                    .expect("lambda_max attains the gap"),
            );
            let plus = &s_tail + tau * &dir;
            let minus = &s_tail - tau * &dir;
            let step = if lex_less(&minus, &plus) { minus } else { plus };
            return TrsSolution {
                step,
                multiplier: mu_edge,
            };
        }
    }

    // Boundary solution: bisect phi(mu) = delta on (mu_edge, inf);
    // phi decreases there from above delta to zero.
    let mut lo = mu_edge;
    let mut hi = mu_edge + scale.max(delta);
    let mut guard = 0;
    while phi(&eigs, &d, hi) > delta && guard < 200 {
        hi = mu_edge + 2.0 * (hi - mu_edge);
        guard += 1;
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(&eigs, &d, mid) > delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    let mut s = step_for(mu, &eigs, &d, &v);
    let norm = s.norm();
    if norm > 0.0 {
        s *= delta / norm;
    }
    TrsSolution {
        step: s,
        multiplier: mu,
    }
}
