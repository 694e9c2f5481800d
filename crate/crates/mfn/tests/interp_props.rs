//! Interpolation-level properties: Frobenius minimality against a
//! null-space oracle, the reconstruction identity, affine reproduction,
//! and translation equivariance, each over seeded random poised sets.

use mfn::interp::{interpolate_mfn, interpolate_sym_broyden, is_poised};
use mfn::lagrange::lagrange_polynomials_numeric;
use mfn::poisedness::sample_poised_set_containing_center;
use mfn::{InterpolationSet, LpBall, PNorm, QuadraticModel};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_set(n: usize, m: usize, seed: u64) -> InterpolationSet {
    let ball = LpBall::new(DVector::zeros(n), 1.0, PNorm::Finite(2.0)).unwrap();
    sample_poised_set_containing_center(n, m, &ball, seed, 200).unwrap()
}

/// Monomial basis values (1, x_1..x_n, then upper-triangular pure and
/// mixed quadratic terms) at a point; spans the quadratics on R^n.
fn monomials(x: &DVector<f64>) -> Vec<f64> {
    let n = x.len();
    let mut row = vec![1.0];
    for j in 0..n {
        row.push(x[j]);
    }
    for a in 0..n {
        for b in a..n {
            row.push(if a == b {
                0.5 * x[a] * x[a]
            } else {
                x[a] * x[b]
            });
        }
    }
    row
}

/// Quadratics vanishing on all points of `set`, spanned from the null
/// space of the point-evaluation matrix over the monomial basis.
fn null_space_quadratics(set: &InterpolationSet) -> Vec<QuadraticModel> {
    let n = set.dim();
    let m = set.len();
    let dim = 1 + n + n * (n + 1) / 2;
    // Zero-padded to square so the decomposition carries the full V
    // (the thin factor would drop the null-space rows).
    let mut mat = DMatrix::zeros(m.max(dim), dim);
    for (i, y) in set.points().iter().enumerate() {
        for (j, v) in monomials(y).into_iter().enumerate() {
            mat[(i, j)] = v;
        }
    }
    let svd = mat.svd(true, true);
    let v_t = svd.v_t.unwrap();
    let tol = 1e-10 * svd.singular_values.max().max(1.0);
    let rank = svd.singular_values.iter().filter(|s| **s > tol).count();
    let mut basis = Vec::new();
    for r in rank..dim {
        let coeffs = v_t.row(r);
        let c = coeffs[0];
        let g = DVector::from_fn(n, |j, _| coeffs[1 + j]);
        let mut h = DMatrix::zeros(n, n);
        let mut idx = 1 + n;
        for a in 0..n {
            for b in a..n {
                if a == b {
                    h[(a, a)] = coeffs[idx];
                } else {
                    h[(a, b)] = coeffs[idx];
                    h[(b, a)] = coeffs[idx];
                }
                idx += 1;
            }
        }
        basis.push(QuadraticModel::new(DVector::zeros(n), c, g, h).unwrap());
    }
    basis
}

#[test]
fn frobenius_minimality_against_null_space_perturbations() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for seed in 0..5u64 {
        let m = if seed % 2 == 0 { 4 } else { 5 };
        let set = random_set(2, m, seed);
        let fvals: Vec<f64> = set
            .points()
            .iter()
            .map(|_| rng.random_range(-1.0..=1.0))
            .collect();
        let q = interpolate_mfn(&set, &fvals).unwrap();
        let base_norm = q.hessian_frobenius_norm();

        let basis = null_space_quadratics(&set);
        assert!(!basis.is_empty(), "m < 6 must leave a null space");
        // Sanity: the basis really vanishes on the set.
        for z in &basis {
            for y in set.points() {
                assert!(z.evaluate(y).unwrap().abs() <= 1e-8);
            }
        }
        for _ in 0..1000 {
            let mut h = q.hessian().clone();
            for z in &basis {
                let w: f64 = rng.random_range(-3.0..=3.0);
                h += z.hessian() * w;
            }
            let perturbed = h.norm();
            assert!(
                base_norm <= perturbed + 1e-8,
                "seed={seed}: {base_norm} > {perturbed}"
            );
        }
    }
}

#[test]
fn reconstruction_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [2usize, 5] {
        for seed in 0..6u64 {
            let m = n + 2 + (seed as usize % n);
            let set = random_set(n, m, 1000 + seed);
            let fvals: Vec<f64> = (0..m).map(|_| rng.random_range(-2.0..=2.0)).collect();
            let q = interpolate_mfn(&set, &fvals).unwrap();
            let polys = lagrange_polynomials_numeric(&set).unwrap();
            let mut combo = QuadraticModel::zero(n);
            for (f, l) in fvals.iter().zip(&polys) {
                combo = combo.add(&l.scaled(*f)).unwrap();
            }
            let dist = q.coefficient_distance(&combo).unwrap();
            let scale = 1.0 + fvals.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            assert!(dist <= 1e-8 * scale, "n={n} seed={seed} dist={dist}");
        }
    }
}

#[test]
fn affine_data_has_zero_hessian() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in [2usize, 5] {
        for seed in 0..6u64 {
            let set = random_set(n, 2 * n + 1, 2000 + seed);
            let a0 = rng.random_range(-1.0..=1.0);
            let a = DVector::from_fn(n, |_, _| rng.random_range(-1.0..=1.0));
            let fvals: Vec<f64> = set.points().iter().map(|y| a0 + a.dot(y)).collect();
            let q = interpolate_mfn(&set, &fvals).unwrap();
            assert!(q.hessian_frobenius_norm() <= 1e-8, "n={n} seed={seed}");
        }
    }
}

#[test]
fn translation_equivariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for seed in 0..5u64 {
        let n = 3;
        let set = random_set(n, 6, 3000 + seed);
        let fvals: Vec<f64> = (0..6).map(|_| rng.random_range(-2.0..=2.0)).collect();
        let t = DVector::from_fn(n, |_, _| rng.random_range(-5.0..=5.0));
        let q = interpolate_mfn(&set, &fvals).unwrap();
        let q_shift = interpolate_mfn(&set.translated(&t).unwrap(), &fvals).unwrap();
        for _ in 0..20 {
            let x = DVector::from_fn(n, |_, _| rng.random_range(-2.0..=2.0));
            let a = q.evaluate(&x).unwrap();
            let b = q_shift.evaluate(&(&x + &t)).unwrap();
            assert!((a - b).abs() <= 1e-8 * (1.0 + a.abs()), "seed={seed}");
        }
    }
}

#[test]
fn broyden_chain_tracks_changing_data() {
    // Refit against progressively revealed curvature: the chain stays an
    // interpolant at every stage.
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let set = random_set(3, 7, 4000);
    let mut model = QuadraticModel::zero(3);
    for step in 1..=4 {
        let weight = step as f64;
        let fvals: Vec<f64> = set
            .points()
            .iter()
            .map(|y| weight * y[0] * y[1] + y.norm_squared() - rng.random_range(0.0..=0.1))
            .collect();
        model = interpolate_sym_broyden(&set, &fvals, &model).unwrap();
        for (y, f) in set.points().iter().zip(&fvals) {
            assert!((model.evaluate(y).unwrap() - f).abs() <= 1e-8 * (1.0 + f.abs()));
        }
    }
}

#[test]
fn sampler_rejects_until_poised() {
    let ball = LpBall::new(DVector::zeros(2), 1.0, PNorm::Finite(1.0)).unwrap();
    for seed in 0..10 {
        let set = sample_poised_set_containing_center(2, 5, &ball, seed, 200).unwrap();
        assert_eq!(set.point(0).unwrap(), &ball.center);
        let (poised, cond) = is_poised(&set);
        assert!(poised);
        assert!(cond <= 1e12);
        for y in set.points() {
            assert!(ball.contains(y).unwrap());
        }
    }
}
