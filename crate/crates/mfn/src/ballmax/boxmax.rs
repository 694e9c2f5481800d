//! Exact maximization of a general quadratic over a box by face
//! enumeration.
//!
//! The maximum over `[-delta, delta]^n` lies in the relative interior of
//! some face, where it is a stationary point of the face-restricted
//! quadratic. Enumerating all `3^n` faces (each coordinate free, pinned
//! low, or pinned high) and collecting every in-face stationary point
//! plus every vertex therefore yields a finite certificate. Intended for
//! small `n`; the dispatcher caps it at [`MAX_FACE_DIM`].

use nalgebra::{DMatrix, DVector};

/// Beyond this dimension the `3^n` enumeration is not attempted.
pub const MAX_FACE_DIM: usize = 12;

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

/// Maximizes `g's + s'Hs/2` over `||s||_inf <= delta` exactly.
pub(crate) fn max_box_general(
    g: &DVector<f64>,
    h: &DMatrix<f64>,
    delta: f64,
) -> (DVector<f64>, f64) {
    let n = g.len();
    assert!(n <= MAX_FACE_DIM, "face enumeration capped at {MAX_FACE_DIM}");
    let eval = |s: &DVector<f64>| g.dot(s) + 0.5 * (h * s).dot(s);

    let mut best_s = DVector::zeros(n);
    let mut best_v = eval(&best_s);
    let mut consider = |s: DVector<f64>, v: f64| {
        if v > best_v || (v == best_v && lex_less(&s, &best_s)) {
            best_v = v;
            best_s = s;
        }
    };

    // Ternary code per coordinate: 0 free, 1 pinned at -delta, 2 at +delta.
    let total = 3usize.pow(n as u32);
    let mut code = vec![0u8; n];
    for _ in 0..total {
        let free: Vec<usize> = (0..n).filter(|&j| code[j] == 0).collect();
        let mut s = DVector::zeros(n);
        for j in 0..n {
            s[j] = match code[j] {
                1 => -delta,
                2 => delta,
                _ => 0.0,
            };
        }
        if free.is_empty() {
            let v = eval(&s);
            consider(s, v);
        } else {
            let k = free.len();
            let mut hrr = DMatrix::zeros(k, k);
            let mut rhs = DVector::zeros(k);
            for (a, &ja) in free.iter().enumerate() {
                let mut acc = g[ja];
                for j in 0..n {
                    if code[j] != 0 {
                        acc += h[(ja, j)] * s[j];
                    }
                }
                rhs[a] = -acc;
                for (b, &jb) in free.iter().enumerate() {
                    hrr[(a, b)] = h[(ja, jb)];
                }
            }
            let svd = hrr.clone().svd(true, true);
            if let Ok(u) = svd.solve(&rhs, 1e-13) {
                let residual = (&hrr * &u - &rhs).amax();
                let scale = rhs.amax().max(1.0);
                let inside = u.iter().all(|x| x.abs() <= delta * (1.0 + 1e-9));
                if residual <= 1e-9 * scale && inside {
                    for (a, &ja) in free.iter().enumerate() {
                        s[ja] = u[a].clamp(-delta, delta);
                    }
                    let v = eval(&s);
                    consider(s, v);
                }
            }
        }
        // Advance the ternary counter.
        for digit in code.iter_mut() {
            if *digit == 2 {
                *digit = 0;
            } else {
                *digit += 1;
                break;
            }
        }
    }
    (best_s, best_v)
}
