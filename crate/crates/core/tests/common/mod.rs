//! Test-only oracles and instance builders shared by the integration tests.
#![allow(dead_code)]

use cforge_core::matcore::{her_compress, opnorm, support_projection, MatC, C64};
use cforge_core::random::InstanceRng;
use nalgebra::{DMatrix, DVector};

/// Solves `a·x − x·b = c` through the Kronecker form
/// `(I ⊗ a − bᵀ ⊗ I) vec(x) = vec(c)` with column-major `vec`.
pub fn sylvester_kron(a: &MatC, b: &MatC, c: &MatC) -> MatC {
    let m = a.dim();
    let (a, b, c) = (a.as_dmatrix(), b.as_dmatrix(), c.as_dmatrix());
    let big = DMatrix::from_fn(m * m, m * m, |r, s| {
        let (i, j) = (r % m, r / m);
        let (k, l) = (s % m, s / m);
        let mut v = C64::new(0.0, 0.0);
        if j == l {
            v += a[(i, k)];
        }
        if i == k {
            v -= b[(l, j)];
        }
        v
    });
    let rhs = DVector::from_fn(m * m, |r, _| c[(r % m, r / m)]);
    let sol = big.lu().solve(&rhs).expect("spectra are disjoint");
    MatC::from_dmatrix(DMatrix::from_fn(m, m, |i, j| sol[j * m + i])).unwrap()
}

pub fn dist(a: &MatC, b: &MatC) -> f64 {
    opnorm(&(a - b))
}

/// Random trace-zero element of `her(e)`.
pub fn trace_zero_in(e: &MatC, rng: &mut InstanceRng) -> MatC {
    let c = her_compress(e, &rng.matrix(e.dim())).unwrap();
    let p = support_projection(e).unwrap();
    let shift = c.trace() / p.trace().re;
    &c - &p.scale(shift)
}

/// Random element of `her(e)`.
pub fn element_in(e: &MatC, rng: &mut InstanceRng) -> MatC {
    her_compress(e, &rng.matrix(e.dim())).unwrap()
}

/// `λ·1 + k` with `‖k‖ = r`.
pub fn shifted_contraction(rng: &mut InstanceRng, m: usize, lambda: f64, r: f64) -> MatC {
    &MatC::identity(m).scale_re(lambda) + &rng.matrix(m).scale_re(r)
}

/// Unitary with determinant one.
pub fn special_unitary(rng: &mut InstanceRng, n: usize) -> MatC {
    let q = rng.unitary(n);
    let det = q.as_dmatrix().determinant();
    q.scale(C64::from_polar(1.0, -det.arg() / n as f64))
}

/// `W diag(e^{2πi k_j t}) W*` sampled on a closed loop.
pub fn winding_loop(w: &MatC, windings: &[i32], count: usize) -> cforge_core::dhsdet::PathOfInvertibles {
    cforge_core::dhsdet::PathOfInvertibles::sample(count, true, |t| {
        let d: Vec<C64> = windings
            .iter()
            .map(|&k| C64::from_polar(1.0, std::f64::consts::TAU * k as f64 * t))
            .collect();
        &(w * &MatC::from_diag(&d)) * &w.adjoint()
    })
}
