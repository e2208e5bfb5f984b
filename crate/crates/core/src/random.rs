//! Seeded instance generation.
//!
//! All randomness flows from `ChaCha20Rng::seed_from_u64(seed)`. Uniform
//! doubles are `rng.random::<f64>()` (53 random mantissa bits) and standard
//! normals come from the Box–Muller transform on consecutive uniform pairs,
//! so ports in other languages can reproduce instances bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::matcore::{opnorm, MatC, C64};

pub struct InstanceRng {
    rng: ChaCha20Rng,
}

impl InstanceRng {
    pub fn new(seed: u64) -> Self {
        InstanceRng {
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn index(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }

    pub fn normal(&mut self) -> f64 {
        // 1 - u lies in (0, 1], keeping the logarithm finite
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn complex_normal(&mut self) -> C64 {
        let re = self.normal();
        let im = self.normal();
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Complex Ginibre matrix scaled to unit operator norm.
    pub fn matrix(&mut self, n: usize) -> MatC {
        let m = MatC::from_fn(n, |_, _| self.complex_normal());
        let s = opnorm(&m);
        m.scale_re(1.0 / s)
    }

    pub fn hermitian(&mut self, n: usize) -> MatC {
        self.matrix(n).hermitian_part()
    }

    /// Random trace-zero matrix: Ginibre minus `(Tr/n)·I`.
    pub fn trace_zero(&mut self, n: usize) -> MatC {
        let m = self.matrix(n);
        let shift = m.trace() / n as f64;
        &m - &MatC::identity(n).scale(shift)
    }

    /// Haar-distributed unitary via QR with phase correction.
    pub fn unitary(&mut self, n: usize) -> MatC {
        let g = MatC::from_fn(n, |_, _| self.complex_normal());
        let qr = g.into_dmatrix().qr();
        let q = qr.q();
        let r = qr.r();
        let fixed = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            let d = r[(j, j)];
            let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
            q[(i, j)] * ph
        });
        MatC::from_dmatrix(fixed).expect("finite")
    }

    /// Positive semidefinite matrix of the given rank with eigenvalues in
    /// `[0.25, 1]`, in a random basis.
    pub fn psd_of_rank(&mut self, n: usize, rank: usize) -> MatC {
        let mut d = vec![0.0; n];
        for x in d.iter_mut().take(rank) {
            *x = self.uniform_in(0.25, 1.0);
        }
        let u = self.unitary(n);
        (&(&u * &MatC::from_real_diag(&d)) * &u.adjoint()).hermitian_part()
    }

    /// Square-zero matrix `P g Q` with `P, Q` orthogonal coordinate
    /// projections in a random basis, scaled to unit norm.
    pub fn square_zero(&mut self, n: usize) -> MatC {
        assert!(n >= 2, "square-zero instances need n >= 2");
        let k = 1 + self.index(n - 1);
        let g = self.matrix(n);
        let p = MatC::from_real_diag(&(0..n).map(|i| if i < k { 1.0 } else { 0.0 }).collect::<Vec<_>>());
        let q = &MatC::identity(n) - &p;
        let u = self.unitary(n);
        let z = &(&u * &(&(&p * &g) * &q)) * &u.adjoint();
        let s = opnorm(&z);
        if s == 0.0 {
            z
        } else {
            z.scale_re(1.0 / s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let a = InstanceRng::new(7).matrix(3);
        let b = InstanceRng::new(7).matrix(3);
        assert_eq!(a, b);
        assert_ne!(a, InstanceRng::new(8).matrix(3));
    }

    #[test]
    fn generators_meet_contracts() {
        let mut r = InstanceRng::new(1);
        assert!(r.trace_zero(4).trace().norm() < 1e-14);
        let u = r.unitary(4);
        assert!(opnorm(&(&(&u * &u.adjoint()) - &MatC::identity(4))) < 1e-13);
        for _ in 0..10 {
            let z = r.square_zero(4);
            assert!(opnorm(&(&z * &z)) <= 1e-12);
        }
        let p = r.psd_of_rank(5, 2);
        assert_eq!(crate::matcore::numerical_rank(&p).unwrap(), 2);
    }
}
