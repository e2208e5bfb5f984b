use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{dist_to_integer, DetError, DetValue};
use crate::matcore::{opnorm, schur_form, MatC, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelCertificate {
    pub member: bool,
    /// `(1/2π) Σ arg λ_i` over the eigenvalues of `u`.
    pub delta: DetValue,
    pub eigen_phases: Vec<f64>,
    /// `U`, `V` with `u = U V U⁻¹ V⁻¹`, present for members.
    pub u_factor: Option<MatC>,
    pub v_factor: Option<MatC>,
    pub reconstruction_residual: Option<f64>,
}

/// Decides whether the unitary `u` has trivial determinant and, if so,
/// writes it as one multiplicative commutator.
///
/// With `u = W D W*` and `D = diag(λ₁, …, λ_n)`, `Πλ_i = 1`, take `S` the
/// cyclic shift `e_j ↦ e_{j+1}` and `Δ = diag(δ_i)` with
/// `δ_i = Π_{k≤i} λ̄_k` (so `δ_n = 1`). Then `SΔS⁻¹Δ⁻¹ = D`, and
/// `U = WSW*`, `V = WΔW*` are unitaries with `(U, V) = u`.
pub fn kernel_membership(u: &MatC, tol: f64) -> Result<KernelCertificate, DetError> {
    u.validate()?;
    let n = u.dim();
    let id = MatC::identity(n);
    let deviation = opnorm(&(&(&u.adjoint() * u) - &id));
    if deviation > tol.max(1e-10) * n as f64 {
        return Err(DetError::NotUnitary { deviation });
    }
    let (w, t) = schur_form(u)?;
    let lambdas: Vec<C64> = (0..n).map(|i| t[(i, i)] / t[(i, i)].norm()).collect();
    let eigen_phases: Vec<f64> = lambdas.iter().map(|z| z.arg()).collect();
    let raw = eigen_phases.iter().sum::<f64>() / TAU;
    let delta = DetValue::new(C64::new(raw, 0.0), tol);
    if dist_to_integer(raw) > tol {
        return Ok(KernelCertificate {
            member: false,
            delta,
            eigen_phases,
            u_factor: None,
            v_factor: None,
            reconstruction_residual: None,
        });
    }

    let mut deltas = Vec::with_capacity(n);
    let mut acc = C64::new(1.0, 0.0);
    for z in &lambdas {
        acc *= z.conj();
        deltas.push(acc);
    }
    deltas[n - 1] = C64::new(1.0, 0.0);
    let shift = MatC::from_fn(n, |r, c| {
        if r == (c + 1) % n {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let diag = MatC::from_diag(&deltas);
    let uf = &(&w * &shift) * &w.adjoint();
    let vf = &(&w * &diag) * &w.adjoint();
    let comm = &(&(&uf * &vf) * &uf.adjoint()) * &vf.adjoint();
    let residual = opnorm(&(&comm - u));
    Ok(KernelCertificate {
        member: true,
        delta,
        eigen_phases,
        u_factor: Some(uf),
        v_factor: Some(vf),
        reconstruction_residual: Some(residual),
    })
}
