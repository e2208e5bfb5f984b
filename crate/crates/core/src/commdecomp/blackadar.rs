use super::{split_norm_factor, BoundCheck, DecompError};
use crate::matcore::{
    func_psd, hermitian_eigen, in_her_with_tol, opnorm, polar, range_basis, rank_threshold, MatC, DEFAULT_TOL,
    ZERO_FLOOR,
};

/// Outcome of looking for `x` with `x*x = a` and `xx* ∈ her(b ⊗ 1_n)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Comparison {
    /// `x ∈ M_n(M_d)`, nonzero only in its first block column.
    Witness(MatC),
    NotComparable { rank_a: usize, capacity: usize },
}

/// Blackadar witness for `a ≾ b^{⊕n}`.
///
/// In finite dimensions a witness exists iff `rank a ≤ n·rank b`. Writing
/// `a = Σ α_i u_i u_i*` and taking an orthonormal basis `w_l` of the range of
/// `b`, eigenvector `i` is sent to slot `(j, l) = (i / rank b, i mod rank b)`:
/// block `j` of the witness is `Σ √α_i w_l u_i*`.
pub fn blackadar_witness(a: &MatC, b: &MatC, n: usize) -> Result<Comparison, DecompError> {
    b.ensure_dim(a.dim())?;
    if n == 0 {
        return Err(DecompError::BadInput {
            detail: "amplification must be positive".into(),
        });
    }
    let d = a.dim();
    // func_psd rejects non-PSD input
    func_psd(a, |t| t)?;
    func_psd(b, |t| t)?;
    let eig = hermitian_eigen(a, DEFAULT_TOL)?;
    let top = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    let cut = rank_threshold(top).max(ZERO_FLOOR);
    let support: Vec<usize> = (0..d).rev().filter(|&i| eig.values[i] > cut).collect();
    let basis = range_basis(b)?;
    let rank_b = basis.ncols();
    let capacity = n * rank_b;
    if support.len() > capacity {
        return Ok(Comparison::NotComparable {
            rank_a: support.len(),
            capacity,
        });
    }
    let mut x = MatC::zeros(n * d);
    for (slot, &i) in support.iter().enumerate() {
        let j = slot / rank_b;
        let l = slot % rank_b;
        let amp = eig.values[i].sqrt();
        for r in 0..d {
            for c in 0..d {
                let v = basis[(r, l)] * eig.vectors[(c, i)].conj() * amp;
                x[(j * d + r, c)] += v;
            }
        }
    }
    Ok(Comparison::Witness(x))
}

/// Largest of `‖x*x − a‖` and the distance of `xx*` from `her(b ⊗ 1_n)`,
/// relative to `max(1, ‖a‖)`.
pub fn verify_witness(a: &MatC, b: &MatC, n: usize, x: &MatC) -> Result<f64, DecompError> {
    let d = a.dim();
    x.ensure_dim(n * d)?;
    let scale = opnorm(a).max(1.0);
    let xx = &x.adjoint() * x;
    let e1 = opnorm(&(&xx - &a.embed_corner(n * d)));
    let bb = b.amplify(n);
    let outer = x * &x.adjoint();
    let compressed = crate::matcore::her_compress(&bb, &outer)?;
    let e2 = opnorm(&(&outer - &compressed));
    Ok(e1.max(e2) / scale)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeelOutput {
    pub pairs: Vec<(MatC, MatC)>,
    pub tail: MatC,
    pub bound_checks: Vec<BoundCheck>,
}

/// For `h ∈ her(a)` and `a ≾ b^{⊕n}`, writes `h = Σ_j [z_j, w_j] + h'` with
/// `h' ∈ her(b)`, `‖z_j‖·‖w_j‖ ≤ ‖h‖` and `‖h'‖ ≤ n‖h‖`.
pub fn hereditary_peel(a: &MatC, b: &MatC, n: usize, h: &MatC, tol: f64) -> Result<PeelOutput, DecompError> {
    h.ensure_dim(a.dim())?;
    h.validate()?;
    if !in_her_with_tol(a, h, tol)? {
        let c = crate::matcore::her_compress(a, h)?;
        return Err(DecompError::NotInHereditary {
            deviation: opnorm(&(h - &c)),
        });
    }
    match blackadar_witness(a, b, n)? {
        Comparison::Witness(x) => hereditary_peel_with_witness(h, &x, n),
        Comparison::NotComparable { rank_a, capacity } => Err(DecompError::NotComparable { rank_a, capacity }),
    }
}

/// Peeling step given a witness `x ∈ M_n(M_d)` supported in its first block
/// column. With `x = v|x|` and `v_j` the blocks of `v`, and `h = h₁h₂` split
/// by norm: `z_j = h₁v_j*`, `w_j = v_j h₂`, `h' = Σ v_j h₂ h₁ v_j*`.
pub fn hereditary_peel_with_witness(h: &MatC, x: &MatC, n: usize) -> Result<PeelOutput, DecompError> {
    let d = h.dim();
    x.ensure_dim(n * d)?;
    let hn = opnorm(h);
    if hn <= ZERO_FLOOR {
        let pairs = (0..n).map(|_| (MatC::zeros(d), MatC::zeros(d))).collect();
        return Ok(PeelOutput {
            pairs,
            tail: MatC::zeros(d),
            bound_checks: Vec::new(),
        });
    }
    let v = polar(x)?.v;
    let (h1, h2) = split_norm_factor(h)?;
    let mut pairs = Vec::with_capacity(n);
    let mut tail = MatC::zeros(d);
    let mut max_prod = 0.0f64;
    for j in 0..n {
        let vj = v.block(d, j, 0);
        let z = &h1 * &vj.adjoint();
        let w = &vj * &h2;
        tail += &(&w * &h1) * &vj.adjoint();
        max_prod = max_prod.max(opnorm(&z) * opnorm(&w));
        pairs.push((z, w));
    }
    let checks = vec![
        BoundCheck::upper("peel: |h1|*|h2| <= |h|", hn, opnorm(&h1) * opnorm(&h2)),
        BoundCheck::upper("peel: |z_j|*|w_j| <= |h|", hn, max_prod),
        BoundCheck::upper("peel: |h'| <= n|h|", n as f64 * hn, opnorm(&tail)),
    ];
    Ok(PeelOutput {
        pairs,
        tail,
        bound_checks: checks,
    })
}
