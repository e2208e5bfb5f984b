use super::DecompError;
use crate::matcore::{func_psd, opnorm, polar, MatC, ZERO_FLOOR};

/// Splits `s = q·r` with `q = v|s|^{1/2}`, `r = |s|^{1/2}` from the polar
/// decomposition `s = v|s|`, so that `‖q‖ = ‖r‖ = ‖s‖^{1/2}`.
pub fn split_norm_factor(s: &MatC) -> Result<(MatC, MatC), DecompError> {
    s.validate()?;
    let n = s.dim();
    if opnorm(s) <= ZERO_FLOOR {
        return Ok((MatC::zeros(n), MatC::zeros(n)));
    }
    let pp = polar(s)?;
    let r = func_psd(&pp.p, f64::sqrt)?;
    let q = &pp.v * &r;
    Ok((q, r))
}

/// Given `d_1, …, d_n` in `M_m` summing to zero, returns `X, Y ∈ M_n(M_m)`
/// whose commutator has diagonal blocks `d_1, …, d_n`.
///
/// With partial sums `s_k = d_1 + … + d_k = q_k r_k`, `X` is upper
/// bidiagonal with `X_{k,k+1} = q_k`, `X_{k+1,k+1} = r_k` and `Y` is lower
/// bidiagonal with `Y_{k+1,k} = r_k`, `Y_{k+1,k+1} = q_k`. The diagonal of
/// `[X,Y]` then telescopes to `s_k − s_{k−1}`.
pub fn diagonal_commutator(d: &[MatC], tol: f64) -> Result<(MatC, MatC), DecompError> {
    let n = d.len();
    if n == 0 {
        return Err(DecompError::BadInput {
            detail: "diagonal list is empty".into(),
        });
    }
    let m = d[0].dim();
    for di in d {
        di.validate()?;
        di.ensure_dim(m)?;
    }
    let max_d = d.iter().map(opnorm).fold(0.0, f64::max);
    let mut total = MatC::zeros(m);
    for di in d {
        total += di;
    }
    let sum_norm = opnorm(&total);
    if sum_norm > tol * max_d.max(ZERO_FLOOR) {
        return Err(DecompError::NonzeroSum { norm: sum_norm });
    }

    let mut x = MatC::zeros(n * m);
    let mut y = MatC::zeros(n * m);
    let mut partial = MatC::zeros(m);
    for k in 0..n.saturating_sub(1) {
        partial += &d[k];
        let (q, r) = split_norm_factor(&partial)?;
        x.set_block(m, k, k + 1, &q);
        x.set_block(m, k + 1, k + 1, &r);
        y.set_block(m, k + 1, k, &r);
        y.set_block(m, k + 1, k + 1, &q);
    }
    Ok((x, y))
}
