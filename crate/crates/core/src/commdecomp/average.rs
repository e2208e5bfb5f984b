use super::{BoundCheck, DecompCertificate, DecompError};
use crate::matcore::{opnorm, MatC};

/// Turns a certificate for `h ⊗ 1_n ∈ M_n(A)` into one for `h ∈ A` by
/// averaging the diagonal blocks: pairs `(x_{j,k,l}/n, y_{j,l,k})` over all
/// input pairs `j` and block indices `k, l`, with residual the average of
/// the diagonal blocks of the input residual.
pub fn matrix_average_reduce(cert: &DecompCertificate, n: usize, tol: f64) -> Result<DecompCertificate, DecompError> {
    let total = cert.target.dim();
    if n == 0 || total % n != 0 {
        return Err(DecompError::ShapeMismatch { dim: total, block: n });
    }
    let m = total / n;
    let h = cert.target.block(m, 0, 0);
    let scale = opnorm(&cert.target).max(1.0);
    let mut deviation = 0.0f64;
    for k in 0..n {
        for l in 0..n {
            let blk = cert.target.block(m, k, l);
            let want = if k == l { h.clone() } else { MatC::zeros(m) };
            deviation = deviation.max(opnorm(&(&blk - &want)));
        }
    }
    if deviation > tol * scale {
        return Err(DecompError::BadInput {
            detail: format!("target is not of the form h ⊗ 1_{n} (deviation {deviation:e})"),
        });
    }

    let inv = 1.0 / n as f64;
    let mut pairs = Vec::with_capacity(cert.pairs.len() * n * n);
    for (x, y) in &cert.pairs {
        for k in 0..n {
            for l in 0..n {
                pairs.push((x.block(m, k, l).scale_re(inv), y.block(m, l, k)));
            }
        }
    }
    let mut residual = MatC::zeros(m);
    for k in 0..n {
        residual += &cert.residual.block(m, k, k);
    }
    let residual = residual.scale_re(inv);

    let input_products: f64 = cert.pairs.iter().map(|(x, y)| opnorm(x) * opnorm(y)).sum();
    let output_products: f64 = pairs.iter().map(|(x, y)| opnorm(x) * opnorm(y)).sum();
    let checks = vec![
        BoundCheck::upper(
            "averaging: sum |x||y| <= n * sum |X_j||Y_j|",
            n as f64 * input_products,
            output_products,
        ),
        BoundCheck::upper(
            "averaging: reconstruction <= n * input reconstruction",
            n as f64 * cert.reconstruction_residual + 1e-12 * scale,
            super::reconstruction_error(&h, &pairs, &residual),
        ),
    ];
    Ok(DecompCertificate::assemble(h, pairs, residual, checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::InstanceRng;

    #[test]
    fn zero_input_gives_zero_pairs() {
        let c = DecompCertificate::zero(MatC::zeros(4), 1);
        let out = matrix_average_reduce(&c, 2, 1e-10).unwrap();
        assert_eq!(out.pairs.len(), 4);
        assert!(out.pairs.iter().all(|(x, y)| x.is_zero() && y.is_zero()));
    }

    #[test]
    fn single_pair_amplified() {
        let mut rng = InstanceRng::new(2);
        let x = rng.matrix(2);
        let y = rng.matrix(2);
        let h = MatC::commutator(&x, &y);
        let big = DecompCertificate::assemble(h.amplify(2), vec![(x.amplify(2), y.amplify(2))], MatC::zeros(4), vec![]);
        let out = matrix_average_reduce(&big, 2, 1e-10).unwrap();
        assert_eq!(out.pairs.len(), 4);
        assert!(out.reconstruction_residual < 1e-14);
        assert!(out.all_pass(), "{:?}", out.failed_checks());
        let total: f64 = out.factor_norms.iter().map(|(a, b)| a * b).sum();
        let c = big.measurements["constant"];
        assert!(total <= 2.0 * c * opnorm(&h) * (1.0 + 1e-10));
    }

    #[test]
    fn rejects_non_amplified_target() {
        let c = DecompCertificate::zero(MatC::from_real_diag(&[1.0, -1.0]), 0);
        assert!(matrix_average_reduce(&c, 2, 1e-10).is_err());
        assert!(matrix_average_reduce(&c, 3, 1e-10).is_err());
    }
}
