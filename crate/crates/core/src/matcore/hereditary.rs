use nalgebra::DMatrix;

use super::{func_psd, opnorm, rank_threshold, svd, MatC, MatError, C64, DEFAULT_TOL};

/// Orthonormal basis (as columns) of the numerical range of `a`.
pub fn range_basis(a: &MatC) -> Result<DMatrix<C64>, MatError> {
    let n = a.dim();
    if a.is_zero() {
        return Ok(DMatrix::zeros(n, 0));
    }
    let d = svd(a)?;
    let cut = rank_threshold(d.sigma[0]);
    let r = d.sigma.iter().filter(|&&x| x > cut).count();
    Ok(d.u.columns(0, r).into_owned())
}

fn psd_support(b: &MatC) -> Result<MatC, MatError> {
    // validates Hermitian PSD as a side effect
    func_psd(b, |t| t)?;
    super::support_projection(b)
}

/// Compression `P h P` onto the hereditary subalgebra generated by `b`,
/// where `P` is the support projection of `b`.
pub fn her_compress(b: &MatC, h: &MatC) -> Result<MatC, MatError> {
    h.ensure_dim(b.dim())?;
    let p = psd_support(b)?;
    Ok(&(&p * h) * &p)
}

/// Whether `h` lies in `her(b)` up to relative tolerance.
pub fn in_her(b: &MatC, h: &MatC) -> Result<bool, MatError> {
    in_her_with_tol(b, h, DEFAULT_TOL)
}

pub fn in_her_with_tol(b: &MatC, h: &MatC, tol: f64) -> Result<bool, MatError> {
    let c = her_compress(b, h)?;
    Ok(opnorm(&(h - &c)) <= tol * opnorm(h))
}
