use nalgebra::DMatrix;

use super::{hermitian_eigen, opnorm, MatC, MatError, C64, DEFAULT_TOL};

/// Applies a scalar map to a positive semidefinite matrix through its
/// eigendecomposition. Eigenvalues in `[-tol·‖a‖, 0)` are clamped to zero
/// before `f` sees them.
pub fn func_psd(a: &MatC, f: impl FnMut(f64) -> f64) -> Result<MatC, MatError> {
    func_psd_with_tol(a, f, DEFAULT_TOL)
}

pub fn func_psd_with_tol(a: &MatC, mut f: impl FnMut(f64) -> f64, tol: f64) -> Result<MatC, MatError> {
    let eig = hermitian_eigen(a, tol)?;
    let scale = eig.values.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if let Some(&lo) = eig.values.first() {
        if lo < -tol * scale {
            return Err(MatError::NotPsd { eigenvalue: lo });
        }
    }
    Ok(eig.apply(|l| f(l.max(0.0))))
}

/// Matrix exponential (scaling and squaring with a Padé approximant).
pub fn mexp(a: &MatC) -> MatC {
    if a.is_zero() {
        return MatC::identity(a.dim());
    }
    MatC::wrap(a.as_dmatrix().clone().exp())
}

/// Principal matrix square root. Same spectral requirements as
/// [`mlog_principal`].
pub fn sqrtm(u: &MatC) -> Result<MatC, MatError> {
    let (q, t) = schur(u)?;
    check_cut(&t, DEFAULT_TOL)?;
    let r = sqrt_upper_triangular(&t);
    Ok(MatC::wrap(&q * r * q.adjoint()))
}

/// Principal logarithm: the unique `L` with `e^L = u` and every eigenvalue
/// of `L` having imaginary part in `(−π, π)`.
///
/// Normal matrices go through their (unitary) Schur form directly; anything
/// else uses inverse scaling and squaring on the triangular factor.
pub fn mlog_principal(u: &MatC) -> Result<MatC, MatError> {
    mlog_principal_with_tol(u, DEFAULT_TOL)
}

pub fn mlog_principal_with_tol(u: &MatC, tol: f64) -> Result<MatC, MatError> {
    u.validate()?;
    let n = u.dim();
    if *u == MatC::identity(n) {
        return Ok(MatC::zeros(n));
    }
    let (q, t) = schur(u)?;
    check_cut(&t, tol)?;

    let diag_norm: f64 = (0..n).map(|i| t[(i, i)].norm_sqr()).sum::<f64>().sqrt();
    let off_norm: f64 = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| t[(i, j)].norm_sqr())
        .sum::<f64>()
        .sqrt();

    let log_t = if off_norm <= 1e-13 * diag_norm.max(1.0) {
        DMatrix::from_fn(n, n, |i, j| if i == j { t[(i, i)].ln() } else { C64::new(0.0, 0.0) })
    } else {
        log_upper_triangular(t)
    };
    Ok(MatC::wrap(&q * log_t * q.adjoint()))
}

/// Complex Schur form `u = q·t·q*` with `q` unitary and `t` upper
/// triangular. For normal `u`, `t` is diagonal up to roundoff.
pub fn schur_form(u: &MatC) -> Result<(MatC, MatC), MatError> {
    let (q, t) = schur(u)?;
    Ok((MatC::wrap(q), MatC::wrap(t)))
}

fn schur(u: &MatC) -> Result<(DMatrix<C64>, DMatrix<C64>), MatError> {
    u.validate()?;
    let s = nalgebra::linalg::Schur::try_new(u.as_dmatrix().clone(), 1e-15, 100_000)
        .ok_or(MatError::EigenNonConvergence)?;
    let (q, mut t) = s.unpack();
    let n = t.nrows();
    for i in 0..n {
        for j in 0..i {
            t[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok((q, t))
}

fn check_cut(t: &DMatrix<C64>, tol: f64) -> Result<(), MatError> {
    for i in 0..t.nrows() {
        let z = t[(i, i)];
        let on_axis = z.im.abs() <= tol * z.norm();
        if z.norm() == 0.0 || (on_axis && z.re <= 0.0) {
            return Err(MatError::SpectrumOnCut { re: z.re, im: z.im });
        }
    }
    Ok(())
}

/// Principal square root of an upper-triangular matrix (Björck–Hammarling).
fn sqrt_upper_triangular(t: &DMatrix<C64>) -> DMatrix<C64> {
    let n = t.nrows();
    let mut r = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        r[(i, i)] = t[(i, i)].sqrt();
    }
    for d in 1..n {
        for i in 0..n - d {
            let j = i + d;
            let mut s = t[(i, j)];
            for k in i + 1..j {
                s -= r[(i, k)] * r[(k, j)];
            }
            r[(i, j)] = s / (r[(i, i)] + r[(j, j)]);
        }
    }
    r
}

fn log_upper_triangular(mut t: DMatrix<C64>) -> DMatrix<C64> {
    let n = t.nrows();
    let id = DMatrix::<C64>::identity(n, n);
    let mut squarings = 0u32;
    while squarings < 64 {
        let e = &t - &id;
        if opnorm(&MatC::wrap(e)) <= 0.1 {
            break;
        }
        t = sqrt_upper_triangular(&t);
        squarings += 1;
    }
    // log(I + E) = Σ (−1)^{k+1} E^k / k
    let e = &t - &id;
    let mut term = e.clone();
    let mut acc = e.clone();
    for k in 2..200 {
        term = &term * &e;
        let coef = if k % 2 == 0 { -1.0 } else { 1.0 } / k as f64;
        let add = &term * C64::new(coef, 0.0);
        let small = add.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-18;
        acc += add;
        if small {
            break;
        }
    }
    acc * C64::new(2f64.powi(squarings as i32), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: &MatC, b: &MatC, tol: f64) -> bool {
        opnorm(&(a - b)) <= tol
    }

    #[test]
    fn func_psd_examples() {
        let a = MatC::from_real_diag(&[4.0, 1.0]);
        assert!(close(&func_psd(&a, f64::sqrt).unwrap(), &MatC::from_real_diag(&[2.0, 1.0]), 1e-14));
        assert!(close(&func_psd(&a, |t| (t - 0.0).max(0.0)).unwrap(), &a, 1e-14));
        let b = MatC::from_real_diag(&[3.0, 1.0]);
        let cut = func_psd(&b, |t| (t - 2.0).max(0.0)).unwrap();
        assert!(close(&cut, &MatC::from_real_diag(&[1.0, 0.0]), 1e-14));
    }

    #[test]
    fn func_psd_rejects_indefinite() {
        let a = MatC::from_real_diag(&[1.0, -1.0]);
        assert!(matches!(func_psd(&a, |t| t), Err(MatError::NotPsd { .. })));
    }

    #[test]
    fn exp_log_examples() {
        assert_eq!(mexp(&MatC::zeros(3)), MatC::identity(3));
        let a = MatC::from_diag(&[C64::new(0.0, PI / 2.0), C64::new(0.0, 0.0)]);
        let e = mexp(&a);
        assert!(close(&e, &MatC::from_diag(&[C64::new(0.0, 1.0), C64::new(1.0, 0.0)]), 1e-14));
        let l = mlog_principal(&MatC::from_diag(&[C64::new(0.0, 1.0), C64::new(1.0, 0.0)])).unwrap();
        assert!(close(&l, &a, 1e-14));
        assert!(mlog_principal(&MatC::identity(4)).unwrap().is_zero());
    }

    #[test]
    fn log_rejects_negative_axis() {
        let u = MatC::from_real_diag(&[-1.0, 1.0]);
        assert!(matches!(mlog_principal(&u), Err(MatError::SpectrumOnCut { .. })));
        let z = MatC::from_real_diag(&[0.0, 1.0]);
        assert!(matches!(mlog_principal(&z), Err(MatError::SpectrumOnCut { .. })));
    }

    #[test]
    fn log_of_jordan_block() {
        // log [[1,1],[0,1]] = [[0,1],[0,0]]
        let u = MatC::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let l = mlog_principal(&u).unwrap();
        assert!(close(&l, &MatC::unit(2, 0, 1), 1e-12));
        // non-normal, far from identity
        let v = MatC::from_real_rows(&[&[2.0, 5.0, 0.0], &[0.0, 0.5, 3.0], &[0.0, 0.0, 7.0]]);
        let lv = mlog_principal(&v).unwrap();
        assert!(close(&mexp(&lv), &v, 1e-10 * opnorm(&v)));
    }

    #[test]
    fn sqrtm_squares_back() {
        let v = MatC::from_real_rows(&[&[4.0, 1.0], &[0.0, 9.0]]);
        let r = sqrtm(&v).unwrap();
        assert!(close(&(&r * &r), &v, 1e-12));
    }
}
