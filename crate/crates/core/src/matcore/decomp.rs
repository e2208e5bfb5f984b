use nalgebra::DMatrix;

use super::{MatC, MatError, C64};

const EIG_EPS: f64 = 1e-15;
const MAX_EIG_ITERS: usize = 10_000;
const MAX_JACOBI_SWEEPS: usize = 80;

/// Relative numerical-rank cut: singular values at or below
/// `σ_max · RANK_REL` count as zero.
pub const RANK_REL: f64 = 1e-10;

/// Full singular value decomposition `a = u · diag(sigma) · v_adj`, with
/// `sigma` sorted in decreasing order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DMatrix<C64>,
    pub sigma: Vec<f64>,
    pub v_adj: DMatrix<C64>,
}

/// One-sided (Hestenes) Jacobi: orthogonalizes the columns of `g = a·v` by
/// complex plane rotations. Singular values come out with high relative
/// accuracy even for rank-deficient input with repeated values.
fn jacobi(a: &DMatrix<C64>, want_v: bool) -> Result<(DMatrix<C64>, Option<DMatrix<C64>>), MatError> {
    let n = a.ncols();
    let mut g = a.clone();
    let mut v = want_v.then(|| DMatrix::<C64>::identity(n, n));
    let eps = f64::EPSILON * n as f64;
    // columns this small are roundoff; rotating them against large columns
    // only reshuffles noise and never converges
    let small = (eps * a.norm()).powi(2);
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = g.column(p).norm_squared();
                let beta = g.column(q).norm_squared();
                let gamma = g.column(p).dotc(&g.column(q));
                let gabs = gamma.norm();
                if gabs == 0.0 || alpha.min(beta) <= small || gabs <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / gabs;
                let zeta = (beta - alpha) / (2.0 * gabs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let sp = phase * s;
                let sm = phase.conj() * s;
                rotate(&mut g, p, q, c, sp, sm);
                if let Some(v) = v.as_mut() {
                    rotate(v, p, q, c, sp, sm);
                }
            }
        }
        if !rotated {
            return Ok((g, v));
        }
    }
    Err(MatError::SvdNonConvergence)
}

// new_p = c·p − s̄·q, new_q = s·p + c·q with s = e^{iφ} sin, s̄ = e^{−iφ} sin
fn rotate(m: &mut DMatrix<C64>, p: usize, q: usize, c: f64, sp: C64, sm: C64) {
    for i in 0..m.nrows() {
        let xp = m[(i, p)];
        let xq = m[(i, q)];
        m[(i, p)] = xp * c - sm * xq;
        m[(i, q)] = sp * xp + xq * c;
    }
}

pub fn svd(a: &MatC) -> Result<Svd, MatError> {
    a.validate()?;
    let n = a.dim();
    let (g, v) = jacobi(a.as_dmatrix(), true)?;
    let v = v.expect("requested");
    let norms: Vec<f64> = (0..n).map(|k| g.column(k).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma: Vec<f64> = order.iter().map(|&k| norms[k]).collect();
    let top = sigma.first().copied().unwrap_or(0.0);
    let mut u = DMatrix::<C64>::zeros(n, n);
    let mut filled = 0;
    for (slot, &k) in order.iter().enumerate() {
        if sigma[slot] > top * 1e-13 && sigma[slot] > 0.0 {
            u.set_column(slot, &(g.column(k) / C64::new(sigma[slot], 0.0)));
            filled += 1;
        } else {
            break;
        }
    }
    complete_basis(&mut u, filled);
    let v_sorted = DMatrix::from_fn(n, n, |i, c| v[(i, order[c])]);
    Ok(Svd {
        u,
        sigma,
        v_adj: v_sorted.adjoint(),
    })
}

/// Fills columns `filled..n` of `u` with an orthonormal completion of the
/// first `filled` columns (Gram–Schmidt on coordinate vectors, twice).
fn complete_basis(u: &mut DMatrix<C64>, filled: usize) {
    let n = u.nrows();
    let mut col = filled;
    let mut e = 0;
    while col < n && e < n {
        let mut w = nalgebra::DVector::<C64>::zeros(n);
        w[e] = C64::new(1.0, 0.0);
        e += 1;
        for _ in 0..2 {
            for k in 0..col {
                let proj = u.column(k).dotc(&w);
                w -= u.column(k) * proj;
            }
        }
        let norm = w.norm();
        if norm > 1e-6 {
            u.set_column(col, &(w / C64::new(norm, 0.0)));
            col += 1;
        }
    }
}

/// Singular values in decreasing order.
pub fn singular_values(a: &MatC) -> Result<Vec<f64>, MatError> {
    a.validate()?;
    let (g, _) = jacobi(a.as_dmatrix(), false)?;
    let mut s: Vec<f64> = (0..a.dim()).map(|k| g.column(k).norm()).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// Operator (spectral) norm, i.e. the largest singular value. Non-finite
/// input yields `NaN`; use [`try_opnorm`] to get an error instead.
pub fn opnorm(a: &MatC) -> f64 {
    try_opnorm(a).unwrap_or(f64::NAN)
}

pub fn try_opnorm(a: &MatC) -> Result<f64, MatError> {
    if a.is_zero() {
        return Ok(0.0);
    }
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

pub fn rank_threshold(sigma_max: f64) -> f64 {
    sigma_max * RANK_REL
}

/// Number of singular values above the relative rank threshold.
pub fn numerical_rank(a: &MatC) -> Result<usize, MatError> {
    if a.is_zero() {
        return Ok(0);
    }
    let s = singular_values(a)?;
    let cut = rank_threshold(s[0]);
    Ok(s.iter().filter(|&&x| x > cut).count())
}

/// Polar decomposition `s = v · p` with `p = (s*s)^{1/2}` and `v` a partial
/// isometry vanishing on `ker p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarParts {
    pub v: MatC,
    pub p: MatC,
}

pub fn polar(s: &MatC) -> Result<PolarParts, MatError> {
    s.validate()?;
    let n = s.dim();
    if s.is_zero() {
        return Ok(PolarParts {
            v: MatC::zeros(n),
            p: MatC::zeros(n),
        });
    }
    let d = svd(s)?;
    let cut = rank_threshold(d.sigma[0]);
    let r = d.sigma.iter().filter(|&&x| x > cut).count();
    let v_mat = d.v_adj.adjoint();
    let mut v = DMatrix::<C64>::zeros(n, n);
    let mut p = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        let vk = v_mat.column(k);
        if k < r {
            let uk = d.u.column(k);
            v += uk * vk.adjoint();
        }
        p += (vk * vk.adjoint()) * C64::new(d.sigma[k], 0.0);
    }
    // p is Hermitian by construction; symmetrize away roundoff.
    let p = MatC::wrap(p).hermitian_part();
    Ok(PolarParts { v: MatC::wrap(v), p })
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl HermitianEigen {
    /// `Σ f(λ_k) v_k v_k*`.
    pub fn apply(&self, mut f: impl FnMut(f64) -> f64) -> MatC {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        if fv.iter().all(|&x| x == 0.0) {
            return MatC::zeros(n);
        }
        let scaled = DMatrix::from_fn(n, n, |i, k| self.vectors[(i, k)] * fv[k]);
        MatC::wrap(scaled * self.vectors.adjoint()).hermitian_part()
    }
}

/// Eigendecomposition of `a`, which must be Hermitian to relative tolerance
/// `tol`.
pub fn hermitian_eigen(a: &MatC, tol: f64) -> Result<HermitianEigen, MatError> {
    a.validate()?;
    let n = a.dim();
    if a.is_zero() {
        return Ok(HermitianEigen {
            values: vec![0.0; n],
            vectors: DMatrix::identity(n, n),
        });
    }
    let scale = opnorm(a);
    let deviation = a.hermitian_deviation();
    if deviation > tol * scale.max(1e-300) {
        return Err(MatError::NotHermitian { deviation });
    }
    let h = a.hermitian_part();
    let eig = nalgebra::linalg::SymmetricEigen::try_new(h.into_dmatrix(), EIG_EPS, MAX_EIG_ITERS)
        .ok_or(MatError::EigenNonConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Orthogonal projection onto the range of `a`.
pub fn support_projection(a: &MatC) -> Result<MatC, MatError> {
    let q = super::range_basis(a)?;
    if q.ncols() == 0 {
        return Ok(MatC::zeros(a.dim()));
    }
    Ok(MatC::wrap(&q * q.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &MatC, b: &MatC, tol: f64) -> bool {
        opnorm(&(a - b)) <= tol
    }

    #[test]
    fn opnorm_examples() {
        assert!((opnorm(&MatC::identity(3)) - 1.0).abs() < 1e-14);
        assert_eq!(opnorm(&MatC::zeros(3)), 0.0);
        assert!((opnorm(&MatC::from_real_diag(&[4.0, 1.0])) - 4.0).abs() < 1e-14);
        let bad = MatC::wrap(DMatrix::from_element(2, 2, C64::new(f64::INFINITY, 0.0)));
        assert_eq!(try_opnorm(&bad), Err(MatError::NonFinite));
    }

    #[test]
    fn polar_examples() {
        let id = polar(&MatC::identity(2)).unwrap();
        assert!(close(&id.v, &MatC::identity(2), 1e-14));
        assert!(close(&id.p, &MatC::identity(2), 1e-14));

        let e12 = MatC::unit(2, 0, 1);
        let pp = polar(&e12).unwrap();
        assert!(close(&pp.p, &MatC::unit(2, 1, 1), 1e-14));
        assert!(close(&pp.v, &e12, 1e-14));

        let z = polar(&MatC::zeros(3)).unwrap();
        assert!(z.v.is_zero() && z.p.is_zero());
    }

    #[test]
    fn polar_partial_isometry_matches_support() {
        // rank-one input: v*v must be the support projection of p
        let s = MatC::from_fn(3, |i, j| C64::new((i + 1) as f64 * (j as f64 - 1.0), 0.5));
        let pp = polar(&s).unwrap();
        assert!(close(&(&pp.v * &pp.p), &s, 1e-12));
        let vv = &pp.v.adjoint() * &pp.v;
        let supp = support_projection(&pp.p).unwrap();
        assert!(close(&vv, &supp, 1e-10));
    }

    fn svd_residual(a: &MatC) -> f64 {
        let d = svd(a).unwrap();
        let n = a.dim();
        let recon = DMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| d.u[(i, k)] * d.sigma[k] * d.v_adj[(k, j)]).sum::<C64>()
        });
        let orth_u = (d.u.adjoint() * &d.u - DMatrix::<C64>::identity(n, n)).norm();
        let orth_v = (&d.v_adj * d.v_adj.adjoint() - DMatrix::<C64>::identity(n, n)).norm();
        (recon - a.as_dmatrix()).norm().max(orth_u).max(orth_v)
    }

    #[test]
    fn svd_handles_repeated_values_with_rank_deficiency() {
        // block copies of a rank-2 positive matrix: repeated singular values
        // next to an exact null space
        let mut rng = crate::random::InstanceRng::new(21);
        for _ in 0..20 {
            let b = rng.psd_of_rank(5, 2).amplify(2);
            assert!(svd_residual(&b) < 1e-13);
            assert_eq!(numerical_rank(&b).unwrap(), 4);
        }
        assert!(svd_residual(&MatC::unit(3, 0, 2)) < 1e-15);
        assert!(svd_residual(&MatC::zeros(3)) < 1e-15);
    }

    #[test]
    fn rank_threshold_behaviour() {
        assert_eq!(numerical_rank(&MatC::from_real_diag(&[5.0, 1e-15])).unwrap(), 1);
        assert_eq!(numerical_rank(&MatC::from_real_diag(&[5.0, 1e-8])).unwrap(), 2);
        assert_eq!(numerical_rank(&MatC::zeros(4)).unwrap(), 0);
    }

    #[test]
    fn hermitian_eigen_rejects_non_hermitian() {
        let a = MatC::unit(2, 0, 1);
        assert!(matches!(hermitian_eigen(&a, 1e-10), Err(MatError::NotHermitian { .. })));
        let h = MatC::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let e = hermitian_eigen(&h, 1e-10).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-13 && (e.values[1] - 3.0).abs() < 1e-13);
        assert!(close(&e.apply(|x| x), &h, 1e-13));
    }
}
