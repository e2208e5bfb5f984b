use serde::{Deserialize, Serialize};

use super::{diagonal_commutator, rosenblum_solve, BoundCheck, DecompCertificate, DecompError, RosenblumProblem};
use crate::matcore::{opnorm, MatC, ZERO_FLOOR};

/// Algebra whose matrices are being decomposed: `M_n(ℂ)` or `M_n(M_m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Base {
    Scalar,
    Matrix(usize),
}

impl Base {
    pub fn block_dim(self) -> usize {
        match self {
            Base::Scalar => 1,
            Base::Matrix(m) => m,
        }
    }

    /// Number of commutators the base decomposer spends on a trace-zero element.
    pub fn commutator_count(self) -> usize {
        match self {
            Base::Scalar => 0,
            Base::Matrix(_) => 2,
        }
    }

    /// Writes trace-zero `s` in the base as a sum of commutators. Over `ℂ`
    /// the only trace-zero scalar is 0, so the sum is empty.
    fn decompose(self, s: &MatC, tol: f64) -> Result<Vec<(MatC, MatC)>, DecompError> {
        match self {
            Base::Scalar => Ok(Vec::new()),
            Base::Matrix(m) => {
                // the caller checked the trace against the full element; strip
                // the roundoff-level remainder so the recursion sees exact zero
                let shift = s.trace() / m as f64;
                let s0 = s - &MatC::identity(m).scale(shift);
                let cert = two_commutator(&s0, Base::Scalar, tol)?;
                Ok(cert.pairs)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroDiagOutput {
    pub x: MatC,
    pub y: MatC,
    /// Largest `‖b_{kj}‖` over the off-diagonal Sylvester solutions.
    pub max_offdiag_norm: f64,
    pub max_resolvent: f64,
    pub max_nodes: usize,
    /// `Σ ‖x_k‖·‖y_k‖` over the witnesses, after contraction normalization.
    pub diag_product_sum: f64,
}

/// Writes `h ∈ M_n(M_m)` as a single commutator `[X, Y]`, given witnesses
/// `h_jj = [x_j, y_j]` for its diagonal blocks.
///
/// `X = diag(d_1, …, d_n)` with `d_j = x_j/‖x_j‖ + 3(j−1)·1`, the diagonal of
/// `Y` is `‖x_j‖·y_j`, and each off-diagonal `Y_{kj}` solves
/// `d_k·b − b·d_j = h_kj` by contour quadrature.
pub fn zero_diagonal_commutator(
    h: &MatC,
    block_dim: usize,
    witnesses: &[(MatC, MatC)],
    tol: f64,
) -> Result<ZeroDiagOutput, DecompError> {
    h.validate()?;
    let m = block_dim;
    if m == 0 || h.dim() % m != 0 {
        return Err(DecompError::ShapeMismatch { dim: h.dim(), block: m });
    }
    let n = h.dim() / m;
    if witnesses.len() != n {
        return Err(DecompError::BadInput {
            detail: format!("expected {n} diagonal witnesses, got {}", witnesses.len()),
        });
    }
    let scale = opnorm(h).max(1.0);
    for (j, (x, y)) in witnesses.iter().enumerate() {
        x.ensure_dim(m)?;
        y.ensure_dim(m)?;
        let deviation = opnorm(&(&h.block(m, j, j) - &MatC::commutator(x, y)));
        if deviation > tol * scale {
            return Err(DecompError::WitnessMismatch { block: j, deviation });
        }
    }
    if n == 1 {
        let (x, y) = witnesses[0].clone();
        let prod = opnorm(&x) * opnorm(&y);
        return Ok(ZeroDiagOutput {
            x,
            y,
            max_offdiag_norm: 0.0,
            max_resolvent: 0.0,
            max_nodes: 0,
            diag_product_sum: prod,
        });
    }

    let id = MatC::identity(m);
    let mut d = Vec::with_capacity(n);
    let mut yd = Vec::with_capacity(n);
    let mut diag_product_sum = 0.0;
    for (j, (x, y)) in witnesses.iter().enumerate() {
        let nx = opnorm(x);
        let (xc, yc) = if nx > 0.0 {
            (x.scale_re(1.0 / nx), y.scale_re(nx))
        } else {
            (MatC::zeros(m), MatC::zeros(m))
        };
        diag_product_sum += opnorm(&xc) * opnorm(&yc);
        d.push(&xc + &id.scale_re(3.0 * j as f64));
        yd.push(yc);
    }

    let mut xm = MatC::zeros(n * m);
    let mut ym = MatC::zeros(n * m);
    let mut max_offdiag_norm = 0.0f64;
    let mut max_resolvent = 0.0f64;
    let mut max_nodes = 0usize;
    for k in 0..n {
        xm.set_block(m, k, k, &d[k]);
        ym.set_block(m, k, k, &yd[k]);
        for j in 0..n {
            if j == k {
                continue;
            }
            let p = RosenblumProblem::new(
                d[k].clone(),
                d[j].clone(),
                h.block(m, k, j),
                3.0 * k as f64,
                3.0 * j as f64,
            );
            let sol = rosenblum_solve(&p, tol)?;
            max_offdiag_norm = max_offdiag_norm.max(opnorm(&sol.b));
            max_resolvent = max_resolvent.max(sol.max_resolvent_left).max(sol.max_resolvent_right);
            max_nodes = max_nodes.max(sol.nodes_used);
            ym.set_block(m, k, j, &sol.b);
        }
    }
    Ok(ZeroDiagOutput {
        x: xm,
        y: ym,
        max_offdiag_norm,
        max_resolvent,
        max_nodes,
        diag_product_sum,
    })
}

/// Writes trace-zero `h ∈ M_n(base)` as `[X₁,Y₁] + [X₂,Y₂]`.
///
/// The base decomposition of `Σ_j h_jj` is absorbed into the first diagonal
/// blocks, [`diagonal_commutator`] produces `[X₁,Y₁]` carrying the remaining
/// diagonal, and [`zero_diagonal_commutator`] handles `h − [X₁,Y₁]`.
pub fn two_commutator(h: &MatC, base: Base, tol: f64) -> Result<DecompCertificate, DecompError> {
    h.validate()?;
    let m = base.block_dim();
    if m == 0 || h.dim() % m != 0 {
        return Err(DecompError::ShapeMismatch { dim: h.dim(), block: m });
    }
    let n = h.dim() / m;
    let hn = opnorm(h);
    let trace = h.trace().norm();
    if trace > tol * hn.max(ZERO_FLOOR) * h.dim() as f64 {
        return Err(DecompError::NonzeroTrace { trace });
    }
    if hn <= ZERO_FLOOR {
        return Ok(DecompCertificate::zero(h.clone(), 2));
    }
    let count = base.commutator_count();
    if n < count.max(2) {
        return Err(DecompError::TooSmall { n, needed: count.max(2) });
    }

    let mut s = MatC::zeros(m);
    for j in 0..n {
        s += &h.block(m, j, j);
    }
    let base_pairs = base.decompose(&s, tol)?;

    let mut witnesses: Vec<(MatC, MatC)> = (0..n).map(|_| (MatC::zeros(m), MatC::zeros(m))).collect();
    for (j, pair) in base_pairs.into_iter().enumerate() {
        witnesses[j] = pair;
    }
    let d: Vec<MatC> = (0..n)
        .map(|j| {
            let (x, y) = &witnesses[j];
            &h.block(m, j, j) - &MatC::commutator(x, y)
        })
        .collect();
    let max_d = d.iter().map(opnorm).fold(0.0, f64::max);
    let (x1, y1) = diagonal_commutator(&d, tol)?;

    let rest = h - &MatC::commutator(&x1, &y1);
    let zd = zero_diagonal_commutator(&rest, m, &witnesses, tol)?;
    let rest_norm = opnorm(&rest);

    let checks = vec![
        BoundCheck::upper(
            "diagonal_commutator: |X1|*|Y1| <= 4n max|d_j|",
            4.0 * n as f64 * max_d,
            opnorm(&x1) * opnorm(&y1),
        ),
        BoundCheck::upper("zero_diagonal: |X2| <= 3n", 3.0 * n as f64, opnorm(&zd.x)),
        BoundCheck::upper(
            "rosenblum: max|b_kj| <= 12 |h - [X1,Y1]|",
            12.0 * rest_norm,
            zd.max_offdiag_norm,
        ),
        BoundCheck::upper("rosenblum: resolvent norm <= 2 on the contour", 2.0, zd.max_resolvent),
    ];
    let mut cert = DecompCertificate::assemble(h.clone(), vec![(x1, y1), (zd.x, zd.y)], MatC::zeros(h.dim()), checks);
    cert.measurements.insert("max_diagonal_norm".into(), max_d);
    cert.measurements.insert("max_quadrature_nodes".into(), zd.max_nodes as f64);
    Ok(cert)
}
