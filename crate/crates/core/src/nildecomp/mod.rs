//! Square-zero (order 2 nilpotent) decompositions: square-zero elements as
//! commutators, commutators of square-zero pairs as three square-zero terms,
//! and the four-function partition expansion of a general commutator.

mod partition;

pub use partition::{
    bridge_split, bridge_split_at, classify, nil_decompose, partition_expand, BridgeSplit, DelegatedStrategy,
    ExpansionTerm, NilIfPossible, NilReport, Partition4, ReportOnly, TermRow, DEFAULT_S1, DEFAULT_S2,
};

use serde::{Deserialize, Serialize};

use crate::matcore::{func_psd, opnorm, polar, rank_threshold, MatC, MatError, ZERO_FLOOR};
use crate::ErrorClass;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NilError {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error("{which} is not square-zero (|x^2| / |x|^2 = {residual:e})")]
    NotSquareZero { which: &'static str, residual: f64 },
    #[error("{which} has norm {norm:e}; expected a contraction")]
    NotContraction { which: &'static str, norm: f64 },
    #[error("invalid partition: {detail}")]
    BadPartition { detail: String },
}

impl NilError {
    pub fn class(&self) -> ErrorClass {
        match self {
            NilError::Mat(e) => ErrorClass::of_mat(e),
            _ => ErrorClass::Input,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NilKind {
    DirectNilpotent,
    FromThreeSplit,
    FromBridge,
    #[serde(rename = "delegated-M2M3")]
    DelegatedM2M3,
}

/// One summand of a square-zero decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NilTerm {
    pub value: MatC,
    pub kind: NilKind,
    /// 1-based partition indices `(i, j, k, l)` of the originating term.
    pub provenance: Option<[usize; 4]>,
}

impl NilTerm {
    pub fn square_residual(&self) -> f64 {
        square_residual(&self.value)
    }
}

/// `‖x²‖ / ‖x‖²`, or 0 for a zero matrix.
pub fn square_residual(x: &MatC) -> f64 {
    let n = opnorm(x);
    if n <= ZERO_FLOOR {
        return 0.0;
    }
    opnorm(&(x * x)) / (n * n)
}

fn ensure_square_zero(which: &'static str, x: &MatC, tol: f64) -> Result<(), NilError> {
    let residual = square_residual(x);
    if residual > tol {
        return Err(NilError::NotSquareZero { which, residual });
    }
    Ok(())
}

/// `z = [u, v]` and `z + z* = [w*, w]` for a square-zero `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NilCommutator {
    pub u: MatC,
    pub v: MatC,
    pub w: MatC,
}

/// Writes a square-zero `z` as a commutator. With `z = v_p|z|` and
/// `r = |z|^{1/2}` the 2×2 matrix units map to `e₁₁ ↦ v_p r v_p*`,
/// `e₁₂ ↦ v_p r`, `e₂₁ ↦ r v_p*`, `e₂₂ ↦ r`. Then `u`, `v` are the images
/// of `t^{1/2}e₁₁` and `t^{1/2}e₁₂`, and `w` is half the image of
/// `t^{1/2}[[1,1],[−1,−1]]`.
pub fn nilpotent_as_commutator(z: &MatC, tol: f64) -> Result<NilCommutator, NilError> {
    z.validate()?;
    ensure_square_zero("z", z, tol)?;
    let n = z.dim();
    if opnorm(z) <= ZERO_FLOOR {
        return Ok(NilCommutator {
            u: MatC::zeros(n),
            v: MatC::zeros(n),
            w: MatC::zeros(n),
        });
    }
    let pol = polar(z)?;
    let vp = pol.v;
    // roundoff eigenvalues of |z| would become ~1e-8 after the square root
    let cut = rank_threshold(opnorm(&pol.p));
    let r = func_psd(&pol.p, |t| if t > cut { t.sqrt() } else { 0.0 })?;
    let e11 = &(&vp * &r) * &vp.adjoint();
    let e12 = &vp * &r;
    let e21 = &r * &vp.adjoint();
    let w = (&(&e11 + &e12) - &(&e21 + &r)).scale_re(0.5);
    Ok(NilCommutator { u: e11, v: e12, w })
}

/// `[a, b] = (ab + aba − b − ba) + (−aba) + b` for square-zero contractions.
pub fn three_nilpotent_split(a: &MatC, b: &MatC, tol: f64) -> Result<[NilTerm; 3], NilError> {
    a.validate()?;
    b.ensure_dim(a.dim())?;
    b.validate()?;
    for (which, x) in [("a", a), ("b", b)] {
        ensure_square_zero(which, x, tol)?;
        let norm = opnorm(x);
        if norm > 1.0 + tol {
            return Err(NilError::NotContraction { which, norm });
        }
    }
    let [n1, n2, n3] = split_values(a, b);
    let term = |value| NilTerm {
        value,
        kind: NilKind::FromThreeSplit,
        provenance: None,
    };
    Ok([term(n1), term(n2), term(n3)])
}

fn split_values(a: &MatC, b: &MatC) -> [MatC; 3] {
    let ab = a * b;
    let ba = b * a;
    let aba = &ab * a;
    let n1 = &(&(&ab + &aba) - b) - &ba;
    [n1, -aba, b.clone()]
}

/// Three-term split of `[x, y]` for square-zero `x`, `y` of any norm: both
/// are rescaled to unit norm and the terms scaled back by `‖x‖·‖y‖`.
pub fn split_square_zero_commutator(x: &MatC, y: &MatC, tol: f64) -> Result<[MatC; 3], NilError> {
    let nx = opnorm(x);
    let ny = opnorm(y);
    if nx <= ZERO_FLOOR || ny <= ZERO_FLOOR {
        let z = MatC::zeros(x.dim());
        return Ok([z.clone(), z.clone(), z]);
    }
    let [t1, t2, t3] = three_nilpotent_split(&x.scale_re(1.0 / nx), &y.scale_re(1.0 / ny), tol)?;
    let s = nx * ny;
    Ok([t1.value.scale_re(s), t2.value.scale_re(s), t3.value.scale_re(s)])
}
