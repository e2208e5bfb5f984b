//! Dense square complex matrices and the numerical kernels everything else
//! is built on: norms, polar decomposition, spectral functions of positive
//! matrices, exponential and principal logarithm, block structure and
//! hereditary compressions.

mod decomp;
mod funcs;
mod hereditary;
mod shape;

pub use decomp::{
    hermitian_eigen, numerical_rank, opnorm, polar, rank_threshold, singular_values, support_projection, svd,
    HermitianEigen, PolarParts, Svd,
};
pub use funcs::{func_psd, func_psd_with_tol, mexp, mlog_principal, mlog_principal_with_tol, schur_form, sqrtm};
pub use decomp::try_opnorm;
pub use hereditary::in_her_with_tol;
pub use hereditary::{her_compress, in_her, range_basis};
pub use shape::AlgebraShape;

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type C64 = num_complex::Complex64;

/// Relative tolerance used by every "within tolerance" contract unless the
/// caller passes its own.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Inputs with norm at or below this floor are treated as exactly zero.
pub const ZERO_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatError {
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("matrix must be non-empty")]
    Empty,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("entries array has length {got}, expected {expected}")]
    BadEntries { expected: usize, got: usize },
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },
    #[error("singular value decomposition failed to converge")]
    SvdNonConvergence,
    #[error("eigenvalue computation failed to converge")]
    EigenNonConvergence,
    #[error("spectrum meets the branch cut of the principal logarithm (eigenvalue {re:e}{im:+e}i)")]
    SpectrumOnCut { re: f64, im: f64 },
    #[error("matrix is numerically singular")]
    Singular,
}

/// A dense `dim × dim` complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct MatC(DMatrix<C64>);

impl MatC {
    pub fn zeros(dim: usize) -> Self {
        MatC(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        MatC(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        MatC(DMatrix::from_fn(dim, dim, |i, j| f(i, j)))
    }

    /// Builds a matrix from row-major entries, validating shape and finiteness.
    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self, MatError> {
        if dim == 0 {
            return Err(MatError::Empty);
        }
        if entries.len() != dim * dim {
            return Err(MatError::BadEntries {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let m = MatC(DMatrix::from_row_slice(dim, dim, entries));
        m.validate()?;
        Ok(m)
    }

    /// Real row-major convenience constructor, mostly for tests and examples.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        MatC::from_fn(n, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        MatC::from_fn(n, |i, j| if i == j { diag[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        MatC::from_diag(&d)
    }

    /// Matrix unit `e_{ij}` (zero-based indices).
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = MatC::zeros(dim);
        m[(i, j)] = C64::new(1.0, 0.0);
        m
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self, MatError> {
        if m.nrows() != m.ncols() {
            return Err(MatError::DimMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(MatError::Empty);
        }
        let m = MatC(m);
        m.validate()?;
        Ok(m)
    }

    pub(crate) fn wrap(m: DMatrix<C64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        MatC(m)
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn row_major(&self) -> Vec<C64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn validate(&self) -> Result<(), MatError> {
        if self.dim() == 0 {
            return Err(MatError::Empty);
        }
        if !self.is_finite() {
            return Err(MatError::NonFinite);
        }
        Ok(())
    }

    pub fn ensure_dim(&self, expected: usize) -> Result<(), MatError> {
        if self.dim() != expected {
            return Err(MatError::DimMismatch {
                expected,
                got: self.dim(),
            });
        }
        Ok(())
    }

    pub fn adjoint(&self) -> MatC {
        MatC(self.0.adjoint())
    }

    pub fn transpose(&self) -> MatC {
        MatC(self.0.transpose())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, c: C64) -> MatC {
        MatC(&self.0 * c)
    }

    pub fn scale_re(&self, c: f64) -> MatC {
        MatC(self.0.map(|z| z * c))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// Frobenius norm; cheap upper bound for the operator norm.
    pub fn fro_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖a − a*‖` measured in operator norm.
    pub fn hermitian_deviation(&self) -> f64 {
        opnorm(&(self - &self.adjoint()))
    }

    /// Hermitian part `(a + a*)/2`.
    pub fn hermitian_part(&self) -> MatC {
        (self + &self.adjoint()).scale_re(0.5)
    }

    pub fn commutator(x: &MatC, y: &MatC) -> MatC {
        &(x * y) - &(y * x)
    }

    /// Inverse via LU; errors on numerical singularity.
    pub fn inverse(&self) -> Result<MatC, MatError> {
        self.0
            .clone()
            .try_inverse()
            .filter(|m| m.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
            .map(MatC)
            .ok_or(MatError::Singular)
    }

    pub fn powi(&self, k: usize) -> MatC {
        let mut acc = MatC::identity(self.dim());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Block `(k, l)` of size `block_dim` when the matrix is viewed in
    /// `M_n(M_block_dim)`.
    pub fn block(&self, block_dim: usize, k: usize, l: usize) -> MatC {
        MatC(
            self.0
                .view((k * block_dim, l * block_dim), (block_dim, block_dim))
                .into_owned(),
        )
    }

    pub fn set_block(&mut self, block_dim: usize, k: usize, l: usize, b: &MatC) {
        debug_assert_eq!(b.dim(), block_dim);
        self.0
            .view_mut((k * block_dim, l * block_dim), (block_dim, block_dim))
            .copy_from(&b.0);
    }

    /// Assembles an element of `M_n(M_m)` from its `n × n` blocks.
    pub fn from_blocks(n: usize, block_dim: usize, mut f: impl FnMut(usize, usize) -> MatC) -> MatC {
        let mut out = MatC::zeros(n * block_dim);
        for k in 0..n {
            for l in 0..n {
                let b = f(k, l);
                out.set_block(block_dim, k, l, &b);
            }
        }
        out
    }

    pub fn block_diag(blocks: &[MatC]) -> MatC {
        let total: usize = blocks.iter().map(|b| b.dim()).sum();
        let mut out = MatC::zeros(total);
        let mut off = 0;
        for b in blocks {
            out.0.view_mut((off, off), (b.dim(), b.dim())).copy_from(&b.0);
            off += b.dim();
        }
        out
    }

    /// `h ⊗ 1_n`, i.e. `n` copies of `h` down the block diagonal.
    pub fn amplify(&self, n: usize) -> MatC {
        let copies: Vec<MatC> = (0..n).map(|_| self.clone()).collect();
        MatC::block_diag(&copies)
    }

    /// Embeds `self` in the top-left corner of a larger zero matrix.
    pub fn embed_corner(&self, dim: usize) -> MatC {
        let mut out = MatC::zeros(dim);
        out.0.view_mut((0, 0), (self.dim(), self.dim())).copy_from(&self.0);
        out
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim()).map(|i| self.0[(i, i)]).collect()
    }
}

impl fmt::Debug for MatC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatC({}x{}) ", self.dim(), self.dim())?;
        let n = self.dim();
        f.write_str("[")?;
        for i in 0..n {
            if i > 0 {
                f.write_str("; ")?;
            }
            for j in 0..n {
                if j > 0 {
                    f.write_str(", ")?;
                }
                let z = self.0[(i, j)];
                write!(f, "{:.4}{:+.4}i", z.re, z.im)?;
            }
        }
        f.write_str("]")
    }
}

impl Index<(usize, usize)> for MatC {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for MatC {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.0[idx]
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr<&MatC> for &MatC {
            type Output = MatC;
            fn $m(self, rhs: &MatC) -> MatC {
                MatC(&self.0 $op &rhs.0)
            }
        }
        impl $tr<MatC> for MatC {
            type Output = MatC;
            fn $m(self, rhs: MatC) -> MatC {
                MatC(self.0 $op rhs.0)
            }
        }
        impl $tr<&MatC> for MatC {
            type Output = MatC;
            fn $m(self, rhs: &MatC) -> MatC {
                MatC(self.0 $op &rhs.0)
            }
        }
        impl $tr<MatC> for &MatC {
            type Output = MatC;
            fn $m(self, rhs: MatC) -> MatC {
                MatC(&self.0 $op rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl AddAssign<&MatC> for MatC {
    fn add_assign(&mut self, rhs: &MatC) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&MatC> for MatC {
    fn sub_assign(&mut self, rhs: &MatC) {
        self.0 -= &rhs.0;
    }
}

impl AddAssign<MatC> for MatC {
    fn add_assign(&mut self, rhs: MatC) {
        self.0 += rhs.0;
    }
}

impl SubAssign<MatC> for MatC {
    fn sub_assign(&mut self, rhs: MatC) {
        self.0 -= rhs.0;
    }
}

impl Neg for &MatC {
    type Output = MatC;
    fn neg(self) -> MatC {
        MatC(-&self.0)
    }
}

impl Neg for MatC {
    type Output = MatC;
    fn neg(self) -> MatC {
        MatC(-self.0)
    }
}

#[derive(Serialize, Deserialize)]
struct MatCJson {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for MatC {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatCJson {
            dim: self.dim(),
            entries: self.row_major().iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatC {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = MatCJson::deserialize(d)?;
        let entries: Vec<C64> = raw.entries.iter().map(|p| C64::new(p[0], p[1])).collect();
        MatC::from_row_major(raw.dim, &entries).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape_is_row_major_pairs() {
        let m = MatC::from_fn(2, |i, j| C64::new((2 * i + j) as f64, -(j as f64)));
        let v = serde_json::to_value(&m).unwrap();
        assert_eq!(v["dim"], 2);
        assert_eq!(v["entries"][1][0], 1.0);
        assert_eq!(v["entries"][1][1], -1.0);
        assert_eq!(v["entries"][2][0], 2.0);
        let back: MatC = serde_json::from_value(v).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_bad_entries() {
        let err = serde_json::from_str::<MatC>(r#"{"dim":2,"entries":[[1,0]]}"#).unwrap_err();
        assert!(err.to_string().contains("length"));
        let z = [C64::new(f64::NAN, 0.0)];
        assert_eq!(MatC::from_row_major(1, &z), Err(MatError::NonFinite));
        assert_eq!(MatC::from_row_major(0, &[]), Err(MatError::Empty));
    }

    #[test]
    fn block_roundtrip() {
        let m = MatC::from_fn(4, |i, j| C64::new(i as f64, j as f64));
        let rebuilt = MatC::from_blocks(2, 2, |k, l| m.block(2, k, l));
        assert_eq!(rebuilt, m);
        let a = MatC::from_real_diag(&[1.0, 2.0]);
        let amp = a.amplify(3);
        assert_eq!(amp.dim(), 6);
        assert_eq!(amp.block(2, 2, 2), a);
        assert!(amp.block(2, 0, 1).is_zero());
    }
}
