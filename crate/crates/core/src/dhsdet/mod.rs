//! De la Harpe–Skandalis determinant at matrix scale: path integration by
//! logarithms of increments, the exponential-product rule, the Suzuki
//! defect, regrouping of `(g₁⋯g_m)^N` into commutators and single
//! multiplicative commutator certificates for determinant-one unitaries.

mod kernel;
mod path;
mod regroup;
mod suzuki;

pub use kernel::{kernel_membership, KernelCertificate};
pub use path::{
    exp_path, exp_product_determinant, exp_product_path, path_determinant, DetReport, DetValue, PathOfInvertibles,
    PathSample, SegmentLog, TraceConvention, MAX_SEGMENTS,
};
pub use regroup::{regroup_commutators, regroup_count, RegroupOutput, WordCommutator};
pub use suzuki::{suzuki_defect, SuzukiStats};

use crate::matcore::MatError;
use crate::ErrorClass;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DetError {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error("invalid path: {detail}")]
    BadPath { detail: String },
    #[error("segment {segment} still leaves the principal-log domain after {segments} subdivisions")]
    RefinementCap { segment: usize, segments: usize },
    #[error("{which} is not Hermitian (deviation {deviation:e})")]
    NotHermitian { which: String, deviation: f64 },
    #[error("matrix is not unitary (|u*u - 1| = {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("factor {index} is singular")]
    SingularFactor { index: usize },
    #[error("product left the principal-log domain; increase N (currently {n})")]
    LogDomain { n: usize },
    #[error("{detail}")]
    BadInput { detail: String },
}

impl DetError {
    pub fn class(&self) -> ErrorClass {
        match self {
            DetError::Mat(e) => ErrorClass::of_mat(e),
            DetError::RefinementCap { .. } | DetError::LogDomain { .. } => ErrorClass::NonConvergence,
            _ => ErrorClass::Input,
        }
    }
}

/// Distance from `x` to the nearest integer.
pub fn dist_to_integer(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// `x mod 1` in `[0, 1)`.
pub fn reduce_mod_one(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    // rem_euclid can round up to exactly 1 for tiny negative inputs
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_stays_in_unit_interval() {
        assert_eq!(reduce_mod_one(-1e-17), 0.0);
        assert_eq!(reduce_mod_one(2.25), 0.25);
        assert!((reduce_mod_one(-0.25) - 0.75).abs() < 1e-16);
        assert!(dist_to_integer(2.9999999999) < 1e-9);
    }
}
