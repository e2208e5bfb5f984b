//! Constructive commutator machinery over finite-dimensional matrix
//! algebras, with machine-checkable certificates for every result.

pub mod commdecomp;
pub mod cucompare;
pub mod dhsdet;
pub mod json;
pub mod matcore;
pub mod nildecomp;
pub mod random;

use matcore::MatError;

/// Coarse classification of failures, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// A stated bound or contract failed on otherwise valid input.
    Verification,
    /// The input violated a precondition.
    Input,
    /// An iterative numerical method ran out of budget.
    NonConvergence,
}

impl ErrorClass {
    pub fn of_mat(e: &MatError) -> Self {
        match e {
            MatError::SvdNonConvergence | MatError::EigenNonConvergence => ErrorClass::NonConvergence,
            _ => ErrorClass::Input,
        }
    }
}
