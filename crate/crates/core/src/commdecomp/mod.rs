//! Sums of commutators with certified norm bounds: norm splitting, the
//! bidiagonal diagonal-commutator builder, the contour Sylvester solver,
//! zero-diagonal single commutators, the two-commutator pipeline, diagonal
//! averaging, Blackadar witnesses, hereditary peeling and the truncated
//! Fack engine.

mod average;
mod blackadar;
mod diagonal;
mod fack;
mod rosenblum;
mod two;

pub use average::matrix_average_reduce;
pub use blackadar::{
    blackadar_witness, hereditary_peel, hereditary_peel_with_witness, verify_witness, Comparison, PeelOutput,
};
pub use diagonal::{diagonal_commutator, split_norm_factor};
pub use fack::{
    fack_engine, lambda_power_count, DampedDecomposer, ExactDecomposer, FackOptions, FackReport, FackStage,
    FackTower, StageDecomposer,
};
pub use rosenblum::{rosenblum_solve, RosenblumProblem, RosenblumSolution, DEFAULT_RADIUS, MAX_NODES, START_NODES};
pub use two::{two_commutator, zero_diagonal_commutator, Base, ZeroDiagOutput};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::matcore::{opnorm, MatC, MatError};
use crate::ErrorClass;

/// Relative reconstruction tolerance every certificate is held to.
pub const RECON_TOL: f64 = 1e-8;

/// Multiplicative slack granted to norm-bound checks.
pub const BOUND_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DecompError {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error("trace is {trace:e}, expected zero")]
    NonzeroTrace { trace: f64 },
    #[error("diagonal entries sum to a matrix of norm {norm:e}, expected zero")]
    NonzeroSum { norm: f64 },
    #[error("dimension {dim} is not a multiple of block size {block}")]
    ShapeMismatch { dim: usize, block: usize },
    #[error("{detail}")]
    BadInput { detail: String },
    #[error("need at least {needed} diagonal blocks, got {n}")]
    TooSmall { n: usize, needed: usize },
    #[error("shift |d - lambda| = {norm:e} exceeds 1; resolvent bound unavailable")]
    NotContraction { norm: f64 },
    #[error("contour of radius {radius} does not separate the spectra (centre gap {gap})")]
    ContourSeparation { radius: f64, gap: f64 },
    #[error("contour quadrature did not converge within {nodes} nodes (last change {change:e})")]
    QuadratureNonConvergence { nodes: usize, change: f64 },
    #[error("diagonal witness {block} misses h_jj by {deviation:e}")]
    WitnessMismatch { block: usize, deviation: f64 },
    #[error("element is not in the hereditary subalgebra (off-support norm {deviation:e})")]
    NotInHereditary { deviation: f64 },
    #[error("rank {rank_a} exceeds capacity {capacity}; no Blackadar witness exists")]
    NotComparable { rank_a: usize, capacity: usize },
    #[error("invalid tower: {detail}")]
    InvalidTower { detail: String },
    #[error("stage {stage}: decomposer broke its contract ({detail})")]
    StageContract { stage: usize, detail: String },
    #[error("tower of depth {depth} leaves residual {achieved:e} above the requested {target:e}")]
    TowerTooShallow { depth: usize, achieved: f64, target: f64 },
}

impl DecompError {
    pub fn class(&self) -> ErrorClass {
        match self {
            DecompError::Mat(e) => ErrorClass::of_mat(e),
            DecompError::QuadratureNonConvergence { .. } | DecompError::TowerTooShallow { .. } => {
                ErrorClass::NonConvergence
            }
            DecompError::StageContract { .. } => ErrorClass::Verification,
            _ => ErrorClass::Input,
        }
    }
}

/// One named inequality, its claimed right-hand side and the measured left-hand side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub claimed: f64,
    pub measured: f64,
    pub pass: bool,
}

impl BoundCheck {
    /// `measured ≤ claimed` up to the relative slack plus an absolute floor.
    pub fn upper(name: impl Into<String>, claimed: f64, measured: f64) -> Self {
        let pass = measured <= claimed * (1.0 + BOUND_SLACK) + 1e-13;
        BoundCheck {
            name: name.into(),
            claimed,
            measured,
            pass,
        }
    }

    pub fn upper_with_slack(name: impl Into<String>, claimed: f64, measured: f64, rel: f64) -> Self {
        let pass = measured <= claimed * (1.0 + rel) + 1e-13;
        BoundCheck {
            name: name.into(),
            claimed,
            measured,
            pass,
        }
    }
}

/// `target = Σ [x_i, y_i] + residual`, with everything needed to re-check it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompCertificate {
    pub target: MatC,
    pub pairs: Vec<(MatC, MatC)>,
    pub residual: MatC,
    pub factor_norms: Vec<(f64, f64)>,
    pub bound_checks: Vec<BoundCheck>,
    pub reconstruction_residual: f64,
    /// Measured quantities with no asserted bound, such as the realized
    /// commutator constant `Σ‖x‖‖y‖ / ‖h‖`.
    #[serde(default)]
    pub measurements: BTreeMap<String, f64>,
}

impl DecompCertificate {
    /// Builds a certificate, computing factor norms, the reconstruction
    /// residual, the reconstruction check and the realized constant.
    pub fn assemble(target: MatC, pairs: Vec<(MatC, MatC)>, residual: MatC, mut checks: Vec<BoundCheck>) -> Self {
        let factor_norms: Vec<(f64, f64)> = pairs.iter().map(|(x, y)| (opnorm(x), opnorm(y))).collect();
        let rec = reconstruction_error(&target, &pairs, &residual);
        let hn = opnorm(&target);
        checks.push(BoundCheck::upper("reconstruction", RECON_TOL * hn.max(1.0), rec));
        let mut measurements = BTreeMap::new();
        let total: f64 = factor_norms.iter().map(|(a, b)| a * b).sum();
        measurements.insert("sum_factor_products".to_string(), total);
        if hn > 0.0 {
            measurements.insert("constant".to_string(), total / hn);
        }
        measurements.insert("residual_norm".to_string(), opnorm(&residual));
        DecompCertificate {
            target,
            pairs,
            residual,
            factor_norms,
            bound_checks: checks,
            reconstruction_residual: rec,
            measurements,
        }
    }

    /// Certificate of the zero decomposition with `count` zero pairs.
    pub fn zero(target: MatC, count: usize) -> Self {
        let n = target.dim();
        let pairs = (0..count).map(|_| (MatC::zeros(n), MatC::zeros(n))).collect();
        DecompCertificate::assemble(target, pairs, MatC::zeros(n), Vec::new())
    }

    pub fn all_pass(&self) -> bool {
        self.bound_checks.iter().all(|c| c.pass)
    }

    pub fn failed_checks(&self) -> Vec<&BoundCheck> {
        self.bound_checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn commutator_sum(&self) -> MatC {
        commutator_sum(self.target.dim(), &self.pairs)
    }

    /// Recomputes `‖target − Σ[x,y] − residual‖` from the stored matrices.
    pub fn recompute_residual(&self) -> f64 {
        reconstruction_error(&self.target, &self.pairs, &self.residual)
    }

    /// Whether the stored reconstruction residual matches a fresh
    /// computation to `tol` and is itself within the certificate tolerance.
    pub fn reverify(&self, tol: f64) -> bool {
        let fresh = self.recompute_residual();
        let scale = opnorm(&self.target).max(1.0);
        (fresh - self.reconstruction_residual).abs() <= tol * scale && fresh <= RECON_TOL * scale
    }
}

pub(crate) fn commutator_sum(dim: usize, pairs: &[(MatC, MatC)]) -> MatC {
    let mut acc = MatC::zeros(dim);
    for (x, y) in pairs {
        acc += MatC::commutator(x, y);
    }
    acc
}

pub(crate) fn reconstruction_error(target: &MatC, pairs: &[(MatC, MatC)], residual: &MatC) -> f64 {
    let s = commutator_sum(target.dim(), pairs);
    opnorm(&(&(target - &s) - residual))
}

/// Rescales `(x, y)` to `(tx, y/t)` so both factors carry norm
/// `(‖x‖‖y‖)^{1/2}`; the commutator is unchanged.
pub(crate) fn balance(x: &MatC, y: &MatC) -> (MatC, MatC) {
    let nx = opnorm(x);
    let ny = opnorm(y);
    if nx == 0.0 || ny == 0.0 {
        let n = x.dim();
        return (MatC::zeros(n), MatC::zeros(n));
    }
    let t = (ny / nx).sqrt();
    (x.scale_re(t), y.scale_re(1.0 / t))
}
