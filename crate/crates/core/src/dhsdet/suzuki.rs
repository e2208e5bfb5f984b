use serde::{Deserialize, Serialize};

use super::DetError;
use crate::matcore::{mexp, mlog_principal, opnorm, MatC, MatError, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuzukiStats {
    pub n: usize,
    pub norm: f64,
    /// `|Tr c|`.
    pub trace_abs: f64,
    /// `Σ_j ‖a_j‖`, the scale the trace is compared against.
    pub input_scale: f64,
    /// Hermitian deviation of `c` before symmetrization.
    pub hermitian_deviation: f64,
}

/// The defect `c` in `e^{i(a₁+⋯+a_m)/N} = e^{ia₁/N}⋯e^{ia_m/N}·e^{ic}`:
/// `c = −i·log(e^{−ia_m/N}⋯e^{−ia₁/N}·e^{iΣa_j/N})`.
pub fn suzuki_defect(a_list: &[MatC], n: usize) -> Result<(MatC, SuzukiStats), DetError> {
    if a_list.is_empty() || n == 0 {
        return Err(DetError::BadInput {
            detail: "need at least one matrix and N >= 1".into(),
        });
    }
    let dim = a_list[0].dim();
    for (k, a) in a_list.iter().enumerate() {
        a.validate()?;
        a.ensure_dim(dim)?;
        let deviation = a.hermitian_deviation();
        if deviation > 1e-10 * opnorm(a).max(1.0) {
            return Err(DetError::NotHermitian {
                which: format!("a[{k}]"),
                deviation,
            });
        }
    }
    let step = C64::new(0.0, 1.0 / n as f64);
    let mut sum = MatC::zeros(dim);
    for a in a_list {
        sum += a;
    }
    let mut prod = MatC::identity(dim);
    for a in a_list.iter().rev() {
        prod = &prod * &mexp(&a.scale(-step));
    }
    prod = &prod * &mexp(&sum.scale(step));
    let log = mlog_principal(&prod).map_err(|e| match e {
        MatError::SpectrumOnCut { .. } => DetError::LogDomain { n },
        other => DetError::Mat(other),
    })?;
    let raw = log.scale(C64::new(0.0, -1.0));
    let c = raw.hermitian_part();
    let stats = SuzukiStats {
        n,
        norm: opnorm(&c),
        trace_abs: raw.trace().norm(),
        input_scale: a_list.iter().map(opnorm).sum(),
        hermitian_deviation: raw.hermitian_deviation(),
    };
    Ok((c, stats))
}
