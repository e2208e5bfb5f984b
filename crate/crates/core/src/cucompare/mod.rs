//! Cuntz comparison over finite direct sums of matrix algebras, where a
//! Cuntz class is the vector of per-block ranks. Dimension functions,
//! strict comparison, ε–δ cut-down witnesses, and brute-force checks of
//! almost unperforation and almost divisibility.

mod order;

pub use order::{
    almost_divisible_check, almost_unperforated_check, cu_mn, divisor_witness, rank_vectors, DivisibilityViolation,
    NumericalSemigroup, OrderedMonoid, PerforationViolation, RankOrder, WithoutRelations,
};

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::matcore::{func_psd, opnorm, rank_threshold, singular_values, AlgebraShape, MatC, MatError, ZERO_FLOOR};
use crate::ErrorClass;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CuError {
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error("element is not block diagonal for the shape (off-block norm {norm:e})")]
    NotBlockDiagonal { norm: f64 },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("gamma must lie in (0, 1), got {gamma}")]
    BadGamma { gamma: f64 },
    #[error("epsilon must be positive, got {eps}")]
    BadEpsilon { eps: f64 },
    #[error("strict comparison premise fails for trace {trace}")]
    PremiseViolated { trace: usize },
    #[error("trace weights must be nonnegative and not all zero")]
    BadTrace,
}

impl CuError {
    pub fn class(&self) -> ErrorClass {
        match self {
            CuError::Mat(e) => ErrorClass::of_mat(e),
            _ => ErrorClass::Input,
        }
    }
}

/// A rank in `{0, 1, 2, …} ∪ {∞}`. Serialized as an integer or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rank {
    Finite(u64),
    Infinite,
}

impl Rank {
    pub fn is_finite(self) -> bool {
        matches!(self, Rank::Finite(_))
    }

    /// `k·r` with `0·∞ = 0`.
    pub fn times(self, k: u64) -> Rank {
        match self {
            Rank::Finite(r) => Rank::Finite(r * k),
            Rank::Infinite if k == 0 => Rank::Finite(0),
            Rank::Infinite => Rank::Infinite,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Rank::Finite(r) => r as f64,
            Rank::Infinite => f64::INFINITY,
        }
    }
}

impl Add for Rank {
    type Output = Rank;
    fn add(self, rhs: Rank) -> Rank {
        match (self, rhs) {
            (Rank::Finite(a), Rank::Finite(b)) => Rank::Finite(a + b),
            _ => Rank::Infinite,
        }
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Finite(r) => write!(f, "{r}"),
            Rank::Infinite => f.write_str("∞"),
        }
    }
}

impl Serialize for Rank {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Rank::Finite(r) => s.serialize_u64(*r),
            Rank::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Rank {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(Rank::Finite(n)),
            Raw::S(s) if s == "inf" => Ok(Rank::Infinite),
            Raw::S(s) => Err(serde::de::Error::custom(format!("expected integer or \"inf\", got {s:?}"))),
        }
    }
}

/// Cuntz class over `⊕ᵢ M_{nᵢ}`: one rank per block.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CuntzVector {
    pub ranks: Vec<Rank>,
}

impl CuntzVector {
    pub fn finite(ranks: &[u64]) -> Self {
        CuntzVector {
            ranks: ranks.iter().map(|&r| Rank::Finite(r)).collect(),
        }
    }

    pub fn zero(blocks: usize) -> Self {
        CuntzVector {
            ranks: vec![Rank::Finite(0); blocks],
        }
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.ranks.iter().all(|r| r.is_finite())
    }

    /// Componentwise order.
    pub fn le(&self, other: &CuntzVector) -> bool {
        self.len() == other.len() && self.ranks.iter().zip(&other.ranks).all(|(a, b)| a <= b)
    }

    pub fn plus(&self, other: &CuntzVector) -> CuntzVector {
        CuntzVector {
            ranks: self.ranks.iter().zip(&other.ranks).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn times(&self, k: u64) -> CuntzVector {
        CuntzVector {
            ranks: self.ranks.iter().map(|r| r.times(k)).collect(),
        }
    }
}

/// A trace on `⊕ᵢ M_{nᵢ}` given by weights in `[0, ∞]` on the standard block
/// traces. Infinite weights serialize as `"inf"`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceWeight {
    pub weights: Vec<f64>,
}

impl TraceWeight {
    pub fn new(weights: Vec<f64>) -> Result<Self, CuError> {
        let t = TraceWeight { weights };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), CuError> {
        if self.weights.iter().any(|w| w.is_nan() || *w < 0.0) || self.weights.iter().all(|&w| w == 0.0) {
            return Err(CuError::BadTrace);
        }
        Ok(())
    }

    /// The extreme points `e_i` of the trace simplex.
    pub fn extreme_points(blocks: usize) -> Vec<TraceWeight> {
        (0..blocks)
            .map(|i| TraceWeight {
                weights: (0..blocks).map(|j| if i == j { 1.0 } else { 0.0 }).collect(),
            })
            .collect()
    }
}

impl Serialize for TraceWeight {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<serde_json::Value> = self
            .weights
            .iter()
            .map(|&w| {
                if w.is_infinite() {
                    serde_json::Value::from("inf")
                } else {
                    serde_json::Value::from(w)
                }
            })
            .collect();
        #[derive(Serialize)]
        struct Out {
            weights: Vec<serde_json::Value>,
        }
        Out { weights: raw }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TraceWeight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(f64),
            S(String),
        }
        #[derive(Deserialize)]
        struct In {
            weights: Vec<Raw>,
        }
        let raw = In::deserialize(d)?;
        let mut weights = Vec::with_capacity(raw.weights.len());
        for w in raw.weights {
            weights.push(match w {
                Raw::N(x) => x,
                Raw::S(s) if s == "inf" => f64::INFINITY,
                Raw::S(s) => return Err(serde::de::Error::custom(format!("bad weight {s:?}"))),
            });
        }
        let t = TraceWeight { weights };
        t.validate().map_err(serde::de::Error::custom)?;
        Ok(t)
    }
}

/// Per-block numerical rank of a positive element that is block diagonal
/// for `shape`. The cut is the matcore rank threshold relative to `‖a‖`, so
/// a block that is tiny compared with the rest counts as zero.
pub fn cuntz_class(a: &MatC, shape: &AlgebraShape) -> Result<CuntzVector, CuError> {
    shape.check(a)?;
    func_psd(a, |t| t)?;
    let norm = opnorm(a);
    if norm <= ZERO_FLOOR {
        return Ok(CuntzVector::zero(shape.block_count()));
    }
    let off = shape.off_block_norm(a);
    if off > 1e-10 * norm {
        return Err(CuError::NotBlockDiagonal { norm: off });
    }
    let cut = rank_threshold(norm).max(ZERO_FLOOR);
    let mut ranks = Vec::with_capacity(shape.block_count());
    for i in 0..shape.block_count() {
        let block = shape.extract_block(a, i);
        let r = if block.is_zero() {
            0
        } else {
            singular_values(&block)?.iter().filter(|&&s| s > cut).count()
        };
        ranks.push(Rank::Finite(r as u64));
    }
    Ok(CuntzVector { ranks })
}

/// `d_τ(v) = Σᵢ wᵢ·rᵢ` with `0·∞ = 0`.
pub fn d_tau(v: &CuntzVector, tau: &TraceWeight) -> Result<f64, CuError> {
    if v.len() != tau.weights.len() {
        return Err(CuError::LengthMismatch {
            left: v.len(),
            right: tau.weights.len(),
        });
    }
    Ok(v.ranks
        .iter()
        .zip(&tau.weights)
        .map(|(&r, &w)| {
            let r = r.as_f64();
            if r == 0.0 || w == 0.0 {
                0.0
            } else {
                r * w
            }
        })
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrictComparison {
    /// `d_τ(a) ≤ (1 − γ)·d_τ(b)` for every listed trace.
    pub premise_holds: bool,
    /// `[a] ≤ [b]` componentwise.
    pub conclusion_holds: bool,
}

fn check_gamma(gamma: f64) -> Result<(), CuError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(CuError::BadGamma { gamma });
    }
    Ok(())
}

/// `d ≤ (1 − γ)·e` in `[0, ∞]`, with `∞ ≤ ∞`.
fn scaled_le(d: f64, e: f64, factor: f64) -> bool {
    if e.is_infinite() {
        return true;
    }
    d <= factor * e
}

fn premise_failure(va: &CuntzVector, vb: &CuntzVector, factor: f64, traces: &[TraceWeight]) -> Result<Option<usize>, CuError> {
    for (k, tau) in traces.iter().enumerate() {
        if !scaled_le(d_tau(va, tau)?, d_tau(vb, tau)?, factor) {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Strict comparison on classes directly.
pub fn strict_comparison_classes(
    va: &CuntzVector,
    vb: &CuntzVector,
    gamma: f64,
    traces: &[TraceWeight],
) -> Result<StrictComparison, CuError> {
    check_gamma(gamma)?;
    if va.len() != vb.len() {
        return Err(CuError::LengthMismatch {
            left: va.len(),
            right: vb.len(),
        });
    }
    Ok(StrictComparison {
        premise_holds: premise_failure(va, vb, 1.0 - gamma, traces)?.is_none(),
        conclusion_holds: va.le(vb),
    })
}

pub fn strict_comparison_check(
    a: &MatC,
    b: &MatC,
    shape: &AlgebraShape,
    gamma: f64,
    traces: &[TraceWeight],
) -> Result<StrictComparison, CuError> {
    check_gamma(gamma)?;
    let va = cuntz_class(a, shape)?;
    let vb = cuntz_class(b, shape)?;
    strict_comparison_classes(&va, &vb, gamma, traces)
}

/// Smallest exponent tried on the grid `‖b‖·2^{−k}` is 0, the largest this.
pub const DELTA_GRID_DEPTH: u32 = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EpsilonDelta {
    Found { delta: f64, k: u32 },
    NotFound,
}

/// Largest `δ = ‖b‖·2^{−k}` with
/// `d_τ((a − ε)₊) ≤ (1 − γ/2)·d_τ((b − δ)₊)` for every listed trace.
pub fn epsilon_delta_witness(
    a: &MatC,
    b: &MatC,
    shape: &AlgebraShape,
    gamma: f64,
    eps: f64,
    traces: &[TraceWeight],
) -> Result<EpsilonDelta, CuError> {
    check_gamma(gamma)?;
    if !(eps > 0.0) {
        return Err(CuError::BadEpsilon { eps });
    }
    let va = cuntz_class(a, shape)?;
    let vb = cuntz_class(b, shape)?;
    if let Some(trace) = premise_failure(&va, &vb, 1.0 - gamma, traces)? {
        return Err(CuError::PremiseViolated { trace });
    }
    let cut_a = cuntz_class(&func_psd(a, |t| (t - eps).max(0.0))?, shape)?;
    let bn = opnorm(b);
    if bn <= ZERO_FLOOR {
        // b = 0 forces a = 0 through the premise, so any δ works
        return Ok(EpsilonDelta::Found { delta: 0.0, k: 0 });
    }
    for k in 0..=DELTA_GRID_DEPTH {
        let delta = bn * 0.5f64.powi(k as i32);
        let cut_b = cuntz_class(&func_psd(b, |t| (t - delta).max(0.0))?, shape)?;
        if premise_failure(&cut_a, &cut_b, 1.0 - gamma / 2.0, traces)?.is_none() {
            return Ok(EpsilonDelta::Found { delta, k });
        }
    }
    Ok(EpsilonDelta::NotFound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(blocks: &[usize]) -> AlgebraShape {
        AlgebraShape::new(blocks.to_vec(), 1).unwrap()
    }

    #[test]
    fn class_examples() {
        let s = shape(&[2, 2]);
        assert_eq!(cuntz_class(&MatC::zeros(4), &s).unwrap(), CuntzVector::finite(&[0, 0]));
        let a = MatC::from_real_diag(&[1.0, 0.0, 1.0, 1.0]);
        assert_eq!(cuntz_class(&a, &s).unwrap(), CuntzVector::finite(&[1, 2]));
        let b = MatC::from_real_diag(&[5.0, 1e-15]);
        assert_eq!(cuntz_class(&b, &shape(&[2])).unwrap(), CuntzVector::finite(&[1]));
        assert!(matches!(
            cuntz_class(&MatC::from_real_rows(&[&[1.0, 0.5], &[0.5, 1.0]]), &shape(&[1, 1])),
            Err(CuError::NotBlockDiagonal { .. })
        ));
    }

    #[test]
    fn d_tau_examples() {
        let one = TraceWeight::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(d_tau(&CuntzVector::zero(2), &one).unwrap(), 0.0);
        assert_eq!(d_tau(&CuntzVector::finite(&[1, 2]), &one).unwrap(), 3.0);
        let inf = TraceWeight::new(vec![f64::INFINITY, 1.0]).unwrap();
        assert_eq!(d_tau(&CuntzVector::finite(&[1, 0]), &inf).unwrap(), f64::INFINITY);
        assert_eq!(d_tau(&CuntzVector::finite(&[0, 3]), &inf).unwrap(), 3.0);
        assert!(d_tau(&CuntzVector::finite(&[1]), &one).is_err());
    }

    #[test]
    fn rank_arithmetic() {
        assert_eq!(Rank::Infinite.times(0), Rank::Finite(0));
        assert_eq!(Rank::Infinite + Rank::Finite(2), Rank::Infinite);
        assert!(Rank::Finite(5) < Rank::Infinite);
        let v: Rank = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(v, Rank::Infinite);
        assert_eq!(serde_json::to_string(&Rank::Finite(3)).unwrap(), "3");
    }

    #[test]
    fn strict_comparison_examples() {
        let s = shape(&[3]);
        let tau = vec![TraceWeight::new(vec![1.0]).unwrap()];
        let z = strict_comparison_check(&MatC::zeros(3), &MatC::zeros(3), &s, 0.25, &tau).unwrap();
        assert!(z.premise_holds && z.conclusion_holds);
        let a1 = MatC::from_real_diag(&[1.0, 0.0, 0.0]);
        let b2 = MatC::from_real_diag(&[1.0, 1.0, 0.0]);
        let r = strict_comparison_check(&a1, &b2, &s, 0.25, &tau).unwrap();
        assert!(r.premise_holds && r.conclusion_holds);
        let r = strict_comparison_check(&b2, &b2, &s, 0.25, &tau).unwrap();
        assert!(!r.premise_holds && r.conclusion_holds);
        assert!(matches!(
            strict_comparison_check(&a1, &b2, &s, 1.0, &tau),
            Err(CuError::BadGamma { .. })
        ));
    }

    #[test]
    fn epsilon_delta_examples() {
        let s = shape(&[2]);
        let tau = vec![TraceWeight::new(vec![1.0]).unwrap()];
        let a = MatC::unit(2, 0, 0);
        let b = MatC::from_real_diag(&[1.0, 0.5]);
        assert_eq!(
            epsilon_delta_witness(&a, &b, &s, 0.5, 0.25, &tau).unwrap(),
            EpsilonDelta::Found { delta: 0.25, k: 2 }
        );
        let r = epsilon_delta_witness(&MatC::zeros(2), &b, &s, 0.5, 0.25, &tau).unwrap();
        assert_eq!(r, EpsilonDelta::Found { delta: 1.0, k: 0 });
        assert!(matches!(
            epsilon_delta_witness(&b, &a, &s, 0.5, 0.25, &tau),
            Err(CuError::PremiseViolated { .. })
        ));
    }

    #[test]
    fn trace_weight_json() {
        let t = TraceWeight::new(vec![f64::INFINITY, 0.5]).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"weights":["inf",0.5]}"#);
        assert_eq!(serde_json::from_str::<TraceWeight>(&s).unwrap(), t);
        assert!(serde_json::from_str::<TraceWeight>(r#"{"weights":[0,0]}"#).is_err());
    }
}
