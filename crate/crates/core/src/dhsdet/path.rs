use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{reduce_mod_one, DetError};
use crate::matcore::{mexp, mlog_principal, opnorm, singular_values, sqrtm, MatC, MatError, C64, DEFAULT_TOL};

/// Largest number of refined segments a single path may be split into.
pub const MAX_SEGMENTS: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub t: f64,
    pub value: MatC,
}

/// A path `η: [0, 1] → GL_n` known at finitely many times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathOfInvertibles {
    pub closed: bool,
    pub samples: Vec<PathSample>,
}

impl PathOfInvertibles {
    /// Samples `f(t)` at `count + 1` equally spaced times.
    pub fn sample(count: usize, closed: bool, mut f: impl FnMut(f64) -> MatC) -> Self {
        let samples = (0..=count)
            .map(|k| {
                let t = k as f64 / count as f64;
                PathSample { t, value: f(t) }
            })
            .collect();
        PathOfInvertibles { closed, samples }
    }

    pub fn dim(&self) -> usize {
        self.samples.first().map(|s| s.value.dim()).unwrap_or(0)
    }

    pub fn start(&self) -> &MatC {
        &self.samples[0].value
    }

    pub fn end(&self) -> &MatC {
        &self.samples[self.samples.len() - 1].value
    }

    pub fn validate(&self, tol: f64) -> Result<(), DetError> {
        let bad = |detail: String| Err(DetError::BadPath { detail });
        if self.samples.len() < 2 {
            return bad("need at least two samples".into());
        }
        let n = self.dim();
        if self.samples[0].t != 0.0 || self.samples[self.samples.len() - 1].t != 1.0 {
            return bad("samples must start at t = 0 and end at t = 1".into());
        }
        for (k, w) in self.samples.windows(2).enumerate() {
            if !(w[1].t > w[0].t) {
                return bad(format!("times not strictly increasing at sample {}", k + 1));
            }
        }
        for (k, s) in self.samples.iter().enumerate() {
            s.value.validate()?;
            s.value.ensure_dim(n)?;
            let sv = singular_values(&s.value)?;
            let lo = sv.last().copied().unwrap_or(0.0);
            if lo <= 1e-12 * sv[0] {
                return bad(format!("sample {k} is not invertible"));
            }
        }
        if self.closed {
            let gap = opnorm(&(self.end() - self.start()));
            if gap > tol * opnorm(self.start()).max(1.0) {
                return bad(format!("closed path does not return to its start (gap {gap:e})"));
            }
        }
        Ok(())
    }

    /// `self` followed by `other`, the second leg right-multiplied so that it
    /// starts where `self` ends: `η₂(t)·η₂(0)⁻¹·η₁(1)`.
    pub fn concat(&self, other: &PathOfInvertibles) -> Result<PathOfInvertibles, DetError> {
        let shift = &other.start().inverse()? * self.end();
        let mut samples: Vec<PathSample> = self
            .samples
            .iter()
            .map(|s| PathSample {
                t: s.t / 2.0,
                value: s.value.clone(),
            })
            .collect();
        samples.extend(other.samples.iter().skip(1).map(|s| PathSample {
            t: 0.5 + s.t / 2.0,
            value: &s.value * &shift,
        }));
        if let Some(last) = samples.last_mut() {
            last.t = 1.0;
        }
        let closed = opnorm(&(&samples[samples.len() - 1].value - &samples[0].value)) <= DEFAULT_TOL;
        Ok(PathOfInvertibles { closed, samples })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceConvention {
    /// Unnormalized matrix trace, `Tr(1_n) = n`.
    Standard,
}

/// A determinant value with the standard (unnormalized) trace, for which the
/// trace image of `K₀` is `ℤ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetValue {
    pub raw: C64,
    /// Real part reduced into `[0, 1)`; the imaginary part is kept as is.
    pub lattice_reduced: C64,
    /// Set when the imaginary part is not negligible (non-unitary paths).
    pub imaginary_flag: bool,
    pub trace: TraceConvention,
}

impl DetValue {
    pub fn new(raw: C64, tol: f64) -> Self {
        DetValue {
            raw,
            lattice_reduced: C64::new(reduce_mod_one(raw.re), raw.im),
            imaginary_flag: raw.im.abs() > tol,
            trace: TraceConvention::Standard,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentLog {
    /// Number of square-root halvings applied to this increment.
    pub halvings: u32,
    /// `‖log(η(t_{k+1})η(t_k)⁻¹)‖`.
    pub log_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetReport {
    pub value: DetValue,
    pub refinement_depth: u32,
    pub total_segments: usize,
    pub segments: Vec<SegmentLog>,
}

/// `(1/2πi) Σ_k Tr log(η(t_{k+1})η(t_k)⁻¹)`.
///
/// An increment `δ` with `‖δ − 1‖ ≥ 1` is replaced by `2^j` copies of its
/// principal `2^j`-th root, which is the geodesic interpolation of that
/// increment.
pub fn path_determinant(p: &PathOfInvertibles, tol: f64) -> Result<DetReport, DetError> {
    p.validate(tol)?;
    let n = p.dim();
    let id = MatC::identity(n);
    let mut total = C64::new(0.0, 0.0);
    let mut segments = Vec::with_capacity(p.samples.len() - 1);
    let mut total_segments = 0usize;
    let mut depth = 0u32;
    for (k, w) in p.samples.windows(2).enumerate() {
        let mut inc = &w[1].value * &w[0].value.inverse()?;
        let mut halvings = 0u32;
        while opnorm(&(&inc - &id)) >= 1.0 {
            halvings += 1;
            if total_segments + (1usize << halvings) > MAX_SEGMENTS {
                return Err(DetError::RefinementCap {
                    segment: k,
                    segments: MAX_SEGMENTS,
                });
            }
            inc = sqrtm(&inc).map_err(|e| match e {
                MatError::SpectrumOnCut { .. } => DetError::RefinementCap {
                    segment: k,
                    segments: total_segments + (1usize << halvings),
                },
                other => DetError::Mat(other),
            })?;
        }
        let pieces = 1usize << halvings;
        total_segments += pieces;
        depth = depth.max(halvings);
        let log = mlog_principal(&inc)?.scale_re(pieces as f64);
        total += log.trace();
        segments.push(SegmentLog {
            halvings,
            log_norm: opnorm(&log),
        });
    }
    let raw = total / C64::new(0.0, TAU);
    Ok(DetReport {
        value: DetValue::new(raw, tol),
        refinement_depth: depth,
        total_segments,
        segments,
    })
}

fn check_hermitian(h_list: &[MatC], tol: f64) -> Result<(), DetError> {
    for (k, h) in h_list.iter().enumerate() {
        h.validate()?;
        let deviation = h.hermitian_deviation();
        if deviation > tol * opnorm(h).max(1.0) {
            return Err(DetError::NotHermitian {
                which: format!("h[{k}]"),
                deviation,
            });
        }
    }
    Ok(())
}

/// Determinant of `Π e^{ih_k}` by the exponential-product rule:
/// `Tr(Σ h_k) / 2π`.
pub fn exp_product_determinant(h_list: &[MatC], tol: f64) -> Result<DetValue, DetError> {
    check_hermitian(h_list, tol)?;
    if let Some(first) = h_list.first() {
        for h in h_list {
            h.ensure_dim(first.dim())?;
        }
    }
    let tr: f64 = h_list.iter().map(|h| h.trace().re).sum();
    Ok(DetValue::new(C64::new(tr / TAU, 0.0), tol))
}

/// `t ↦ e^{ith}` sampled at `count + 1` points.
pub fn exp_path(h: &MatC, count: usize) -> PathOfInvertibles {
    let ih = h.scale(C64::new(0.0, 1.0));
    PathOfInvertibles::sample(count, false, |t| mexp(&ih.scale_re(t)))
}

/// The path to `e^{ih₁}⋯e^{ih_m}` that switches on one factor at a time,
/// `count` samples per leg.
pub fn exp_product_path(h_list: &[MatC], count: usize) -> Result<PathOfInvertibles, DetError> {
    check_hermitian(h_list, DEFAULT_TOL)?;
    let m = h_list.len();
    if m == 0 || count == 0 {
        return Err(DetError::BadInput {
            detail: "need at least one factor and one sample per leg".into(),
        });
    }
    let n = h_list[0].dim();
    let mut prefix = MatC::identity(n);
    let mut samples = vec![PathSample {
        t: 0.0,
        value: prefix.clone(),
    }];
    for (leg, h) in h_list.iter().enumerate() {
        h.ensure_dim(n)?;
        let ih = h.scale(C64::new(0.0, 1.0));
        for k in 1..=count {
            let s = k as f64 / count as f64;
            let t = if leg + 1 == m && k == count {
                1.0
            } else {
                (leg as f64 + s) / m as f64
            };
            samples.push(PathSample {
                t,
                value: &prefix * &mexp(&ih.scale_re(s)),
            });
        }
        prefix = &prefix * &mexp(&ih);
    }
    Ok(PathOfInvertibles { closed: false, samples })
}
