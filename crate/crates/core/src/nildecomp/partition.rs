use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{square_residual, split_square_zero_commutator, NilError, NilKind, NilTerm};
use crate::matcore::{opnorm, MatC, ZERO_FLOOR};

pub const DEFAULT_S1: f64 = 1.0 / 3.0;
pub const DEFAULT_S2: f64 = 2.0 / 3.0;

/// Pairs of partition functions with disjoint supports (1-based).
const ORTHOGONAL: [(usize, usize); 3] = [(1, 3), (1, 4), (2, 4)];

fn orthogonal(p: usize, q: usize) -> bool {
    ORTHOGONAL.contains(&(p.min(q), p.max(q)))
}

/// Four commuting positive functions on `[0, 1]` sampled on a grid, with
/// `f₁` supported on `[0, s₁)`, `f₂` on `(0, s₂)`, `f₃` on `(s₁, 1)`, `f₄`
/// on `(s₂, 1]` and `f₁ + f₂ + f₃ + f₄ = 1`.
///
/// `f₁`, `f₂`, `f₄` are hat profiles; `f₃` is defined as one minus the
/// other three so the sum is exact to rounding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition4 {
    pub s1: f64,
    pub s2: f64,
    pub grid: Vec<f64>,
    /// `profiles[i][g]` is `f_{i+1}` at `grid[g]`.
    pub profiles: [Vec<f64>; 4],
}

impl Partition4 {
    /// Uniform grid of `size ≥ 4` points including both endpoints.
    pub fn uniform(size: usize, s1: f64, s2: f64) -> Result<Self, NilError> {
        if size < 4 {
            return Err(NilError::BadPartition {
                detail: format!("grid needs at least 4 points, got {size}"),
            });
        }
        if !(0.0 < s1 && s1 < s2 && s2 < 1.0) {
            return Err(NilError::BadPartition {
                detail: format!("need 0 < s1 < s2 < 1, got s1 = {s1}, s2 = {s2}"),
            });
        }
        let grid: Vec<f64> = (0..size).map(|g| g as f64 / (size - 1) as f64).collect();
        let mut profiles: [Vec<f64>; 4] = Default::default();
        for &t in &grid {
            let f1 = if t < s1 { 1.0 - t / s1 } else { 0.0 };
            let f2 = if t <= 0.0 || t >= s2 {
                0.0
            } else if t < s1 {
                t / s1
            } else {
                (s2 - t) / (s2 - s1)
            };
            let f4 = if t > s2 { (t - s2) / (1.0 - s2) } else { 0.0 };
            let f3 = 1.0 - f1 - f2 - f4;
            for (p, v) in profiles.iter_mut().zip([f1, f2, f3, f4]) {
                p.push(v);
            }
        }
        let p = Partition4 { s1, s2, grid, profiles };
        p.validate(1e-12)?;
        Ok(p)
    }

    pub fn with_defaults(size: usize) -> Result<Self, NilError> {
        Self::uniform(size, DEFAULT_S1, DEFAULT_S2)
    }

    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    /// `f_i` as a diagonal matrix, `i` 1-based.
    pub fn f(&self, i: usize) -> MatC {
        MatC::from_real_diag(&self.profiles[i - 1])
    }

    /// `(f_p f_q)^{1/2}`.
    pub fn root_product(&self, p: usize, q: usize) -> MatC {
        let d: Vec<f64> = self.profiles[p - 1]
            .iter()
            .zip(&self.profiles[q - 1])
            .map(|(a, b)| (a * b).max(0.0).sqrt())
            .collect();
        MatC::from_real_diag(&d)
    }

    pub fn validate(&self, tol: f64) -> Result<(), NilError> {
        let n = self.grid.len();
        if n < 4 || self.profiles.iter().any(|p| p.len() != n) {
            return Err(NilError::BadPartition {
                detail: "profiles must have one value per grid point (at least 4)".into(),
            });
        }
        for g in 0..n {
            let vals: Vec<f64> = self.profiles.iter().map(|p| p[g]).collect();
            if vals.iter().any(|v| !v.is_finite() || *v < -tol) {
                return Err(NilError::BadPartition {
                    detail: format!("negative or non-finite value at grid point {g}"),
                });
            }
            let sum: f64 = vals.iter().sum();
            if (sum - 1.0).abs() > tol {
                return Err(NilError::BadPartition {
                    detail: format!("functions sum to {sum} at grid point {g}"),
                });
            }
            for &(p, q) in &ORTHOGONAL {
                let prod = vals[p - 1] * vals[q - 1];
                if prod.abs() > tol {
                    return Err(NilError::BadPartition {
                        detail: format!("f{p}·f{q} = {prod:e} at grid point {g}"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Classification of `[f_i a f_j, f_k b f_l]` from the support relations
/// alone (indices 1-based).
pub fn classify(idx: [usize; 4]) -> NilKind {
    let [i, j, k, l] = idx;
    let mut seen = [false; 5];
    for &x in &idx {
        seen[x] = true;
    }
    if !seen[1..].iter().all(|&s| s) {
        return NilKind::DelegatedM2M3;
    }
    if orthogonal(j, k) || orthogonal(l, i) {
        // one of the two products vanishes, and the other squares to zero
        NilKind::DirectNilpotent
    } else if orthogonal(i, j) && orthogonal(k, l) {
        NilKind::FromThreeSplit
    } else {
        NilKind::FromBridge
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionTerm {
    /// 1-based `(i, j, k, l)`.
    pub indices: [usize; 4],
    pub kind: NilKind,
    pub left: MatC,
    pub right: MatC,
    pub value: MatC,
}

/// All 256 terms `[f_i a f_j, f_k b f_l]`, ordered lexicographically in
/// `(i, j, k, l)`. They sum to `[a, b]` because `Σ f_i = 1`.
pub fn partition_expand(a: &MatC, b: &MatC, p: &Partition4, tol: f64) -> Result<Vec<ExpansionTerm>, NilError> {
    p.validate(tol.max(1e-12))?;
    a.ensure_dim(p.dim())?;
    b.ensure_dim(p.dim())?;
    a.validate()?;
    b.validate()?;
    let f: Vec<MatC> = (1..=4).map(|i| p.f(i)).collect();
    let fa: Vec<Vec<MatC>> = (0..4).map(|i| (0..4).map(|j| &(&f[i] * a) * &f[j]).collect()).collect();
    let fb: Vec<Vec<MatC>> = (0..4).map(|k| (0..4).map(|l| &(&f[k] * b) * &f[l]).collect()).collect();
    let mut out = Vec::with_capacity(256);
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let indices = [i + 1, j + 1, k + 1, l + 1];
                    let left = fa[i][j].clone();
                    let right = fb[k][l].clone();
                    let value = MatC::commutator(&left, &right);
                    out.push(ExpansionTerm {
                        indices,
                        kind: classify(indices),
                        left,
                        right,
                        value,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// `[f_i a f_j, f_k b f_l]` rewritten as three commutators of square-zero
/// pairs by inserting `P = (f_j f_k)^{1/2}` and `Q = (f_l f_i)^{1/2}`:
/// `[f_i a P, P b f_l] + [P b Q, Q a P] + [Q a f_j, f_k b Q]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeSplit {
    pub indices: [usize; 4],
    pub pairs: Vec<(MatC, MatC)>,
    /// `‖x²‖/‖x‖²` for each of the six arguments.
    pub argument_square_residuals: Vec<f64>,
    /// `‖Σ [x, y] − [f_i a f_j, f_k b f_l]‖`.
    pub identity_residual: f64,
}

impl BridgeSplit {
    /// The nine square-zero pieces from splitting each commutator in three.
    pub fn nil_pieces(&self, tol: f64) -> Result<Vec<MatC>, NilError> {
        let mut out = Vec::with_capacity(9);
        for (x, y) in &self.pairs {
            out.extend(split_square_zero_commutator(x, y, tol)?);
        }
        Ok(out)
    }
}

/// The bridge identity for the configuration `[f₁af₄, f₃bf₂]`.
pub fn bridge_split(a: &MatC, b: &MatC, p: &Partition4) -> Result<BridgeSplit, NilError> {
    bridge_split_at(a, b, p, [1, 4, 3, 2])
}

pub fn bridge_split_at(a: &MatC, b: &MatC, p: &Partition4, indices: [usize; 4]) -> Result<BridgeSplit, NilError> {
    p.validate(1e-12)?;
    a.ensure_dim(p.dim())?;
    b.ensure_dim(p.dim())?;
    if indices.iter().any(|&x| !(1..=4).contains(&x)) {
        return Err(NilError::BadPartition {
            detail: format!("indices {indices:?} out of range"),
        });
    }
    let [i, j, k, l] = indices;
    let pp = p.root_product(j, k);
    let q = p.root_product(l, i);
    let (fi, fj, fk, fl) = (p.f(i), p.f(j), p.f(k), p.f(l));
    let pairs = vec![
        (&(&fi * a) * &pp, &(&pp * b) * &fl),
        (&(&pp * b) * &q, &(&q * a) * &pp),
        (&(&q * a) * &fj, &(&fk * b) * &q),
    ];
    let argument_square_residuals = pairs
        .iter()
        .flat_map(|(x, y)| [square_residual(x), square_residual(y)])
        .collect();
    let target = MatC::commutator(&(&(&fi * a) * &fj), &(&(&fk * b) * &fl));
    let mut sum = MatC::zeros(a.dim());
    for (x, y) in &pairs {
        sum += MatC::commutator(x, y);
    }
    Ok(BridgeSplit {
        indices,
        pairs,
        argument_square_residuals,
        identity_residual: opnorm(&(&sum - &target)),
    })
}

/// What to do with terms that do not involve all four partition functions.
/// Returning `None` leaves the term unresolved.
pub trait DelegatedStrategy {
    fn name(&self) -> &'static str;
    fn resolve(&self, term: &ExpansionTerm, tol: f64) -> Result<Option<Vec<MatC>>, NilError>;
}

/// Emits every delegated term unresolved.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReportOnly;

impl DelegatedStrategy for ReportOnly {
    fn name(&self) -> &'static str {
        "report"
    }

    fn resolve(&self, _term: &ExpansionTerm, _tol: f64) -> Result<Option<Vec<MatC>>, NilError> {
        Ok(None)
    }
}

/// Splits a delegated term in three when both of its arguments happen to be
/// square-zero, and reports it otherwise.
#[derive(Debug, Clone, Copy, Default)]
pub struct NilIfPossible;

impl DelegatedStrategy for NilIfPossible {
    fn name(&self) -> &'static str {
        "nil-if-possible"
    }

    fn resolve(&self, term: &ExpansionTerm, tol: f64) -> Result<Option<Vec<MatC>>, NilError> {
        if term.value.is_zero() {
            return Ok(Some(Vec::new()));
        }
        if square_residual(&term.left) <= tol && square_residual(&term.right) <= tol {
            return Ok(Some(split_square_zero_commutator(&term.left, &term.right, tol)?.to_vec()));
        }
        Ok(None)
    }
}

/// One row of the expansion table: the term and the pieces it became.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRow {
    pub indices: [usize; 4],
    pub kind: NilKind,
    pub term_norm: f64,
    pub pieces: Vec<NilTerm>,
    /// Largest `‖x²‖/‖x‖²` over the pieces (0 for delegated rows).
    pub square_residual: f64,
    /// `‖Σ pieces − term‖`.
    pub piece_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NilReport {
    pub a: MatC,
    pub b: MatC,
    pub s1: f64,
    pub s2: f64,
    pub grid_size: usize,
    pub strategy: String,
    pub rows: Vec<TermRow>,
    pub delegated_count: usize,
    pub kind_counts: BTreeMap<String, usize>,
    /// `‖Σ_terms [f_i a f_j, f_k b f_l] − [a, b]‖`.
    pub expansion_residual: f64,
    /// `‖Σ pieces + Σ delegated − [a, b]‖`.
    pub conservation_residual: f64,
    pub max_square_residual: f64,
    /// `max ‖piece‖ / (‖a‖·‖b‖)`, reported with no asserted bound.
    pub measured_constant: f64,
}

/// Expands `[a, b]` over the partition and resolves every term into
/// square-zero pieces, handing the terms that miss a partition function to
/// `strategy`.
pub fn nil_decompose(
    a: &MatC,
    b: &MatC,
    p: &Partition4,
    strategy: &dyn DelegatedStrategy,
    tol: f64,
) -> Result<NilReport, NilError> {
    let terms = partition_expand(a, b, p, tol)?;
    let n = a.dim();
    let target = MatC::commutator(a, b);
    let mut expansion = MatC::zeros(n);
    let mut total = MatC::zeros(n);
    let mut rows = Vec::with_capacity(terms.len());
    let mut kind_counts = BTreeMap::new();
    let mut delegated_count = 0;
    let mut max_sq = 0.0f64;
    let mut max_piece = 0.0f64;
    for term in &terms {
        expansion += &term.value;
        let (kind, values) = match term.kind {
            NilKind::DirectNilpotent => (NilKind::DirectNilpotent, vec![term.value.clone()]),
            NilKind::FromThreeSplit => (
                NilKind::FromThreeSplit,
                split_square_zero_commutator(&term.left, &term.right, tol)?.to_vec(),
            ),
            NilKind::FromBridge => (
                NilKind::FromBridge,
                bridge_split_at(a, b, p, term.indices)?.nil_pieces(tol)?,
            ),
            NilKind::DelegatedM2M3 => match strategy.resolve(term, tol)? {
                Some(v) => (NilKind::FromThreeSplit, v),
                None => (NilKind::DelegatedM2M3, vec![term.value.clone()]),
            },
        };
        let pieces: Vec<NilTerm> = values
            .into_iter()
            .map(|value| NilTerm {
                value,
                kind,
                provenance: Some(term.indices),
            })
            .collect();
        let mut sum = MatC::zeros(n);
        let mut sq = 0.0f64;
        for piece in &pieces {
            sum += &piece.value;
            if kind != NilKind::DelegatedM2M3 {
                sq = sq.max(piece.square_residual());
                max_piece = max_piece.max(opnorm(&piece.value));
            }
        }
        total += &sum;
        if kind == NilKind::DelegatedM2M3 {
            delegated_count += 1;
        }
        max_sq = max_sq.max(sq);
        *kind_counts.entry(kind_name(kind).to_string()).or_insert(0) += 1;
        rows.push(TermRow {
            indices: term.indices,
            kind,
            term_norm: opnorm(&term.value),
            piece_residual: opnorm(&(&sum - &term.value)),
            pieces,
            square_residual: sq,
        });
    }
    let scale = opnorm(a) * opnorm(b);
    Ok(NilReport {
        a: a.clone(),
        b: b.clone(),
        s1: p.s1,
        s2: p.s2,
        grid_size: p.dim(),
        strategy: strategy.name().to_string(),
        rows,
        delegated_count,
        kind_counts,
        expansion_residual: opnorm(&(&expansion - &target)),
        conservation_residual: opnorm(&(&total - &target)),
        max_square_residual: max_sq,
        measured_constant: if scale > ZERO_FLOOR { max_piece / scale } else { 0.0 },
    })
}

fn kind_name(k: NilKind) -> &'static str {
    match k {
        NilKind::DirectNilpotent => "direct-nilpotent",
        NilKind::FromThreeSplit => "from-3-split",
        NilKind::FromBridge => "from-bridge",
        NilKind::DelegatedM2M3 => "delegated-M2M3",
    }
}
