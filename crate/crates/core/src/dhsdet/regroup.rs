use serde::{Deserialize, Serialize};

use super::DetError;
use crate::matcore::{opnorm, singular_values, MatC};

/// The multiplicative commutator `(u, v) = u v u⁻¹ v⁻¹` with
/// `u = P g_left P⁻¹` and `v = P g_right P⁻¹`, where `P` is the product of
/// the factors listed in `prefix` (0-based factor indices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordCommutator {
    pub prefix: Vec<usize>,
    pub left: usize,
    pub right: usize,
    pub u: MatC,
    pub v: MatC,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegroupOutput {
    pub m: usize,
    pub n: usize,
    pub commutators: Vec<WordCommutator>,
    /// `g₁^N g₂^N ⋯ g_m^N`.
    pub tail: MatC,
    /// `‖(g₁⋯g_m)^N − Π(u_j, v_j)·tail‖ / ‖(g₁⋯g_m)^N‖`.
    pub identity_residual: f64,
}

/// Number of commutators produced for `m` factors and power `N`: the
/// inversion count of the word `(g₁⋯g_m)^N`.
pub fn regroup_count(m: usize, n: usize) -> usize {
    m * m.saturating_sub(1) / 2 * (n * n.saturating_sub(1) / 2)
}

/// Sorts the word `(g₁⋯g_m)^N` into `g₁^N⋯g_m^N` by adjacent swaps. Each
/// swap `P x y S → P y x S` uses `xy = (x, y)·yx` and moves the commutator
/// to the front as `(PxP⁻¹, PyP⁻¹)`, so
/// `(g₁⋯g_m)^N = Π_j (u_j, v_j) · g₁^N⋯g_m^N` exactly.
pub fn regroup_commutators(factors: &[MatC], n: usize) -> Result<RegroupOutput, DetError> {
    let m = factors.len();
    if m == 0 || n == 0 {
        return Err(DetError::BadInput {
            detail: "need at least one factor and N >= 1".into(),
        });
    }
    let dim = factors[0].dim();
    let mut inverses = Vec::with_capacity(m);
    for (k, g) in factors.iter().enumerate() {
        g.validate()?;
        g.ensure_dim(dim)?;
        let sv = singular_values(g)?;
        if sv.last().copied().unwrap_or(0.0) <= 1e-12 * sv[0] {
            return Err(DetError::SingularFactor { index: k });
        }
        inverses.push(g.inverse()?);
    }

    let word_product = |letters: &[usize], mats: &[MatC]| {
        letters.iter().fold(MatC::identity(dim), |acc, &k| &acc * &mats[k])
    };
    let mut word: Vec<usize> = (0..n).flat_map(|_| 0..m).collect();
    let mut commutators = Vec::with_capacity(regroup_count(m, n));
    let mut swapped = true;
    while swapped {
        swapped = false;
        for p in 0..word.len() - 1 {
            if word[p] > word[p + 1] {
                let prefix = word[..p].to_vec();
                let pm = word_product(&prefix, factors);
                let rev: Vec<usize> = prefix.iter().rev().copied().collect();
                let pinv = word_product(&rev, &inverses);
                let (x, y) = (word[p], word[p + 1]);
                commutators.push(WordCommutator {
                    u: &(&pm * &factors[x]) * &pinv,
                    v: &(&pm * &factors[y]) * &pinv,
                    prefix,
                    left: x,
                    right: y,
                });
                word.swap(p, p + 1);
                swapped = true;
            }
        }
    }

    let tail = factors
        .iter()
        .fold(MatC::identity(dim), |acc, g| &acc * &g.powi(n));
    let lhs = word_product(&(0..n).flat_map(|_| 0..m).collect::<Vec<_>>(), factors);
    let mut rhs = MatC::identity(dim);
    for c in &commutators {
        // u⁻¹ = P x⁻¹ P⁻¹ and v⁻¹ = P y⁻¹ P⁻¹ from the word, not by inversion
        let pm = word_product(&c.prefix, factors);
        let rev: Vec<usize> = c.prefix.iter().rev().copied().collect();
        let pinv = word_product(&rev, &inverses);
        let uinv = &(&pm * &inverses[c.left]) * &pinv;
        let vinv = &(&pm * &inverses[c.right]) * &pinv;
        rhs = &(&(&(&rhs * &c.u) * &c.v) * &uinv) * &vinv;
    }
    rhs = &rhs * &tail;
    let identity_residual = opnorm(&(&lhs - &rhs)) / opnorm(&lhs);
    Ok(RegroupOutput {
        m,
        n,
        commutators,
        tail,
        identity_residual,
    })
}
