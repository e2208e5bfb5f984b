use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use super::{CuntzVector, Rank};

/// A commutative monoid with a relation `≤`. The checks below only use the
/// relation as given, so toy relations that are not partial orders are fine.
pub trait OrderedMonoid {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn le(&self, x: &Self::Elem, y: &Self::Elem) -> bool;
    fn is_finite(&self, x: &Self::Elem) -> bool;

    fn times(&self, x: &Self::Elem, k: u64) -> Self::Elem {
        (0..k).fold(self.zero(), |acc, _| self.add(&acc, x))
    }

    /// Compact containment `x′ ≪ x`, modeled as `x′ ≤ x` with `x′` finite.
    fn way_below(&self, x_prime: &Self::Elem, x: &Self::Elem) -> bool {
        self.is_finite(x_prime) && self.le(x_prime, x)
    }
}

/// Rank vectors with the componentwise order.
#[derive(Debug, Clone, Copy)]
pub struct RankOrder {
    pub blocks: usize,
}

impl OrderedMonoid for RankOrder {
    type Elem = CuntzVector;

    fn zero(&self) -> CuntzVector {
        CuntzVector::zero(self.blocks)
    }

    fn add(&self, x: &CuntzVector, y: &CuntzVector) -> CuntzVector {
        x.plus(y)
    }

    fn le(&self, x: &CuntzVector, y: &CuntzVector) -> bool {
        x.le(y)
    }

    fn is_finite(&self, x: &CuntzVector) -> bool {
        x.is_finite()
    }

    fn times(&self, x: &CuntzVector, k: u64) -> CuntzVector {
        x.times(k)
    }
}

/// The submonoid of `ℕ` generated by `generators`, ordered algebraically:
/// `x ≤ y` iff `y = x + z` for some `z` in the monoid.
#[derive(Debug, Clone)]
pub struct NumericalSemigroup {
    pub generators: Vec<u64>,
}

impl NumericalSemigroup {
    pub fn contains(&self, z: u64) -> bool {
        let z = z as usize;
        let mut reach = vec![false; z + 1];
        reach[0] = true;
        for v in 1..=z {
            reach[v] = self.generators.iter().any(|&g| g as usize <= v && g > 0 && reach[v - g as usize]);
        }
        reach[z]
    }

    /// Elements up to `cap`.
    pub fn elements(&self, cap: u64) -> Vec<u64> {
        (0..=cap).filter(|&z| self.contains(z)).collect()
    }
}

impl OrderedMonoid for NumericalSemigroup {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn add(&self, x: &u64, y: &u64) -> u64 {
        x + y
    }

    fn le(&self, x: &u64, y: &u64) -> bool {
        y >= x && self.contains(y - x)
    }

    fn is_finite(&self, _: &u64) -> bool {
        true
    }
}

/// `ℕ ∪ {∞}` with its usual order, minus the listed pairs.
#[derive(Debug, Clone, Default)]
pub struct WithoutRelations {
    pub removed: Vec<(Rank, Rank)>,
}

impl OrderedMonoid for WithoutRelations {
    type Elem = Rank;

    fn zero(&self) -> Rank {
        Rank::Finite(0)
    }

    fn add(&self, x: &Rank, y: &Rank) -> Rank {
        *x + *y
    }

    fn le(&self, x: &Rank, y: &Rank) -> bool {
        x <= y && !self.removed.contains(&(*x, *y))
    }

    fn is_finite(&self, x: &Rank) -> bool {
        x.is_finite()
    }

    fn times(&self, x: &Rank, k: u64) -> Rank {
        x.times(k)
    }
}

/// The classes of `M_n`: ranks `0..=n` and `∞`, as one-block vectors.
pub fn cu_mn(n: u64) -> Vec<CuntzVector> {
    (0..=n)
        .map(Rank::Finite)
        .chain([Rank::Infinite])
        .map(|r| CuntzVector { ranks: vec![r] })
        .collect()
}

/// All rank vectors with `rᵢ ≤ nᵢ`, optionally with `∞` added per block.
pub fn rank_vectors(blocks: &[usize], with_infinity: bool) -> Vec<CuntzVector> {
    let mut out = vec![CuntzVector { ranks: vec![] }];
    for &n in blocks {
        let mut choices: Vec<Rank> = (0..=n as u64).map(Rank::Finite).collect();
        if with_infinity {
            choices.push(Rank::Infinite);
        }
        out = out
            .into_iter()
            .flat_map(|v| {
                choices.iter().map(move |&r| {
                    let mut w = v.clone();
                    w.ranks.push(r);
                    w
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerforationViolation<E> {
    pub x: E,
    pub y: E,
    pub k: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivisibilityViolation<E> {
    pub n: u64,
    pub x: E,
    pub x_prime: E,
}

/// Every `(x, y, k)` with `x, y ∈ S`, `1 ≤ k ≤ k_max`, `(k+1)x ≤ ky` and
/// `x ≰ y`.
pub fn almost_unperforated_check<M: OrderedMonoid>(
    m: &M,
    s: &[M::Elem],
    k_max: u64,
) -> Vec<PerforationViolation<M::Elem>> {
    let mut out = Vec::new();
    for x in s {
        for y in s {
            if m.le(x, y) {
                continue;
            }
            for k in 1..=k_max {
                if m.le(&m.times(x, k + 1), &m.times(y, k)) {
                    out.push(PerforationViolation {
                        x: x.clone(),
                        y: y.clone(),
                        k,
                    });
                }
            }
        }
    }
    out
}

/// A `y ∈ S` with `ny ≤ x` and `x′ ≤ (n+1)y`, if any.
pub fn divisor_witness<M: OrderedMonoid>(
    m: &M,
    s: &[M::Elem],
    n: u64,
    x: &M::Elem,
    x_prime: &M::Elem,
) -> Option<M::Elem> {
    s.iter()
        .find(|y| m.le(&m.times(y, n), x) && m.le(x_prime, &m.times(y, n + 1)))
        .cloned()
}

/// Every `(n, x, x′)` with `1 ≤ n ≤ n_max`, `x′ ≪ x` in `S` for which no
/// `y ∈ S` satisfies `ny ≤ x` and `x′ ≤ (n+1)y`.
pub fn almost_divisible_check<M: OrderedMonoid>(
    m: &M,
    s: &[M::Elem],
    n_max: u64,
) -> Vec<DivisibilityViolation<M::Elem>> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        for x in s {
            for x_prime in s.iter().filter(|xp| m.way_below(xp, x)) {
                if divisor_witness(m, s, n, x, x_prime).is_none() {
                    out.push(DivisibilityViolation {
                        n,
                        x: x.clone(),
                        x_prime: x_prime.clone(),
                    });
                }
            }
        }
    }
    out
}
