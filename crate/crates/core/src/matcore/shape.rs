use serde::{Deserialize, Serialize};

use super::{opnorm, MatC, MatError};

/// `M_n(⊕ᵢ M_{nᵢ})`, laid out so that index `k·d + p` (with `d = Σ nᵢ`)
/// is row `p` of the base algebra in amplification slot `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraShape {
    pub blocks: Vec<usize>,
    #[serde(default = "one")]
    pub amplification: usize,
}

fn one() -> usize {
    1
}

impl AlgebraShape {
    pub fn new(blocks: Vec<usize>, amplification: usize) -> Result<Self, MatError> {
        let s = AlgebraShape { blocks, amplification };
        s.validate()?;
        Ok(s)
    }

    pub fn single(n: usize) -> Self {
        AlgebraShape {
            blocks: vec![n],
            amplification: 1,
        }
    }

    pub fn validate(&self) -> Result<(), MatError> {
        if self.blocks.is_empty() || self.amplification == 0 || self.blocks.iter().any(|&b| b == 0) {
            return Err(MatError::Empty);
        }
        Ok(())
    }

    pub fn base_dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn total_dim(&self) -> usize {
        self.amplification * self.base_dim()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Dimension of summand `i` of the amplified algebra, `n·nᵢ`.
    pub fn block_capacity(&self, i: usize) -> usize {
        self.amplification * self.blocks[i]
    }

    /// Ambient indices belonging to summand `i`.
    pub fn block_indices(&self, i: usize) -> Vec<usize> {
        let d = self.base_dim();
        let off: usize = self.blocks[..i].iter().sum();
        (0..self.amplification)
            .flat_map(|k| (0..self.blocks[i]).map(move |p| k * d + off + p))
            .collect()
    }

    /// Summand `i` of `m` as a standalone matrix.
    pub fn extract_block(&self, m: &MatC, i: usize) -> MatC {
        let idx = self.block_indices(i);
        MatC::from_fn(idx.len(), |r, c| m[(idx[r], idx[c])])
    }

    /// Operator norm of everything outside the summands.
    pub fn off_block_norm(&self, m: &MatC) -> f64 {
        let mut label = vec![0usize; self.total_dim()];
        for i in 0..self.block_count() {
            for k in self.block_indices(i) {
                label[k] = i;
            }
        }
        let off = MatC::from_fn(m.dim(), |r, c| {
            if label[r] == label[c] {
                super::C64::new(0.0, 0.0)
            } else {
                m[(r, c)]
            }
        });
        opnorm(&off)
    }

    pub fn check(&self, m: &MatC) -> Result<(), MatError> {
        self.validate()?;
        m.ensure_dim(self.total_dim())
    }
}
