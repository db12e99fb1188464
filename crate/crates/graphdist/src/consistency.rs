//! The alignment-consistency set `S`: construction through Q-factors,
//! verification, and its rank / PSD / nuclear-norm characterizations of the
//! block alignment matrix.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{nuclear_norm, sorted_eigen};
use crate::pscore::{Alignment, AlignmentKind};

/// A consistent family `{P_{i,j}}` stored through its Q-factors:
/// `P_{i,j} = Q_i Q_j^{-1}` with `Q_n = I` by convention.
///
/// Storing n matrices instead of n^2 blocks is lossless for consistent
/// families and shrinks brute-force search to `(m!)^(n-1)` candidates.
#[derive(Debug, Clone)]
pub struct ConsistentTuple {
    q_factors: Vec<Alignment>,
    kind: AlignmentKind,
}

impl ConsistentTuple {
    /// Build from Q-factors. The factors are right-normalized so the last
    /// one is the identity; this leaves every block `Q_i Q_j^{-1}` unchanged.
    pub fn from_q_factors(qs: &[Alignment]) -> Result<Self> {
        let n = qs.len();
        if n == 0 {
            return Err(Error::InvalidParams("need at least one Q-factor".into()));
        }
        let kind = qs[0].kind();
        let m = qs[0].dim();
        for q in qs {
            if q.kind() != kind {
                return Err(Error::InvalidParams("mixed alignment kinds".into()));
            }
            if q.dim() != m {
                return Err(Error::DimensionMismatch("Q-factors of unequal size".into()));
            }
        }
        let last_inv = qs[n - 1].inverse()?; // refuses doubly stochastic
        let q_factors = qs
            .iter()
            .map(|q| Alignment::new(q.matrix() * last_inv.matrix(), kind))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { q_factors, kind })
    }

    /// All-identity tuple.
    pub fn identity(n: usize, m: usize, kind: AlignmentKind) -> Self {
        Self {
            q_factors: (0..n).map(|_| Alignment::identity(m, kind)).collect(),
            kind,
        }
    }

    pub fn n(&self) -> usize {
        self.q_factors.len()
    }

    pub fn m(&self) -> usize {
        self.q_factors[0].dim()
    }

    pub fn kind(&self) -> AlignmentKind {
        self.kind
    }

    pub fn q_factors(&self) -> &[Alignment] {
        &self.q_factors
    }

    /// Derived block `P_{i,j} = Q_i Q_j^{-1}` (0-based indices).
    pub fn block(&self, i: usize, j: usize) -> Result<Alignment> {
        let inv = self.q_factors[j].inverse()?;
        Alignment::new(self.q_factors[i].matrix() * inv.matrix(), self.kind)
    }

    /// Complete block map over `[n]^2`.
    pub fn blocks(&self) -> Result<BTreeMap<(usize, usize), Alignment>> {
        let n = self.n();
        let mut map = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                map.insert((i, j), self.block(i, j)?);
            }
        }
        Ok(map)
    }

    /// The `nm x nm` block alignment matrix of this tuple.
    pub fn block_matrix(&self) -> Result<BlockAlignmentMatrix> {
        BlockAlignmentMatrix::from_blocks(self.n(), self.m(), &self.blocks()?)
    }
}

/// Dense `nm x nm` matrix whose `(i,j)` block is `P_{i,j}`.
#[derive(Debug, Clone)]
pub struct BlockAlignmentMatrix {
    n: usize,
    m: usize,
    matrix: DMatrix<f64>,
}

impl BlockAlignmentMatrix {
    /// Assemble from a complete block map; the diagonal blocks must be the
    /// identity.
    pub fn from_blocks(
        n: usize,
        m: usize,
        blocks: &BTreeMap<(usize, usize), Alignment>,
    ) -> Result<Self> {
        let mut matrix = DMatrix::zeros(n * m, n * m);
        for i in 0..n {
            for j in 0..n {
                let block = blocks
                    .get(&(i, j))
                    .ok_or_else(|| Error::InvalidParams(format!("missing block ({i},{j})")))?;
                if block.dim() != m {
                    return Err(Error::DimensionMismatch(format!(
                        "block ({i},{j}) has size {}",
                        block.dim()
                    )));
                }
                matrix
                    .view_mut((i * m, j * m), (m, m))
                    .copy_from(block.matrix());
            }
        }
        let built = Self { n, m, matrix };
        for i in 0..n {
            let diag = built.matrix.view((i * m, i * m), (m, m));
            if (diag - DMatrix::identity(m, m)).norm() > 1e-9 {
                return Err(Error::InvalidParams(format!(
                    "diagonal block {i} is not the identity"
                )));
            }
        }
        Ok(built)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

/// True iff the complete block set satisfies `P_{i,i} = I`,
/// `P_{i,j} P_{j,i} = I`, and `P_{i,k} P_{k,j} = P_{i,j}` within `tol`.
pub fn is_consistent(blocks: &BTreeMap<(usize, usize), Alignment>, tol: f64) -> Result<bool> {
    let n = blocks
        .keys()
        .map(|&(i, j)| i.max(j) + 1)
        .max()
        .ok_or_else(|| Error::InvalidParams("empty block set".into()))?;
    let m = blocks[&(0, 0)].dim();
    for i in 0..n {
        for j in 0..n {
            if !blocks.contains_key(&(i, j)) {
                return Err(Error::InvalidParams(format!("missing block ({i},{j})")));
            }
        }
    }
    let id = DMatrix::identity(m, m);
    for i in 0..n {
        if (blocks[&(i, i)].matrix() - &id).norm() > tol {
            return Ok(false);
        }
        for j in 0..n {
            if (blocks[&(i, j)].matrix() * blocks[&(j, i)].matrix() - &id).norm() > tol {
                return Ok(false);
            }
            for k in 0..n {
                let composed = blocks[&(i, k)].matrix() * blocks[&(k, j)].matrix();
                if (composed - blocks[&(i, j)].matrix()).norm() > tol {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Numerical rank of the tuple's block matrix at the scale-free threshold
/// `1e-8 * sigma_max`; passes iff the rank equals `m`.
pub fn check_rank_characterization(t: &ConsistentTuple) -> Result<(usize, bool)> {
    let block = t.block_matrix()?;
    let rank = numerical_rank(block.matrix());
    Ok((rank, rank == t.m()))
}

pub(crate) fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.max();
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-8 * max).count()
}

/// True iff the smallest eigenvalue of the symmetrized block matrix is at
/// least `-1e-8`.
pub fn check_psd_characterization(blocks: &BTreeMap<(usize, usize), Alignment>) -> Result<bool> {
    let n = blocks.keys().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0);
    if n == 0 {
        return Ok(true);
    }
    let m = blocks[&(0, 0)].dim();
    let block = BlockAlignmentMatrix::from_blocks(n, m, blocks)?;
    let sym = (block.matrix() + block.matrix().transpose()) * 0.5;
    let (values, _) = sorted_eigen(&sym)?;
    Ok(values[0] >= -1e-8)
}

/// Nuclear norm of the assembled block matrix.
pub fn block_nuclear_norm(blocks: &BTreeMap<(usize, usize), Alignment>) -> Result<f64> {
    let n = blocks.keys().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0);
    if n == 0 {
        return Ok(0.0);
    }
    let m = blocks[&(0, 0)].dim();
    let block = BlockAlignmentMatrix::from_blocks(n, m, blocks)?;
    Ok(nuclear_norm(block.matrix()))
}
