//! The permanent `|C|+ = sum_sigma prod_k C[k][sigma(k)]` and the block
//! matrices `G^{alpha,beta}` built from a metric.

use std::collections::HashMap;

use crate::algebra::Ring;
use crate::linalg::Matrix;
use crate::multiindex::MultiIndex;

pub const DEFAULT_SIZE_BOUND: usize = 12;

/// Sizes up to this use the permutation sum; larger ones use Ryser.
const NAIVE_LIMIT: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PermanentError {
    #[error("matrix is {rows}x{cols}, not square")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix size {size} exceeds the bound {bound}")]
    TooLarge { size: usize, bound: usize },
    #[error("row {row} out of range for a {size}x{size} matrix")]
    RowOutOfRange { row: usize, size: usize },
    #[error("block sizes {alpha} and {beta} have different weights")]
    WeightMismatch { alpha: MultiIndex, beta: MultiIndex },
    #[error("block sizes {0} contain a negative entry")]
    InvalidBlock(MultiIndex),
    #[error("block sizes have dimension {got}, metric has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

fn check_square<R: Ring>(c: &Matrix<R>, bound: usize) -> Result<usize, PermanentError> {
    if !c.is_square() {
        return Err(PermanentError::NonSquare { rows: c.rows(), cols: c.cols() });
    }
    if c.rows() > bound {
        return Err(PermanentError::TooLarge { size: c.rows(), bound });
    }
    Ok(c.rows())
}

pub fn plus_det<R: Ring>(c: &Matrix<R>) -> Result<R, PermanentError> {
    plus_det_bounded(c, DEFAULT_SIZE_BOUND)
}

pub fn plus_det_bounded<R: Ring>(c: &Matrix<R>, bound: usize) -> Result<R, PermanentError> {
    let n = check_square(c, bound)?;
    Ok(if n <= NAIVE_LIMIT { naive(c) } else { ryser(c) })
}

/// Sum over all permutations, built row by row.
pub fn naive<R: Ring>(c: &Matrix<R>) -> R {
    fn go<R: Ring>(c: &Matrix<R>, row: usize, used: &mut [bool], prefix: &R, acc: &mut R) {
        if row == c.rows() {
            acc.add_assign_ref(prefix);
            return;
        }
        for col in 0..c.cols() {
            if used[col] || c.get(row, col).is_zero() {
                continue;
            }
            used[col] = true;
            go(c, row + 1, used, &prefix.mul_ref(c.get(row, col)), acc);
            used[col] = false;
        }
    }
    let mut acc = R::zero();
    go(c, 0, &mut vec![false; c.cols()], &R::one(), &mut acc);
    acc
}

/// Ryser's formula `(-1)^n sum_S (-1)^{|S|} prod_i sum_{j in S} c_ij`,
/// with subsets visited in Gray-code order.
pub fn ryser<R: Ring>(c: &Matrix<R>) -> R {
    let n = c.rows();
    if n == 0 {
        return R::one();
    }
    let mut row_sums = vec![R::zero(); n];
    let mut acc = R::zero();
    for step in 1u64..(1u64 << n) {
        let col = step.trailing_zeros() as usize;
        let next = step ^ (step >> 1);
        let adding = next & (1 << col) != 0;
        for (i, sum) in row_sums.iter_mut().enumerate() {
            *sum = if adding { sum.add_ref(c.get(i, col)) } else { sum.sub_ref(c.get(i, col)) };
        }
        let mut prod = R::one();
        for sum in &row_sums {
            prod = prod.mul_ref(sum);
            if prod.is_zero() {
                break;
            }
        }
        if (n - next.count_ones() as usize).is_multiple_of(2) {
            acc.add_assign_ref(&prod);
        } else {
            acc = acc.sub_ref(&prod);
        }
    }
    acc
}

/// Expansion along `row`: `|C|+ = sum_j C[row][j] |C_{row,j}|+`.
pub fn plus_det_expand<R: Ring>(c: &Matrix<R>, row: usize) -> Result<R, PermanentError> {
    let n = check_square(c, DEFAULT_SIZE_BOUND + 1)?;
    if row >= n {
        return Err(PermanentError::RowOutOfRange { row, size: n });
    }
    let mut acc = R::zero();
    for j in 0..n {
        let entry = c.get(row, j);
        if entry.is_zero() {
            continue;
        }
        acc.add_assign_ref(&entry.mul_ref(&plus_det(&c.minor(row, j))?));
    }
    Ok(acc)
}

/// Block sizes and metric defining `G^{alpha,beta}`: block `(p, q)` has
/// shape `alpha_p x beta_q` and every entry equal to `g[p][q]` (`g_{p qbar}`).
#[derive(Debug, Clone)]
pub struct BlockSpec<R: Ring> {
    pub alpha: MultiIndex,
    pub beta: MultiIndex,
    pub g: Matrix<R>,
}

impl<R: Ring> BlockSpec<R> {
    pub fn new(alpha: MultiIndex, beta: MultiIndex, g: Matrix<R>) -> Result<Self, PermanentError> {
        validate(&alpha, &beta, g.rows())?;
        Ok(BlockSpec { alpha, beta, g })
    }

    pub fn assemble(&self) -> Matrix<R> {
        let rows = self.alpha.expand();
        let cols = self.beta.expand();
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.g.get(rows[i], cols[j]).clone())
    }
}

fn validate(alpha: &MultiIndex, beta: &MultiIndex, dim: usize) -> Result<(), PermanentError> {
    for m in [alpha, beta] {
        if m.dim() != dim {
            return Err(PermanentError::DimensionMismatch { expected: dim, got: m.dim() });
        }
        if !m.is_valid() {
            return Err(PermanentError::InvalidBlock(m.clone()));
        }
    }
    if alpha.weight() != beta.weight() {
        return Err(PermanentError::WeightMismatch { alpha: alpha.clone(), beta: beta.clone() });
    }
    Ok(())
}

pub fn block_permanent<R: Ring>(spec: &BlockSpec<R>) -> Result<R, PermanentError> {
    BlockPermanent::new(spec.g.clone()).get(&spec.alpha, &spec.beta)
}

/// Memoized block permanents for one fixed metric, using
/// `|G^{a,b}|+ = sum_q b_q g[I][q] |G^{a - e_I, b - e_q}|+` for the first
/// `I` with `a_I > 0`.
#[derive(Debug, Clone)]
pub struct BlockPermanent<R: Ring> {
    g: Matrix<R>,
    memo: HashMap<(MultiIndex, MultiIndex), R>,
}

impl<R: Ring> BlockPermanent<R> {
    pub fn new(g: Matrix<R>) -> Self {
        assert!(g.is_square(), "metric must be square");
        BlockPermanent { g, memo: HashMap::new() }
    }

    pub fn metric(&self) -> &Matrix<R> {
        &self.g
    }

    pub fn get(&mut self, alpha: &MultiIndex, beta: &MultiIndex) -> Result<R, PermanentError> {
        validate(alpha, beta, self.g.rows())?;
        Ok(self.recurse(alpha, beta))
    }

    fn recurse(&mut self, alpha: &MultiIndex, beta: &MultiIndex) -> R {
        let Some(i) = (0..alpha.dim()).find(|&k| alpha.get(k) > 0) else {
            return R::one();
        };
        let key = (alpha.clone(), beta.clone());
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let reduced = alpha.minus_unit(i);
        let mut acc = R::zero();
        for q in 0..beta.dim() {
            let bq = beta.get(q);
            if bq == 0 || self.g.get(i, q).is_zero() {
                continue;
            }
            let sub = self.recurse(&reduced, &beta.minus_unit(q));
            let term = self.g.get(i, q).mul_ref(&sub).mul_ref(&R::from_i64(i64::from(bq)));
            acc.add_assign_ref(&term);
        }
        self.memo.insert(key, acc.clone());
        acc
    }
}
