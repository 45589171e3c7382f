//! Dense matrices over a [`Ring`] and exact Gaussian elimination over a
//! [`Field`].

use std::fmt;

use crate::algebra::{Field, Ring};

#[derive(Clone, PartialEq)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: Ring> Matrix<R> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds from row vectors; `None` if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<R>>) -> Option<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let n = rows.len();
        Some(Matrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { R::one() } else { R::zero() })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| R::zero())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[R] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<R>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Matrix<S> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Matrix product; `None` on a shape mismatch.
    pub fn mul(&self, rhs: &Matrix<R>) -> Option<Matrix<R>> {
        if self.cols != rhs.rows {
            return None;
        }
        Some(Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = R::zero();
            for k in 0..self.cols {
                acc.add_assign_ref(&self.get(i, k).mul_ref(rhs.get(k, j)));
            }
            acc
        }))
    }

    /// Copy with row `r` and column `c` removed.
    pub fn minor(&self, r: usize, c: usize) -> Self {
        Self::from_fn(self.rows - 1, self.cols - 1, |i, j| {
            let ii = if i < r { i } else { i + 1 };
            let jj = if j < c { j } else { j + 1 };
            self.get(ii, jj).clone()
        })
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        *v == R::one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }
}

impl<F: Field> Matrix<F> {
    /// Exact inverse by Gauss-Jordan elimination; `None` if singular or not
    /// square.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut inv = Self::identity(n).to_rows();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p_inv = a[col][col].inv()?;
            for j in 0..n {
                a[col][j] = a[col][j].mul_ref(&p_inv);
                inv[col][j] = inv[col][j].mul_ref(&p_inv);
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for j in 0..n {
                    let da = factor.mul_ref(&a[col][j]);
                    a[r][j] = a[r][j].sub_ref(&da);
                    let di = factor.mul_ref(&inv[col][j]);
                    inv[r][j] = inv[r][j].sub_ref(&di);
                }
            }
        }
        Self::from_rows(inv)
    }
}

impl<R: Ring> fmt::Debug for Matrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinearSystemError {
    /// Some equation cannot be satisfied; `equation` is its input position.
    #[error("inconsistent system: equation {equation} is violated after elimination")]
    Inconsistent { equation: usize },
    #[error("rank-deficient system: {free} free variable(s)")]
    RankDeficient { free: usize },
}

/// Solves `A x = b` exactly, where `A` may have more rows than columns.
///
/// Requires a unique solution: a rank below the column count is reported as
/// [`LinearSystemError::RankDeficient`], and any equation left unsatisfied
/// after elimination as [`LinearSystemError::Inconsistent`].
///
/// `weight` ranks candidate pivots (smaller is preferred); for `Q(h)` this
/// keeps intermediate expressions small.
#[allow(clippy::needless_range_loop)]
pub fn solve_unique<F: Field>(
    mut rows: Vec<Vec<F>>,
    mut rhs: Vec<F>,
    unknowns: usize,
    weight: impl Fn(&F) -> usize,
) -> Result<Vec<F>, LinearSystemError> {
    let m = rows.len();
    let mut origin: Vec<usize> = (0..m).collect();
    let mut pivot_cols = Vec::with_capacity(unknowns);
    let mut rank = 0;
    for col in 0..unknowns {
        let best = (rank..m)
            .filter(|&r| !rows[r][col].is_zero())
            .min_by_key(|&r| weight(&rows[r][col]));
        let Some(p) = best else { continue };
        rows.swap(rank, p);
        rhs.swap(rank, p);
        origin.swap(rank, p);
        let p_inv = rows[rank][col].inv().expect("nonzero pivot");
        for j in col..unknowns {
            rows[rank][j] = rows[rank][j].mul_ref(&p_inv);
        }
        rhs[rank] = rhs[rank].mul_ref(&p_inv);
        for r in 0..m {
            if r == rank || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone();
            for j in col..unknowns {
                if rows[rank][j].is_zero() {
                    continue;
                }
                let d = factor.mul_ref(&rows[rank][j]);
                rows[r][j] = rows[r][j].sub_ref(&d);
            }
            let d = factor.mul_ref(&rhs[rank]);
            rhs[r] = rhs[r].sub_ref(&d);
        }
        pivot_cols.push(col);
        rank += 1;
    }
    if let Some(r) = (rank..m).find(|&r| !rhs[r].is_zero()) {
        return Err(LinearSystemError::Inconsistent { equation: origin[r] });
    }
    if rank < unknowns {
        return Err(LinearSystemError::RankDeficient {
            free: unknowns - rank,
        });
    }
    let mut x = vec![F::zero(); unknowns];
    for (r, &c) in pivot_cols.iter().enumerate() {
        x[c] = rhs[r].clone();
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{HPoly, HRational};

    fn q(n: i64) -> HRational {
        HRational::from_int(n)
    }

    fn weight(_: &HRational) -> usize {
        0
    }

    #[test]
    fn inverse_over_q_of_h() {
        let h = HRational::hbar();
        let m = Matrix::from_rows(vec![vec![q(2) + h.clone(), q(1)], vec![h.clone(), q(1)]]).unwrap();
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
        let singular = Matrix::from_rows(vec![vec![h.clone(), h.clone()], vec![q(1), q(1)]]).unwrap();
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn overdetermined_consistent() {
        // x + y = 3, x - y = 1, 2x = 4
        let rows = vec![vec![q(1), q(1)], vec![q(1), q(-1)], vec![q(2), q(0)]];
        let x = solve_unique(rows, vec![q(3), q(1), q(4)], 2, weight).unwrap();
        assert_eq!(x, vec![q(2), q(1)]);
    }

    #[test]
    fn overdetermined_inconsistent() {
        let rows = vec![vec![q(1), q(1)], vec![q(1), q(-1)], vec![q(2), q(0)]];
        let err = solve_unique(rows, vec![q(3), q(1), q(5)], 2, weight).unwrap_err();
        assert!(matches!(err, LinearSystemError::Inconsistent { .. }));
    }

    #[test]
    fn rank_deficiency_counts_free_variables() {
        let rows = vec![vec![q(1), q(1), q(0)], vec![q(2), q(2), q(0)]];
        let err = solve_unique(rows, vec![q(1), q(2)], 3, weight).unwrap_err();
        assert_eq!(err, LinearSystemError::RankDeficient { free: 2 });
    }

    #[test]
    fn rational_function_coefficients() {
        // (1 - h) x = h  ->  x = h / (1 - h)
        let one_minus_h = HRational::from_poly(HPoly::from_ints(&[1, -1]));
        let x = solve_unique(vec![vec![one_minus_h.clone()]], vec![HRational::hbar()], 1, weight).unwrap();
        assert_eq!(&x[0] * &one_minus_h, HRational::hbar());
    }
}
