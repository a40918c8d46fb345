use alloc::vec;
use alloc::vec::Vec;


use super::dense::DenseMatrix;
use super::LinearOperator;
use crate::error::{Error, Result};

/// Compressed sparse row matrix.
///
/// Column indices are strictly increasing within each row. Scalar finite
/// element matrices are stored once and applied blockwise to node-major
/// vector fields with [`SparseMatrix::spmv_blocked`].
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates in
    /// input order.
    pub fn from_triplets(
        triplets: &[(usize, usize, f64)],
        nrows: usize,
        ncols: usize,
    ) -> Result<Self> {
        if let Some(&(row, col, _)) = triplets
            .iter()
            .find(|&&(r, c, _)| r >= nrows || c >= ncols)
        {
            return Err(Error::IndexOutOfRange {
                row,
                col,
                nrows,
                ncols,
            });
        }

        let mut sorted = triplets.to_vec();
        // stable: duplicates are summed in insertion order
        sorted.sort_by_key(|&(r, c, _)| (r, c));

        let mut row_offsets = vec![0usize; nrows + 1];
        let mut col_indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_indices.push(c);
                values.push(v);
                row_offsets[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..nrows {
            row_offsets[i + 1] += row_offsets[i];
        }

        Ok(SparseMatrix {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            nrows: n,
            ncols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Stored column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let range = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[range.clone()], &self.values[range])
    }

    /// Entry `(i, j)`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// `y = A x`, accumulating each row left to right.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        Error::check_len(self.ncols, x.len())?;
        let mut y = vec![0.0; self.nrows];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    /// Unchecked variant of [`spmv`](Self::spmv) writing into `y`.
    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&j, &a) in cols.iter().zip(vals) {
                acc += a * x[j];
            }
            *yi = acc;
        }
    }

    /// Applies `A ⊗ I_m` to a node-major field with `m` components per node.
    pub fn spmv_blocked(&self, x: &[f64], m: usize, y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols * m);
        debug_assert_eq!(y.len(), self.nrows * m);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            let yi = &mut y[i * m..(i + 1) * m];
            yi.iter_mut().for_each(|v| *v = 0.0);
            for (&j, &a) in cols.iter().zip(vals) {
                let xj = &x[j * m..(j + 1) * m];
                for (yc, xc) in yi.iter_mut().zip(xj) {
                    *yc += a * xc;
                }
            }
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.nrows).map(|i| self.row(i).1.iter().sum()).collect()
    }

    /// `alpha * self + beta * other`, on the union of both patterns.
    pub fn linear_combination(&self, alpha: f64, other: &SparseMatrix, beta: f64) -> Result<Self> {
        Error::check_len(self.nrows, other.nrows)?;
        Error::check_len(self.ncols, other.ncols)?;
        let mut triplets = Vec::with_capacity(self.nnz() + other.nnz());
        for (mat, scale) in [(self, alpha), (other, beta)] {
            for i in 0..mat.nrows {
                let (cols, vals) = mat.row(i);
                triplets.extend(cols.iter().zip(vals).map(|(&j, &v)| (i, j, scale * v)));
            }
        }
        SparseMatrix::from_triplets(&triplets, self.nrows, self.ncols)
    }

    /// Checks `|A_ij - A_ji| <= rel_tol * max|A|` over all stored entries.
    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        (0..self.nrows).all(|i| {
            let (cols, vals) = self.row(i);
            cols.iter()
                .zip(vals)
                .all(|(&j, &v)| (v - self.get(j, i)).abs() <= rel_tol * scale)
        })
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut dense = DenseMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                dense[(i, j)] = v;
            }
        }
        dense
    }
}

impl LinearOperator for SparseMatrix {
    fn dim(&self) -> usize {
        self.nrows
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.spmv_into(x, y);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let a = SparseMatrix::from_triplets(&[(0, 0, 1.0), (0, 0, 1.0)], 1, 1).unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(0, 0), 2.0);
    }

    #[test]
    fn rows_are_sorted_by_column() {
        let a = SparseMatrix::from_triplets(&[(0, 1, 3.0), (0, 0, 2.0)], 1, 2).unwrap();
        assert_eq!(a.col_indices(), &[0, 1]);
        assert_eq!(a.values(), &[2.0, 3.0]);
    }

    #[test]
    fn empty_triplets_give_zero_matrix() {
        let a = SparseMatrix::from_triplets(&[], 2, 2).unwrap();
        assert_eq!(a.nnz(), 0);
        assert_eq!(a.spmv(&[1.0, -4.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn out_of_range_triplet_is_rejected() {
        let err = SparseMatrix::from_triplets(&[(0, 2, 1.0)], 2, 2).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { row: 0, col: 2, .. }));
    }

    #[test]
    fn spmv_small_cases() {
        let id = SparseMatrix::identity(3);
        assert_eq!(id.spmv(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        let d = SparseMatrix::from_triplets(&[(0, 0, 2.0), (1, 1, 4.0)], 2, 2).unwrap();
        assert_eq!(d.spmv(&[1.0, 1.0]).unwrap(), vec![2.0, 4.0]);
        assert!(matches!(
            d.spmv(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn blocked_product_matches_componentwise() {
        let a = SparseMatrix::from_triplets(
            &[(0, 0, 2.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 2.0)],
            2,
            2,
        )
        .unwrap();
        // node-major, m = 2
        let x = [1.0, 10.0, 3.0, 30.0];
        let mut y = [0.0; 4];
        a.spmv_blocked(&x, 2, &mut y);
        assert_eq!(y, [-1.0, -10.0, 5.0, 50.0]);
    }
}
