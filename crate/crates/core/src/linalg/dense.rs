use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};


use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        DenseMatrix {
            nrows,
            ncols,
            data: vec![0.0; nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut id = Self::zeros(n, n);
        for i in 0..n {
            id[(i, i)] = 1.0;
        }
        id
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            Error::check_len(ncols, r.len())?;
            data.extend_from_slice(r);
        }
        Ok(DenseMatrix { nrows, ncols, data })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        Error::check_len(self.ncols, x.len())?;
        Ok(self
            .data
            .chunks_exact(self.ncols.max(1))
            .take(self.nrows)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        dense_solve(self, b)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.ncols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.ncols + j]
    }
}

/// Pivot magnitudes below this fraction of the largest entry are treated as zero.
const PIVOT_THRESHOLD: f64 = 1e-12;

/// Gaussian elimination with row partial pivoting, no refinement.
pub fn dense_solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.nrows;
    Error::check_len(n, a.ncols)?;
    Error::check_len(n, b.len())?;

    let scale = a.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut lu = a.data.clone();
    let mut x = b.to_vec();

    for k in 0..n {
        let (p, magnitude) = (k..n)
            .map(|i| (i, lu[i * n + k].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if magnitude <= PIVOT_THRESHOLD * scale || magnitude == 0.0 {
            return Err(Error::SingularMatrix {
                pivot: k,
                magnitude,
            });
        }
        if p != k {
            for j in 0..n {
                lu.swap(k * n + j, p * n + j);
            }
            x.swap(k, p);
        }
        let pivot = lu[k * n + k];
        for i in k + 1..n {
            let factor = lu[i * n + k] / pivot;
            if factor == 0.0 {
                continue;
            }
            lu[i * n + k] = 0.0;
            for j in k + 1..n {
                lu[i * n + j] -= factor * lu[k * n + j];
            }
            x[i] -= factor * x[k];
        }
    }

    for k in (0..n).rev() {
        let mut acc = x[k];
        for j in k + 1..n {
            acc -= lu[k * n + j] * x[j];
        }
        x[k] = acc / lu[k * n + k];
    }
    Ok(x)
}
