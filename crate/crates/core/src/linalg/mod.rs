//! Small linear algebra kit: CSR storage, conjugate gradients and a dense
//! direct solver used to cross-check the iterative paths.

mod cg;
mod csr;
mod dense;

pub use cg::{cg_solve, CgOptions, CgSolution, FnOperator, LinearOperator};
pub use csr::SparseMatrix;
pub use dense::{dense_solve, DenseMatrix};

/// Euclidean inner product.
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    num_traits::Float::sqrt(dot(x, x))
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
