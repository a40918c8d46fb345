use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{axpy, dot, norm2};
use crate::error::{Error, Result};

/// A square linear map applied without materializing a matrix.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    /// Writes `A x` into `y`, overwriting it.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Adapts a closure `(x, y) -> y = A x` of the given dimension.
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnOperator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnOperator { dim, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> LinearOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (self.f)(x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    /// Target for `||A x - b|| / ||b||`.
    pub tol: f64,
    /// `None` means `10 * dim + 50`.
    pub max_iter: Option<usize>,
}

impl Default for CgOptions {
    fn default() -> Self {
        CgOptions {
            tol: 1e-12,
            max_iter: None,
        }
    }
}

impl CgOptions {
    pub fn with_tol(tol: f64) -> Self {
        CgOptions {
            tol,
            ..Default::default()
        }
    }

    fn max_iter_for(&self, dim: usize) -> usize {
        self.max_iter.unwrap_or(10 * dim + 50)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// True relative residual of the returned iterate.
    pub residual: f64,
}

/// Plain conjugate gradients from a zero initial guess.
///
/// Convergence is declared on the true residual `||b - A x|| <= tol ||b||`;
/// when the recursively updated residual drops below the target but the true
/// one does not, the iteration restarts from the true residual.
pub fn cg_solve<A: LinearOperator + ?Sized>(
    op: &A,
    b: &[f64],
    opts: CgOptions,
) -> Result<CgSolution> {
    let n = op.dim();
    Error::check_len(n, b.len())?;
    let mut x = vec![0.0; n];

    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Ok(CgSolution {
            x,
            iterations: 0,
            residual: 0.0,
        });
    }
    let target = opts.tol * b_norm;
    let max_iter = opts.max_iter_for(n);

    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let mut iterations = 0;

    while iterations < max_iter {
        op.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            // loss of positive definiteness or breakdown
            break;
        }
        let alpha = rr / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        iterations += 1;

        let rr_new = dot(&r, &r);
        if rr_new.sqrt() <= target {
            true_residual(op, &x, b, &mut r);
            rr = dot(&r, &r);
            if rr.sqrt() <= target {
                return Ok(CgSolution {
                    x,
                    iterations,
                    residual: rr.sqrt() / b_norm,
                });
            }
            p.copy_from_slice(&r);
            continue;
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
    }

    true_residual(op, &x, b, &mut r);
    let residual = norm2(&r) / b_norm;
    if residual <= opts.tol {
        return Ok(CgSolution {
            x,
            iterations,
            residual,
        });
    }
    Err(Error::NotConverged {
        iterations,
        residual,
    })
}

fn true_residual<A: LinearOperator + ?Sized>(op: &A, x: &[f64], b: &[f64], r: &mut [f64]) {
    op.apply(x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SparseMatrix;

    #[test]
    fn identity_converges_in_one_iteration() {
        let id = SparseMatrix::identity(2);
        let sol = cg_solve(&id, &[5.0, -3.0], CgOptions::default()).unwrap();
        assert_eq!(sol.x, vec![5.0, -3.0]);
        assert_eq!(sol.iterations, 1);
    }

    #[test]
    fn diagonal_system() {
        let d = SparseMatrix::from_triplets(&[(0, 0, 2.0), (1, 1, 4.0)], 2, 2).unwrap();
        let sol = cg_solve(&d, &[2.0, 4.0], CgOptions::default()).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-15 && (sol.x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let d = SparseMatrix::identity(3);
        let sol = cg_solve(&d, &[0.0; 3], CgOptions::default()).unwrap();
        assert_eq!(sol.x, vec![0.0; 3]);
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn iteration_cap_reports_residual() {
        let op = FnOperator::new(4, |x: &[f64], y: &mut [f64]| {
            for (i, (yi, xi)) in y.iter_mut().zip(x).enumerate() {
                *yi = (1.0 + 100.0 * i as f64) * xi;
            }
        });
        let opts = CgOptions {
            tol: 1e-14,
            max_iter: Some(1),
        };
        match cg_solve(&op, &[1.0; 4], opts) {
            Err(Error::NotConverged {
                iterations,
                residual,
            }) => {
                assert_eq!(iterations, 1);
                assert!(residual > 1e-14);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
