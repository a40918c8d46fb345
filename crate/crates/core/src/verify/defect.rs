use alloc::vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fem::{ExactSolution, P1Space};
use crate::linalg::{cg_solve, CgOptions, FnOperator};
use crate::tangent::{normalize_nodal, tangent_frame, DEFAULT_FLOOR};

/// L² norm of the consistency defect at step `n`.
///
/// With `u_*^j = R_h u(t_j)` the Ritz projections of the exact solution, the
/// defect `d` is the element of the discrete tangent space of
/// `N(u_*^{n-1})` satisfying
///
/// ```text
/// (d, phi) = (d_t u_*^n, phi) + (grad u_*^n, grad phi)   for all tangent phi.
/// ```
///
/// In frame coordinates this is `(F^T M F) alpha = F^T (M d_t u_*^n + A u_*^n)`
/// and the returned value is `||F alpha||`.
pub fn defect_norm(
    space: &P1Space<'_>,
    f: &dyn ExactSolution,
    tau: f64,
    n: usize,
    quadrature_order: usize,
    solver_tol: f64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("defect needs a step index n >= 1"));
    }
    if !(tau > 0.0) {
        return Err(Error::invalid("tau must be positive"));
    }
    let t_prev = (n - 1) as f64 * tau;
    let t_cur = n as f64 * tau;
    let prev = space.ritz_project(f, t_prev, quadrature_order, solver_tol)?;
    let cur = space.ritz_project(f, t_cur, quadrature_order, solver_tol)?;
    let direction = normalize_nodal(&prev, DEFAULT_FLOOR)?;
    let frame = tangent_frame(&direction)?;

    let m = cur.m();
    let full = cur.values().len();
    let rate = cur.add_scaled(-1.0, &prev)?.scaled(1.0 / tau);
    let mut mass_rate = vec![0.0; full];
    let mut stiff_u = vec![0.0; full];
    space.mass().spmv_blocked(rate.values(), m, &mut mass_rate);
    space.stiffness().spmv_blocked(cur.values(), m, &mut stiff_u);
    for (a, b) in mass_rate.iter_mut().zip(&stiff_u) {
        *a += b;
    }
    let rhs = frame.reduce(&mass_rate);

    let op = FnOperator::new(frame.reduced_dim(), |alpha: &[f64], out: &mut [f64]| {
        let mut v = vec![0.0; full];
        let mut mv = vec![0.0; full];
        frame.expand_into(alpha, &mut v);
        space.mass().spmv_blocked(&v, m, &mut mv);
        frame.reduce_into(&mv, out);
    });
    let sol = cg_solve(&op, &rhs, CgOptions::with_tol(solver_tol))?;
    Ok(space.l2_norm_sq(&frame.expand(&sol.x))?.sqrt())
}
