use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fem::{Field, P1Space};
use crate::flow::FlowState;
use crate::linalg::{dense_solve, DenseMatrix};
use crate::tangent::{normalize_nodal, DEFAULT_FLOOR};

/// Largest KKT system the oracle will assemble.
pub const ORACLE_MAX_UNKNOWNS: usize = 400;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleStep {
    pub state: FlowState,
    /// `d_t u_h^n`
    pub rate: Field,
    /// One Lagrange multiplier per node.
    pub multipliers: Vec<f64>,
}

/// One step of the scheme through the dense saddle-point system
///
/// ```text
/// [ (M + tau A) ⊗ I_m   B^T ] [ v      ]   [ -(A ⊗ I_m) u ]
/// [ B                   0   ] [ lambda ] = [ 0            ]
/// ```
///
/// where row `z` of `B` is `u_hat(z)^T` acting on node `z`. This is an
/// independent realization of the tangent-frame CG step.
pub fn saddle_point_step_oracle(
    space: &P1Space<'_>,
    state: &FlowState,
    tau: f64,
) -> Result<OracleStep> {
    let nodes = space.num_nodes();
    let m = state.u.m();
    Error::check_len(nodes, state.u.num_nodes())?;
    let primal = nodes * m;
    let size = primal + nodes;
    if size > ORACLE_MAX_UNKNOWNS {
        return Err(Error::invalid("saddle-point oracle is limited to 400 unknowns"));
    }
    let direction = normalize_nodal(&state.u, DEFAULT_FLOOR)?;

    let mut kkt = DenseMatrix::zeros(size, size);
    for (matrix, scale) in [(space.mass(), 1.0), (space.stiffness(), tau)] {
        for i in 0..nodes {
            let (cols, vals) = matrix.row(i);
            for (&j, &a) in cols.iter().zip(vals) {
                for c in 0..m {
                    kkt[(i * m + c, j * m + c)] += scale * a;
                }
            }
        }
    }
    for (z, u) in direction.nodes().enumerate() {
        for (c, &uc) in u.iter().enumerate() {
            kkt[(primal + z, z * m + c)] = uc;
            kkt[(z * m + c, primal + z)] = uc;
        }
    }

    let mut rhs = vec![0.0; size];
    let stiffness = space.stiffness();
    for i in 0..nodes {
        let (cols, vals) = stiffness.row(i);
        for (&j, &a) in cols.iter().zip(vals) {
            for c in 0..m {
                rhs[i * m + c] -= a * state.u.node(j)[c];
            }
        }
    }

    let solution = dense_solve(&kkt, &rhs)?;
    let rate = Field::from_values(m, solution[..primal].to_vec())?;
    let u = state.u.add_scaled(tau, &rate)?;
    Ok(OracleStep {
        state: FlowState {
            u,
            n: state.n + 1,
            tau,
            t: (state.n + 1) as f64 * tau,
        },
        rate,
        multipliers: solution[primal..].to_vec(),
    })
}
