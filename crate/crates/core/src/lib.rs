//! Lowest-order finite elements for the harmonic map heat flow into spheres.
//!
//! The flow is discretized by the linearly implicit tangent-plane scheme:
//! given `u_h^{n-1}`, find the discrete time derivative `d_t u_h^n` whose
//! nodal values are orthogonal to `u_h^{n-1}(z) / |u_h^{n-1}(z)|` and which
//! satisfies
//!
//! ```text
//! (d_t u_h^n, phi_h) + (grad u_h^n, grad phi_h) = 0,   u_h^n = u_h^{n-1} + tau d_t u_h^n
//! ```
//!
//! for every test field `phi_h` with the same nodal orthogonality. The crate is
//! `no_std` (it needs `alloc`) and is split as follows:
//!
//! - [`linalg`]: CSR matrices, matrix-free conjugate gradients, a dense pivoting solver.
//! - [`mesh`]: structured Kuhn triangulations of the unit box in one to three dimensions.
//! - [`fem`]: P1 assembly, interpolation, lumped products, the mean-preserving Ritz
//!   projection, the Dirichlet energy and quadrature error norms.
//! - [`tangent`]: nodal normalization, tangent frames and the nodal projection.
//! - [`flow`]: the time stepping loop and its diagnostics.
//! - [`verify`]: closed-form solutions, consistency defects, a saddle-point oracle and
//!   the convergence-order harness.
#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN fails the guard.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Float methods come from `num_traits::Float` (libm). Whenever std is anywhere in
// the crate graph its inherent methods take precedence, so those imports carry
// `allow(unused_imports)`.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod fem;
pub mod flow;
pub mod linalg;
pub mod mesh;
pub mod tangent;
pub mod verify;

pub use error::{Error, Result};
pub use fem::{ExactSolution, Field, P1Space};
pub use flow::{FlowConfig, FlowState, InitialData, StepRecord};
pub use linalg::{CgOptions, DenseMatrix, SparseMatrix};
pub use mesh::Mesh;
pub use tangent::TangentFrame;
