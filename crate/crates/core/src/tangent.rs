//! Nodal sphere geometry: normalization, tangent frames and the nodal
//! projection `v(z) -> (I - u(z) u(z)^T) v(z)`.
//!
//! The discrete tangent space of a unit field `u` consists of the P1 fields
//! whose nodal values are orthogonal to the nodal values of `u`. Since P1
//! fields are determined by their nodal values, every operation here is a
//! pure per-node map.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fem::Field;

/// Smallest nodal modulus accepted by [`normalize_nodal`] unless told otherwise.
pub const DEFAULT_FLOOR: f64 = 0.1;

/// Candidate basis vectors with a smaller residual are skipped in frame completion.
const FRAME_SKIP: f64 = 1e-8;

/// `u(z) / |u(z)|` at every node.
///
/// Fails with [`Error::BelowFloor`] at the first node whose modulus is below
/// `floor`; such a node would leave the regime where the scheme is analyzed.
pub fn normalize_nodal(u: &Field, floor: f64) -> Result<Field> {
    let mut out = u.clone();
    for (z, node) in out.values_mut().chunks_exact_mut(u.m()).enumerate() {
        let modulus = node.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(modulus >= floor) || modulus == 0.0 {
            return Err(Error::BelowFloor {
                node: z,
                modulus,
                floor,
            });
        }
        node.iter_mut().for_each(|x| *x /= modulus);
    }
    Ok(out)
}

/// Per-node orthonormal bases of the orthogonal complement of `u(z)`.
///
/// Column `k` at node `z` occupies `columns[(z * (m-1) + k) * m ..][..m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentFrame {
    m: usize,
    columns: Vec<f64>,
}

impl TangentFrame {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn num_nodes(&self) -> usize {
        self.columns.len() / (self.m * (self.m - 1))
    }

    /// Size of the reduced coordinate vector, `(m - 1) * nodes`.
    pub fn reduced_dim(&self) -> usize {
        self.columns.len() / self.m
    }

    pub fn column(&self, z: usize, k: usize) -> &[f64] {
        let start = (z * (self.m - 1) + k) * self.m;
        &self.columns[start..start + self.m]
    }

    /// `v = F alpha`, nodewise `v(z) = sum_k alpha[z, k] f_k(z)`.
    pub fn expand(&self, alpha: &[f64]) -> Field {
        let mut v = Field::zeros(self.num_nodes(), self.m);
        self.expand_into(alpha, v.values_mut());
        v
    }

    pub(crate) fn expand_into(&self, alpha: &[f64], out: &mut [f64]) {
        let m = self.m;
        for (z, node) in out.chunks_exact_mut(m).enumerate() {
            node.iter_mut().for_each(|x| *x = 0.0);
            for k in 0..m - 1 {
                let a = alpha[z * (m - 1) + k];
                for (o, f) in node.iter_mut().zip(self.column(z, k)) {
                    *o += a * f;
                }
            }
        }
    }

    /// `F^T w`, the frame coordinates of the nodal values of `w`.
    pub fn reduce(&self, w: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.reduced_dim()];
        self.reduce_into(w, &mut out);
        out
    }

    pub(crate) fn reduce_into(&self, w: &[f64], out: &mut [f64]) {
        let m = self.m;
        for (z, node) in w.chunks_exact(m).enumerate() {
            for k in 0..m - 1 {
                out[z * (m - 1) + k] = self.column(z, k).iter().zip(node).map(|(a, b)| a * b).sum();
            }
        }
    }

    /// The same frame with every column negated.
    pub fn flip_signs(&self) -> TangentFrame {
        TangentFrame {
            m: self.m,
            columns: self.columns.iter().map(|c| -c).collect(),
        }
    }
}

/// Deterministic tangent frames for a field of nodal unit vectors.
///
/// At each node the standard basis vectors are tried in order of increasing
/// `|u_k(z)|` (lowest index first on ties) and orthonormalized against `u(z)`
/// and the columns accepted so far.
pub fn tangent_frame(u_hat: &Field) -> Result<TangentFrame> {
    let m = u_hat.m();
    if m < 2 {
        return Err(Error::invalid("tangent frames need a target dimension of at least 2"));
    }
    let mut columns = Vec::with_capacity(u_hat.num_nodes() * (m - 1) * m);
    let mut order: Vec<usize> = (0..m).collect();
    let mut candidate = vec![0.0; m];
    for (z, u) in u_hat.nodes().enumerate() {
        order.sort_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs()).then(a.cmp(&b)));
        let start = columns.len();
        for &e in &order {
            if columns.len() - start == (m - 1) * m {
                break;
            }
            candidate.iter_mut().for_each(|x| *x = 0.0);
            candidate[e] = 1.0;
            // two passes of Gram-Schmidt keep orthogonality at rounding level
            for _ in 0..2 {
                subtract_projection(&mut candidate, u);
                for q in columns[start..].chunks_exact(m) {
                    subtract_projection(&mut candidate, q);
                }
            }
            let norm = candidate.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < FRAME_SKIP {
                continue;
            }
            columns.extend(candidate.iter().map(|x| x / norm));
        }
        if columns.len() - start != (m - 1) * m {
            return Err(Error::FrameCompletion { node: z });
        }
    }
    Ok(TangentFrame { m, columns })
}

fn subtract_projection(v: &mut [f64], q: &[f64]) {
    let s: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
    for (vi, qi) in v.iter_mut().zip(q) {
        *vi -= s * qi;
    }
}

/// Nodal projection onto the discrete tangent space of `u_hat`.
pub fn project_nodal(u_hat: &Field, v: &Field) -> Result<Field> {
    u_hat.ensure_compatible(v)?;
    let mut out = v.clone();
    let m = v.m();
    for (node, u) in out.values_mut().chunks_exact_mut(m).zip(u_hat.nodes()) {
        subtract_projection(node, u);
    }
    Ok(out)
}

/// Whether `max_z |v(z) . u_hat(z)| <= tol`.
pub fn in_tangent_space(u_hat: &Field, v: &Field, tol: f64) -> bool {
    if u_hat.ensure_compatible(v).is_err() {
        return false;
    }
    u_hat
        .nodes()
        .zip(v.nodes())
        .all(|(u, w)| u.iter().zip(w).map(|(a, b)| a * b).sum::<f64>().abs() <= tol)
}
