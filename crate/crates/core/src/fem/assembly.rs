use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::linalg::SparseMatrix;
use crate::mesh::{ElementGeometry, Mesh};

/// `A_ij = (grad phi_i, grad phi_j)`, exact from the constant barycentric gradients.
pub fn assemble_stiffness(mesh: &Mesh) -> Result<SparseMatrix> {
    stiffness_from(mesh, &mesh.geometries()?)
}

/// `M_ij = (phi_i, phi_j)` via `int lambda_a lambda_b = |K| (1 + delta_ab) / ((d+1)(d+2))`.
pub fn assemble_mass(mesh: &Mesh) -> Result<SparseMatrix> {
    mass_from(mesh, &mesh.geometries()?)
}

/// `beta_z = (1, phi_z)`, i.e. `|K| / (d+1)` summed over the elements at `z`.
pub fn lumped_weights(mesh: &Mesh) -> Vec<f64> {
    let d = mesh.dim();
    let mut beta = vec![0.0; mesh.num_vertices()];
    for (k, el) in mesh.elements().enumerate() {
        let share = mesh.element_volume(k) / (d + 1) as f64;
        for &z in el {
            beta[z] += share;
        }
    }
    beta
}

pub(crate) fn stiffness_from(mesh: &Mesh, geometry: &[ElementGeometry]) -> Result<SparseMatrix> {
    let d = mesh.dim();
    let mut triplets = Vec::with_capacity(geometry.len() * (d + 1) * (d + 1));
    for (el, geo) in mesh.elements().zip(geometry) {
        for (a, &i) in el.iter().enumerate() {
            for (b, &j) in el.iter().enumerate() {
                let g: f64 = (0..d).map(|k| geo.grads[a][k] * geo.grads[b][k]).sum();
                triplets.push((i, j, geo.volume * g));
            }
        }
    }
    let n = mesh.num_vertices();
    SparseMatrix::from_triplets(&triplets, n, n)
}

pub(crate) fn mass_from(mesh: &Mesh, geometry: &[ElementGeometry]) -> Result<SparseMatrix> {
    let d = mesh.dim();
    let denom = ((d + 1) * (d + 2)) as f64;
    let mut triplets = Vec::with_capacity(geometry.len() * (d + 1) * (d + 1));
    for (el, geo) in mesh.elements().zip(geometry) {
        for (a, &i) in el.iter().enumerate() {
            for (b, &j) in el.iter().enumerate() {
                let factor = if a == b { 2.0 } else { 1.0 };
                triplets.push((i, j, geo.volume * factor / denom));
            }
        }
    }
    let n = mesh.num_vertices();
    SparseMatrix::from_triplets(&triplets, n, n)
}
