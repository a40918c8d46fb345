//! P1 Lagrange finite elements for vector-valued maps.

mod assembly;
mod field;
pub mod quadrature;
mod space;

pub use assembly::{assemble_mass, assemble_stiffness, lumped_weights};
pub use field::{lumped_inner, Field};
pub use quadrature::QuadratureRule;
pub use space::{energy, error_norms, interpolate_nodal, ritz_project, ErrorNorms, P1Space};

use crate::mesh::Mesh;

/// A closed-form map `u(t, x)` from space-time into `R^m`.
///
/// Gradients are written row-major as an `m x d` matrix:
/// `out[c * d + k] = d u_c / d x_k`.
pub trait ExactSolution {
    fn target_dim(&self) -> usize;
    fn spatial_dim(&self) -> usize;
    fn value(&self, t: f64, x: &[f64], out: &mut [f64]);
    fn gradient(&self, t: f64, x: &[f64], out: &mut [f64]);
    fn time_derivative(&self, t: f64, x: &[f64], out: &mut [f64]);
    fn description(&self) -> &str;
}

/// A finite element field viewed as a function of `x`, constant in time.
///
/// Gradients are those of the element found by [`Mesh::locate`]; across
/// element faces that choice is arbitrary.
pub struct NodalLift<'a> {
    mesh: &'a Mesh,
    field: &'a Field,
}

impl<'a> NodalLift<'a> {
    pub fn new(mesh: &'a Mesh, field: &'a Field) -> Self {
        assert_eq!(mesh.num_vertices(), field.num_nodes());
        NodalLift { mesh, field }
    }
}

impl ExactSolution for NodalLift<'_> {
    fn target_dim(&self) -> usize {
        self.field.m()
    }

    fn spatial_dim(&self) -> usize {
        self.mesh.dim()
    }

    fn value(&self, _t: f64, x: &[f64], out: &mut [f64]) {
        let (k, lambda) = self.mesh.locate(x).expect("point dimension matches the mesh");
        out.iter_mut().for_each(|v| *v = 0.0);
        for (a, &z) in self.mesh.element(k).iter().enumerate() {
            for (o, u) in out.iter_mut().zip(self.field.node(z)) {
                *o += lambda[a] * u;
            }
        }
    }

    fn gradient(&self, _t: f64, x: &[f64], out: &mut [f64]) {
        let d = self.mesh.dim();
        let (k, _) = self.mesh.locate(x).expect("point dimension matches the mesh");
        let geo = self.mesh.geometry(k).expect("generated meshes are nondegenerate");
        out.iter_mut().for_each(|v| *v = 0.0);
        for (a, &z) in self.mesh.element(k).iter().enumerate() {
            for (c, u) in self.field.node(z).iter().enumerate() {
                for kk in 0..d {
                    out[c * d + kk] += u * geo.grads[a][kk];
                }
            }
        }
    }

    fn time_derivative(&self, _t: f64, _x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
    }

    fn description(&self) -> &str {
        "piecewise linear field"
    }
}
