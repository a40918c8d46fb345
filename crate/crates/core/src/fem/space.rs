use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::assembly::{mass_from, stiffness_from};
use super::{lumped_weights, ExactSolution, Field, QuadratureRule};
use crate::error::{Error, Result};
use crate::linalg::{cg_solve, dot, CgOptions, FnOperator, SparseMatrix};
use crate::mesh::{ElementGeometry, Mesh};

/// A mesh together with its assembled scalar P1 matrices.
///
/// Matrices are scalar; vector fields are handled by applying them to each
/// component (`A ⊗ I_m`).
#[derive(Debug, Clone)]
pub struct P1Space<'a> {
    mesh: &'a Mesh,
    geometry: Vec<ElementGeometry>,
    stiffness: SparseMatrix,
    mass: SparseMatrix,
    weights: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l2: f64,
    pub h1_semi: f64,
    pub h1: f64,
}

impl<'a> P1Space<'a> {
    pub fn new(mesh: &'a Mesh) -> Result<Self> {
        let geometry = mesh.geometries()?;
        let stiffness = stiffness_from(mesh, &geometry)?;
        let mass = mass_from(mesh, &geometry)?;
        let weights = lumped_weights(mesh);
        Ok(P1Space {
            mesh,
            geometry,
            stiffness,
            mass,
            weights,
        })
    }

    pub fn mesh(&self) -> &'a Mesh {
        self.mesh
    }

    pub fn num_nodes(&self) -> usize {
        self.mesh.num_vertices()
    }

    pub fn stiffness(&self) -> &SparseMatrix {
        &self.stiffness
    }

    pub fn mass(&self) -> &SparseMatrix {
        &self.mass
    }

    pub fn lumped_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn geometry(&self) -> &[ElementGeometry] {
        &self.geometry
    }

    fn check_field(&self, u: &Field) -> Result<()> {
        Error::check_len(self.num_nodes(), u.num_nodes())
    }

    /// Dirichlet energy `1/2 ||grad u||^2`, exact for P1 fields.
    ///
    /// Summed element by element from [`element_gradient`](Self::element_gradient),
    /// so constants have exactly zero energy.
    pub fn energy(&self, u: &Field) -> Result<f64> {
        self.check_field(u)?;
        let d = self.mesh.dim();
        let mut grad = vec![0.0; u.m() * d];
        let mut sum = 0.0;
        for k in 0..self.geometry.len() {
            self.element_gradient(k, u, &mut grad);
            sum += self.geometry[k].volume * dot(&grad, &grad);
        }
        Ok(0.5 * sum)
    }

    /// Constant gradient of `u` on element `k`, row-major `m x d`.
    ///
    /// Built from nodal differences `u(z_a) - u(z_0)`, which makes it vanish
    /// exactly for constant fields.
    pub fn element_gradient(&self, k: usize, u: &Field, out: &mut [f64]) {
        self.gradient_of(k, u.values(), u.m(), out);
    }

    fn gradient_of(&self, k: usize, values: &[f64], m: usize, out: &mut [f64]) {
        let d = self.mesh.dim();
        let el = self.mesh.element(k);
        let geo = &self.geometry[k];
        out.iter_mut().for_each(|g| *g = 0.0);
        let base = &values[el[0] * m..(el[0] + 1) * m];
        for a in 1..=d {
            let node = &values[el[a] * m..(el[a] + 1) * m];
            for (c, (ua, u0)) in node.iter().zip(base).enumerate() {
                let diff = ua - u0;
                for kk in 0..d {
                    out[c * d + kk] += diff * geo.grads[a][kk];
                }
            }
        }
    }

    /// `(A ⊗ I_m) u`, applied element by element from nodal differences.
    ///
    /// Agrees with the assembled stiffness matrix up to rounding but avoids
    /// the cancellation of the row sums, so constants map exactly to zero.
    pub fn apply_stiffness(&self, u: &Field) -> Result<Field> {
        self.check_field(u)?;
        let mut out = Field::zeros(u.num_nodes(), u.m());
        self.stiffness_action(u.values(), u.m(), out.values_mut());
        Ok(out)
    }

    pub(crate) fn stiffness_action(&self, x: &[f64], m: usize, y: &mut [f64]) {
        let d = self.mesh.dim();
        y.iter_mut().for_each(|v| *v = 0.0);
        let mut grad = vec![0.0; m * d];
        for k in 0..self.geometry.len() {
            self.gradient_of(k, x, m, &mut grad);
            let geo = &self.geometry[k];
            for (a, &z) in self.mesh.element(k).iter().enumerate() {
                for c in 0..m {
                    let s: f64 = (0..d).map(|kk| geo.grads[a][kk] * grad[c * d + kk]).sum();
                    y[z * m + c] += geo.volume * s;
                }
            }
        }
    }

    /// `||v||^2` in L², with the consistent mass matrix.
    pub fn l2_norm_sq(&self, v: &Field) -> Result<f64> {
        self.check_field(v)?;
        Ok(self.block_form(&self.mass, v))
    }

    fn block_form(&self, matrix: &SparseMatrix, u: &Field) -> f64 {
        let mut au = vec![0.0; u.values().len()];
        matrix.spmv_blocked(u.values(), u.m(), &mut au);
        dot(&au, u.values())
    }

    pub fn interpolate(&self, f: &dyn ExactSolution, t: f64) -> Result<Field> {
        interpolate_nodal(f, self.mesh, t)
    }

    /// Mean-preserving Ritz projection.
    ///
    /// Solves `(A + b b^T) x_c = r_c` for every component `c`, where
    /// `b_i = (phi_i, 1)` and `r_c` holds `(grad f_c, grad phi_i) + (f_c, 1)(phi_i, 1)`
    /// evaluated by quadrature. The rank-one term is applied on the fly.
    ///
    /// Since `A 1 = 0` and `b^T 1 = 1`, the solution is `y + (f_c, 1) 1` where
    /// `y` solves the system with the gradient load alone. CG only sees that
    /// zero-sum load, which keeps the attainable residual independent of the
    /// size of the mean.
    pub fn ritz_project(
        &self,
        f: &dyn ExactSolution,
        t: f64,
        quadrature_order: usize,
        tol: f64,
    ) -> Result<Field> {
        let d = self.mesh.dim();
        let m = f.target_dim();
        Error::check_len(d, f.spatial_dim())?;
        let rule = QuadratureRule::simplex(d, quadrature_order)?;
        let n = self.num_nodes();

        let mut rhs = vec![vec![0.0; n]; m];
        let mut mean = vec![0.0; m];
        let mut value = vec![0.0; m];
        let mut grad = vec![0.0; m * d];
        let mut grad_int = vec![0.0; m * d];
        let mut x = [0.0; 3];
        for (el, geo) in self.mesh.elements().zip(&self.geometry) {
            grad_int.iter_mut().for_each(|g| *g = 0.0);
            for (lambda, w) in rule.iter() {
                self.physical_point(el, lambda, &mut x[..d]);
                let weight = w * geo.volume;
                f.value(t, &x[..d], &mut value);
                f.gradient(t, &x[..d], &mut grad);
                for c in 0..m {
                    mean[c] += weight * value[c];
                }
                for (gi, g) in grad_int.iter_mut().zip(&grad) {
                    *gi += weight * g;
                }
            }
            for (a, &i) in el.iter().enumerate() {
                for c in 0..m {
                    let s: f64 = (0..d).map(|k| geo.grads[a][k] * grad_int[c * d + k]).sum();
                    rhs[c][i] += s;
                }
            }
        }

        let beta = &self.weights;
        let op = FnOperator::new(n, |x: &[f64], y: &mut [f64]| {
            self.stiffness_action(x, 1, y);
            let bx = dot(beta, x);
            for (yi, bi) in y.iter_mut().zip(beta) {
                *yi += bx * bi;
            }
        });
        let mut out = Field::zeros(n, m);
        for (c, r) in rhs.iter().enumerate() {
            let mut x = cg_solve(&op, r, CgOptions::with_tol(tol))?.x;
            let shift = mean[c] - dot(beta, &x);
            x.iter_mut().for_each(|xi| *xi += shift);
            out.set_component(c, &x);
        }
        Ok(out)
    }

    /// L², H¹-seminorm and H¹ errors of `u` against `f(t, .)` by elementwise quadrature.
    pub fn error_norms(
        &self,
        u: &Field,
        f: &dyn ExactSolution,
        t: f64,
        quadrature_order: usize,
    ) -> Result<ErrorNorms> {
        self.check_field(u)?;
        let d = self.mesh.dim();
        let m = u.m();
        Error::check_len(m, f.target_dim())?;
        Error::check_len(d, f.spatial_dim())?;
        let rule = QuadratureRule::simplex(d, quadrature_order)?;

        let mut value = vec![0.0; m];
        let mut grad = vec![0.0; m * d];
        let mut grad_h = vec![0.0; m * d];
        let mut x = [0.0; 3];
        let (mut l2, mut h1) = (0.0, 0.0);
        for (k, (el, geo)) in self.mesh.elements().zip(&self.geometry).enumerate() {
            self.element_gradient(k, u, &mut grad_h);
            for (lambda, w) in rule.iter() {
                self.physical_point(el, lambda, &mut x[..d]);
                let weight = w * geo.volume;
                f.value(t, &x[..d], &mut value);
                f.gradient(t, &x[..d], &mut grad);
                for (c, fc) in value.iter().enumerate() {
                    let uh: f64 = el.iter().enumerate().map(|(a, &z)| lambda[a] * u.node(z)[c]).sum();
                    l2 += weight * (uh - fc) * (uh - fc);
                }
                h1 += weight
                    * grad_h
                        .iter()
                        .zip(&grad)
                        .map(|(p, q)| (p - q) * (p - q))
                        .sum::<f64>();
            }
        }
        Ok(ErrorNorms {
            l2: l2.sqrt(),
            h1_semi: h1.sqrt(),
            h1: (l2 + h1).sqrt(),
        })
    }

    fn physical_point(&self, el: &[usize], lambda: &[f64; 4], x: &mut [f64]) {
        x.iter_mut().for_each(|v| *v = 0.0);
        for (a, &z) in el.iter().enumerate() {
            for (xk, vk) in x.iter_mut().zip(self.mesh.vertex(z)) {
                *xk += lambda[a] * vk;
            }
        }
    }
}

/// Nodal interpolation: the field with `u(z) = f(t, z)` at every vertex.
pub fn interpolate_nodal(f: &dyn ExactSolution, mesh: &Mesh, t: f64) -> Result<Field> {
    Error::check_len(mesh.dim(), f.spatial_dim())?;
    let mut out = Field::zeros(mesh.num_vertices(), f.target_dim());
    for z in 0..mesh.num_vertices() {
        let node = out.node_mut(z);
        f.value(t, mesh.vertex(z), node);
        if node.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { node: z });
        }
    }
    Ok(out)
}

/// Mean-preserving Ritz projection of `f(t, .)` onto the P1 space of `mesh`.
pub fn ritz_project(
    f: &dyn ExactSolution,
    t: f64,
    mesh: &Mesh,
    quadrature_order: usize,
) -> Result<Field> {
    P1Space::new(mesh)?.ritz_project(f, t, quadrature_order, CgOptions::default().tol)
}

/// `1/2 sum_c u_c^T A u_c`
pub fn energy(stiffness: &SparseMatrix, u: &Field) -> Result<f64> {
    Error::check_len(stiffness.ncols(), u.num_nodes())?;
    let mut au = vec![0.0; u.values().len()];
    stiffness.spmv_blocked(u.values(), u.m(), &mut au);
    Ok(0.5 * dot(&au, u.values()))
}

pub fn error_norms(
    u: &Field,
    f: &dyn ExactSolution,
    t: f64,
    mesh: &Mesh,
    quadrature_order: usize,
) -> Result<ErrorNorms> {
    P1Space::new(mesh)?.error_norms(u, f, t, quadrature_order)
}
