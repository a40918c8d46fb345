//! Structured simplicial meshes of the unit box `(0,1)^d`.
//!
//! Every cube of the tensor grid with spacing `1/n` is split into `d!`
//! Kuhn simplices, one per ordering of the coordinate axes. In 2D this is the
//! split of each square along the diagonal from `(i, j)` to `(i+1, j+1)`.
//! Vertices are numbered lexicographically with the x index varying fastest;
//! elements are numbered cell by cell in the same order.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Axis orderings for the Kuhn split, in lexicographic order.
const PERMS_1: [[usize; 3]; 1] = [[0, 0, 0]];
const PERMS_2: [[usize; 3]; 2] = [[0, 1, 0], [1, 0, 0]];
const PERMS_3: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Volumes below this are rejected by [`Mesh::geometry`].
pub const DEGENERATE_VOLUME: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    dim: usize,
    subdivisions: usize,
    vertices: Vec<f64>,
    elements: Vec<usize>,
    h: f64,
}

/// Volume and barycentric gradients of one simplex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    pub volume: f64,
    /// `grads[a][k] = d lambda_a / d x_k` for the local vertex `a`.
    pub grads: [[f64; 3]; 4],
    /// Inverse Jacobian, rows `1..=d` of the barycentric gradients.
    inv_jacobian: [[f64; 3]; 3],
    origin: [f64; 3],
}

impl ElementGeometry {
    /// Barycentric coordinates of `x` with respect to this simplex.
    pub fn barycentric(&self, dim: usize, x: &[f64]) -> [f64; 4] {
        let mut lambda = [0.0; 4];
        let mut rest = 1.0;
        for a in 0..dim {
            let l: f64 = (0..dim)
                .map(|k| self.inv_jacobian[a][k] * (x[k] - self.origin[k]))
                .sum();
            lambda[a + 1] = l;
            rest -= l;
        }
        lambda[0] = rest;
        lambda
    }
}

impl Mesh {
    /// Kuhn triangulation of `(0,1)^d` with `n` subdivisions per axis.
    pub fn unit_cube(dim: usize, n: usize) -> Result<Mesh> {
        if !(1..=3).contains(&dim) {
            return Err(Error::invalid("spatial dimension must be 1, 2 or 3"));
        }
        if n == 0 {
            return Err(Error::invalid("number of subdivisions must be at least 1"));
        }

        let per_axis = n + 1;
        let num_vertices = per_axis.pow(dim as u32);
        let mut vertices = Vec::with_capacity(num_vertices * dim);
        for v in 0..num_vertices {
            let mut rem = v;
            for _ in 0..dim {
                vertices.push((rem % per_axis) as f64 / n as f64);
                rem /= per_axis;
            }
        }

        let perms: &[[usize; 3]] = match dim {
            1 => &PERMS_1,
            2 => &PERMS_2,
            _ => &PERMS_3,
        };
        let stride = |k: usize| per_axis.pow(k as u32);
        let num_cells = n.pow(dim as u32);
        let mut elements = Vec::with_capacity(num_cells * perms.len() * (dim + 1));
        for cell in 0..num_cells {
            let mut rem = cell;
            let mut corner = 0;
            for k in 0..dim {
                corner += (rem % n) * stride(k);
                rem /= n;
            }
            for perm in perms {
                let mut v = corner;
                let mut simplex = [corner; 4];
                for (a, &axis) in perm.iter().take(dim).enumerate() {
                    v += stride(axis);
                    simplex[a + 1] = v;
                }
                elements.extend_from_slice(&simplex[..=dim]);
            }
        }

        let mut mesh = Mesh {
            dim,
            subdivisions: n,
            vertices,
            elements,
            h: 0.0,
        };
        mesh.orient_positively();
        // Kuhn simplices all contain a main diagonal of their cube; computing h
        // on the integer lattice makes refinement halve it exactly.
        mesh.h = (dim as f64).sqrt() / n as f64;
        Ok(mesh)
    }

    fn orient_positively(&mut self) {
        let d = self.dim;
        for k in 0..self.num_elements() {
            if self.signed_volume(k) < 0.0 {
                let base = k * (d + 1);
                self.elements.swap(base + d - 1, base + d);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn subdivisions(&self) -> usize {
        self.subdivisions
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len() / self.dim
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len() / (self.dim + 1)
    }

    /// Maximal element diameter.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.vertices[i * self.dim..(i + 1) * self.dim]
    }

    pub fn element(&self, k: usize) -> &[usize] {
        let n = self.dim + 1;
        &self.elements[k * n..(k + 1) * n]
    }

    pub fn elements(&self) -> impl Iterator<Item = &[usize]> {
        self.elements.chunks_exact(self.dim + 1)
    }

    fn jacobian(&self, k: usize) -> ([[f64; 3]; 3], [f64; 3]) {
        let d = self.dim;
        let el = self.element(k);
        let x0 = self.vertex(el[0]);
        let mut origin = [0.0; 3];
        origin[..d].copy_from_slice(x0);
        // columns are edge vectors
        let mut jac = [[0.0; 3]; 3];
        for a in 0..d {
            let xa = self.vertex(el[a + 1]);
            for r in 0..d {
                jac[r][a] = xa[r] - x0[r];
            }
        }
        (jac, origin)
    }

    fn signed_volume(&self, k: usize) -> f64 {
        let (j, _) = self.jacobian(k);
        match self.dim {
            1 => j[0][0],
            2 => (j[0][0] * j[1][1] - j[0][1] * j[1][0]) / 2.0,
            _ => det3(&j) / 6.0,
        }
    }

    pub fn element_volume(&self, k: usize) -> f64 {
        self.signed_volume(k).abs()
    }

    /// Volume and barycentric gradients of element `k`.
    pub fn geometry(&self, k: usize) -> Result<ElementGeometry> {
        let d = self.dim;
        let (j, origin) = self.jacobian(k);
        let volume = self.element_volume(k);
        if !(volume >= DEGENERATE_VOLUME) {
            return Err(Error::DegenerateElement { element: k, volume });
        }
        let inv = invert(d, &j);
        let mut grads = [[0.0; 3]; 4];
        for a in 0..d {
            grads[a + 1] = inv[a];
            for c in 0..d {
                grads[0][c] -= inv[a][c];
            }
        }
        Ok(ElementGeometry {
            volume,
            grads,
            inv_jacobian: inv,
            origin,
        })
    }

    pub fn geometries(&self) -> Result<Vec<ElementGeometry>> {
        (0..self.num_elements()).map(|k| self.geometry(k)).collect()
    }

    /// Finds an element containing `x` and the barycentric coordinates of `x`
    /// in it. Points outside the closed box are clamped to the nearest cell.
    pub fn locate(&self, x: &[f64]) -> Result<(usize, [f64; 4])> {
        let d = self.dim;
        Error::check_len(d, x.len())?;
        let n = self.subdivisions;
        let mut cell = 0;
        let mut stride = 1;
        for &xk in x {
            let idx = ((xk * n as f64).floor().max(0.0) as usize).min(n - 1);
            cell += idx * stride;
            stride *= n;
        }
        let per_cell = match d {
            1 => 1,
            2 => 2,
            _ => 6,
        };
        let mut best: Option<(usize, [f64; 4], f64)> = None;
        for k in cell * per_cell..(cell + 1) * per_cell {
            let lambda = self.geometry(k)?.barycentric(d, x);
            let min = lambda[..=d].iter().cloned().fold(f64::INFINITY, f64::min);
            if best.is_none_or(|(_, _, m)| min > m) {
                best = Some((k, lambda, min));
            }
        }
        let (k, lambda, _) = best.expect("every cell holds at least one element");
        Ok((k, lambda))
    }
}

/// Largest pairwise vertex distance over all elements, from the coordinates.
pub fn mesh_size(mesh: &Mesh) -> f64 {
    let mut max_sq = 0.0f64;
    for el in mesh.elements() {
        for (a, &i) in el.iter().enumerate() {
            for &j in &el[a + 1..] {
                let sq: f64 = mesh
                    .vertex(i)
                    .iter()
                    .zip(mesh.vertex(j))
                    .map(|(p, q)| (p - q) * (p - q))
                    .sum();
                max_sq = max_sq.max(sq);
            }
        }
    }
    max_sq.sqrt()
}

fn det3(j: &[[f64; 3]; 3]) -> f64 {
    j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
        + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0])
}

/// Inverse of the leading `d x d` block via cofactors.
fn invert(d: usize, j: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut inv = [[0.0; 3]; 3];
    match d {
        1 => inv[0][0] = 1.0 / j[0][0],
        2 => {
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            inv[0][0] = j[1][1] / det;
            inv[0][1] = -j[0][1] / det;
            inv[1][0] = -j[1][0] / det;
            inv[1][1] = j[0][0] / det;
        }
        _ => {
            let det = det3(j);
            for r in 0..3 {
                for c in 0..3 {
                    // cofactor of (c, r), transposed
                    let (r1, r2) = ((c + 1) % 3, (c + 2) % 3);
                    let (c1, c2) = ((r + 1) % 3, (r + 2) % 3);
                    inv[r][c] = (j[r1][c1] * j[r2][c2] - j[r1][c2] * j[r2][c1]) / det;
                }
            }
        }
    }
    inv
}
