use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Coefficients of a P1 field with `m` components, stored node-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    m: usize,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(num_nodes: usize, m: usize) -> Self {
        assert!(m > 0, "target dimension must be positive");
        Field {
            m,
            values: vec![0.0; num_nodes * m],
        }
    }

    pub fn from_values(m: usize, values: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("target dimension must be positive"));
        }
        if values.len() % m != 0 {
            return Err(Error::DimensionMismatch {
                expected: values.len().next_multiple_of(m),
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { node: i / m });
        }
        Ok(Field { m, values })
    }

    /// Builds a field node by node; `f(z, out)` fills the value at node `z`.
    pub fn from_fn(num_nodes: usize, m: usize, mut f: impl FnMut(usize, &mut [f64])) -> Self {
        let mut field = Field::zeros(num_nodes, m);
        for z in 0..num_nodes {
            f(z, field.node_mut(z));
        }
        field
    }

    /// The same vector at every node.
    pub fn constant(num_nodes: usize, value: &[f64]) -> Self {
        Field::from_fn(num_nodes, value.len(), |_, out| out.copy_from_slice(value))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn num_nodes(&self) -> usize {
        self.values.len() / self.m
    }

    pub fn node(&self, z: usize) -> &[f64] {
        &self.values[z * self.m..(z + 1) * self.m]
    }

    pub fn node_mut(&mut self, z: usize) -> &mut [f64] {
        &mut self.values[z * self.m..(z + 1) * self.m]
    }

    pub fn nodes(&self) -> core::slice::ChunksExact<'_, f64> {
        self.values.chunks_exact(self.m)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Component `c` as a scalar nodal vector.
    pub fn component(&self, c: usize) -> Vec<f64> {
        self.nodes().map(|v| v[c]).collect()
    }

    pub fn set_component(&mut self, c: usize, data: &[f64]) {
        let m = self.m;
        for (z, &v) in data.iter().enumerate() {
            self.values[z * m + c] = v;
        }
    }

    pub fn ensure_compatible(&self, other: &Field) -> Result<()> {
        Error::check_len(self.m, other.m)?;
        Error::check_len(self.values.len(), other.values.len())
    }

    /// `self + alpha * other`
    pub fn add_scaled(&self, alpha: f64, other: &Field) -> Result<Field> {
        self.ensure_compatible(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + alpha * b)
            .collect();
        Ok(Field { m: self.m, values })
    }

    pub fn scaled(&self, alpha: f64) -> Field {
        Field {
            m: self.m,
            values: self.values.iter().map(|v| alpha * v).collect(),
        }
    }

    /// Euclidean length of the vector at each node.
    pub fn moduli(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes().map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Mass-lumped inner product `sum_z beta_z v(z) . w(z)`.
pub fn lumped_inner(weights: &[f64], v: &Field, w: &Field) -> Result<f64> {
    v.ensure_compatible(w)?;
    Error::check_len(weights.len(), v.num_nodes())?;
    Ok(weights
        .iter()
        .zip(v.nodes().zip(w.nodes()))
        .map(|(b, (vz, wz))| b * vz.iter().zip(wz).map(|(p, q)| p * q).sum::<f64>())
        .sum())
}
