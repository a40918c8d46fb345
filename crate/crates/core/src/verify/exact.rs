use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fem::ExactSolution;

/// `u(t, x) = (cos theta, sin theta, 0, ..., 0)` with
/// `theta(t, x) = exp(-d pi^2 t) prod_k cos(pi x_k)`.
///
/// Since `theta` is a Neumann eigenmode of the heat equation, `u` solves
/// `u_t - Δu = |∇u|^2 u` with homogeneous Neumann data and stays on the sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSolution {
    m: usize,
    d: usize,
}

pub fn exact_phase_solution(m: usize, d: usize) -> Result<PhaseSolution> {
    if m < 2 {
        return Err(Error::invalid("phase solution needs m >= 2"));
    }
    if !(1..=3).contains(&d) {
        return Err(Error::invalid("phase solution needs d in 1..=3"));
    }
    Ok(PhaseSolution { m, d })
}

impl PhaseSolution {
    pub fn theta(&self, t: f64, x: &[f64]) -> f64 {
        self.decay(t) * x.iter().map(|&xk| (PI * xk).cos()).product::<f64>()
    }

    fn decay(&self, t: f64) -> f64 {
        (-(self.d as f64) * PI * PI * t).exp()
    }

    fn theta_gradient(&self, t: f64, x: &[f64], out: &mut [f64; 3]) {
        let decay = self.decay(t);
        for k in 0..self.d {
            let mut g = -PI * (PI * x[k]).sin() * decay;
            for (j, &xj) in x.iter().enumerate() {
                if j != k {
                    g *= (PI * xj).cos();
                }
            }
            out[k] = g;
        }
    }
}

impl ExactSolution for PhaseSolution {
    fn target_dim(&self) -> usize {
        self.m
    }

    fn spatial_dim(&self) -> usize {
        self.d
    }

    fn value(&self, t: f64, x: &[f64], out: &mut [f64]) {
        let theta = self.theta(t, x);
        out.iter_mut().for_each(|v| *v = 0.0);
        out[0] = theta.cos();
        out[1] = theta.sin();
    }

    fn gradient(&self, t: f64, x: &[f64], out: &mut [f64]) {
        let theta = self.theta(t, x);
        let mut g = [0.0; 3];
        self.theta_gradient(t, x, &mut g);
        out.iter_mut().for_each(|v| *v = 0.0);
        let d = self.d;
        for k in 0..d {
            out[k] = -theta.sin() * g[k];
            out[d + k] = theta.cos() * g[k];
        }
    }

    fn time_derivative(&self, t: f64, x: &[f64], out: &mut [f64]) {
        let theta = self.theta(t, x);
        let theta_t = -(self.d as f64) * PI * PI * theta;
        out.iter_mut().for_each(|v| *v = 0.0);
        out[0] = -theta.sin() * theta_t;
        out[1] = theta.cos() * theta_t;
    }

    fn description(&self) -> &str {
        "phase solution (cos theta, sin theta) with theta a Neumann heat mode"
    }
}

/// A constant unit vector, a stationary solution.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantSolution {
    value: Vec<f64>,
    d: usize,
}

impl ConstantSolution {
    pub fn new(value: Vec<f64>, d: usize) -> Self {
        ConstantSolution { value, d }
    }

    /// `e_1` in `R^m`.
    pub fn unit(m: usize, d: usize) -> Self {
        let mut value = alloc::vec![0.0; m];
        value[0] = 1.0;
        ConstantSolution { value, d }
    }
}

impl ExactSolution for ConstantSolution {
    fn target_dim(&self) -> usize {
        self.value.len()
    }

    fn spatial_dim(&self) -> usize {
        self.d
    }

    fn value(&self, _t: f64, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.value);
    }

    fn gradient(&self, _t: f64, _x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
    }

    fn time_derivative(&self, _t: f64, _x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
    }

    fn description(&self) -> &str {
        "constant map"
    }
}
