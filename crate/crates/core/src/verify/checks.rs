//! Seeded property suites, run by the `check` command.
//!
//! Each suite reports the worst observed deviation next to its tolerance.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::random;
use super::saddle_point_step_oracle;
use crate::error::Result;
use crate::fem::{lumped_inner, P1Space};
use crate::flow::{run_with, FlowConfig, FlowState, InitialData, Stepper};
use crate::mesh::Mesh;
use crate::tangent::{normalize_nodal, project_nodal, tangent_frame};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

/// Runs every suite with randomness derived from `seed`.
pub fn run_all(seed: u64) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        projection_algebra(seed)?,
        energy_law(seed)?,
        constraint_identity(seed)?,
        oracle_equivalence(seed)?,
        normalization_lipschitz(seed),
    ])
}

/// Self-adjointness, tangency and orthogonality of the nodal projection in
/// the lumped inner product, on `d in {1, 2}`, `m in {2, 3}`.
pub fn projection_algebra(seed: u64) -> Result<SuiteReport> {
    let mut rng = random::rng(seed);
    let mut worst = 0.0f64;
    for (d, n) in [(1, 8), (2, 4)] {
        let mesh = Mesh::unit_cube(d, n)?;
        let space = P1Space::new(&mesh)?;
        let beta = space.lumped_weights();
        let nodes = mesh.num_vertices();
        for m in [2, 3] {
            for _ in 0..100 {
                let u_hat = random::unit_field(nodes, m, &mut rng);
                let v = random::field(nodes, m, &mut rng);
                let w = random::field(nodes, m, &mut rng);
                let pv = project_nodal(&u_hat, &v)?;
                let pw = project_nodal(&u_hat, &w)?;
                let lhs = lumped_inner(beta, &pv, &w)?;
                let rhs = lumped_inner(beta, &v, &pw)?;
                worst = worst.max((lhs - rhs).abs());

                let tangency = u_hat
                    .nodes()
                    .zip(pv.nodes())
                    .map(|(a, b)| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>().abs())
                    .fold(0.0, f64::max);
                worst = worst.max(tangency);

                let frame = tangent_frame(&u_hat)?;
                let coeffs: Vec<f64> = (0..frame.reduced_dim())
                    .map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0))
                    .collect();
                let tangent = frame.expand(&coeffs);
                let residual = v.add_scaled(-1.0, &pv)?;
                worst = worst.max(lumped_inner(beta, &residual, &tangent)?.abs());
            }
        }
    }
    Ok(SuiteReport {
        name: "projection algebra",
        worst,
        tolerance: 1e-12,
    })
}

fn rough_run(seed: u64) -> (FlowConfig, Mesh) {
    let config = FlowConfig {
        dim: 2,
        subdivisions: 8,
        target_dim: 3,
        tau: 1.0 / 64.0,
        final_time: 0.25,
        initial: InitialData::Random { seed },
        ..Default::default()
    };
    let mesh = Mesh::unit_cube(2, 8).expect("valid mesh parameters");
    (config, mesh)
}

/// `E^n + sum_j tau ||d_t u^j||^2 <= E^0 (1 + 1e-8) + 1e-10` along a run
/// from rough random unit data. Reports the largest excess over `E^0`,
/// relative to `1 + E^0`.
pub fn energy_law(seed: u64) -> Result<SuiteReport> {
    let (config, mesh) = rough_run(seed);
    let space = P1Space::new(&mesh)?;
    let u0 = super::initial_field(&config, &mesh)?;
    let run = run_with(&space, &config, u0, |_| {})?;
    let e0 = run.records[0].energy;
    let mut dissipated = 0.0;
    let mut worst = f64::NEG_INFINITY;
    for r in &run.records {
        dissipated += r.dissipation;
        worst = worst.max((r.energy + dissipated - e0 * (1.0 + 1e-8) - 1e-10) / (1.0 + e0));
    }
    Ok(SuiteReport {
        name: "energy law",
        worst: worst.max(0.0),
        tolerance: 0.0,
    })
}

/// `|u^n(z)|^2 = 1 + tau^2 sum_j |d_t u^j(z)|^2` at every node and step.
pub fn constraint_identity(seed: u64) -> Result<SuiteReport> {
    let (config, mesh) = rough_run(seed);
    let space = P1Space::new(&mesh)?;
    let u0 = super::initial_field(&config, &mesh)?;
    let tau = config.tau;
    let mut accumulated = vec![0.0; mesh.num_vertices()];
    let mut worst = 0.0f64;
    run_with(&space, &config, u0, |outcome| {
        for (z, (acc, rate)) in accumulated.iter_mut().zip(outcome.rate.nodes()).enumerate() {
            *acc += tau * tau * rate.iter().map(|x| x * x).sum::<f64>();
            let modulus_sq: f64 = outcome.state.u.node(z).iter().map(|x| x * x).sum();
            worst = worst.max((modulus_sq - 1.0 - *acc).abs());
        }
    })?;
    Ok(SuiteReport {
        name: "constraint identity",
        worst,
        tolerance: 1e-9,
    })
}

/// Frame CG step against the dense saddle-point oracle on small meshes.
pub fn oracle_equivalence(seed: u64) -> Result<SuiteReport> {
    let mut rng = random::rng(seed ^ 0x5eed);
    let mut worst = 0.0f64;
    for (d, n) in [(1, 6), (1, 49), (2, 3), (2, 6), (3, 2)] {
        let mesh = Mesh::unit_cube(d, n)?;
        let space = P1Space::new(&mesh)?;
        for m in [2, 3] {
            for _ in 0..5 {
                let tau = rand::Rng::random_range(&mut rng, 0.01..0.2);
                let u = random::field_with_moduli(mesh.num_vertices(), m, 0.5, 2.0, &mut rng);
                let state = FlowState::initial(u, tau);
                let cg = Stepper::new(&space, tau, 1e-13)?.step(&state)?;
                let dense = saddle_point_step_oracle(&space, &state, tau)?;
                worst = worst.max(cg.state.u.max_abs_diff(&dense.state.u));
            }
        }
    }
    Ok(SuiteReport {
        name: "oracle equivalence",
        worst,
        tolerance: 1e-9,
    })
}

/// `|N(u) - N(v)| <= 4 |u - v|` for nodal vectors with moduli in `[1/2, 2]`.
///
/// Half of the 1000 pairs are independent, the other half are small
/// perturbations of each other, where the bound is closest to sharp.
pub fn normalization_lipschitz(seed: u64) -> SuiteReport {
    let mut rng = random::rng(seed ^ 0x11f);
    let u = random::field_with_moduli(1000, 3, 0.5, 2.0, &mut rng);
    let mut v = random::field_with_moduli(1000, 3, 0.5, 2.0, &mut rng);
    for z in 500..1000 {
        let scale = 10f64.powf(rand::Rng::random_range(&mut rng, -6.0..-1.0));
        let mut dir = [0.0; 3];
        random::unit_vector(&mut rng, &mut dir);
        let mut w: Vec<f64> = u.node(z).iter().zip(&dir).map(|(a, b)| a + scale * b).collect();
        let r = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let clamped = r.clamp(0.5, 2.0);
        w.iter_mut().for_each(|x| *x *= clamped / r);
        v.node_mut(z).copy_from_slice(&w);
    }
    let nu = normalize_nodal(&u, 0.5).expect("moduli are at least 1/2");
    let nv = normalize_nodal(&v, 0.5 - 1e-12).expect("moduli are at least 1/2");
    let worst = (0..1000)
        .map(|z| dist(nu.node(z), nv.node(z)) - 4.0 * dist(u.node(z), v.node(z)))
        .fold(f64::NEG_INFINITY, f64::max);
    SuiteReport {
        name: "normalization lipschitz",
        worst: worst.max(0.0),
        tolerance: 0.0,
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}
