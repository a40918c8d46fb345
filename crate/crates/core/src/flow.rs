//! The linearly implicit tangent-plane time stepping scheme.
//!
//! Each step normalizes the previous iterate at the nodes, then finds
//! `d_t u` in the discrete tangent space with
//! `((M + tau A) ⊗ I) d_t u = -(A ⊗ I) u^{n-1}` tested against that space.
//! Writing `d_t u = F alpha` in per-node tangent frames turns this into the
//! SPD system `F^T ((M + tau A) ⊗ I) F alpha = -F^T (A ⊗ I) u^{n-1}`, which
//! is solved matrix-free by conjugate gradients.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fem::{Field, P1Space};
use crate::linalg::{cg_solve, CgOptions, FnOperator, SparseMatrix};
use crate::tangent::{normalize_nodal, tangent_frame, TangentFrame, DEFAULT_FLOOR};

/// Iterate `u_h^n` at time `t = n tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub u: Field,
    pub n: usize,
    pub tau: f64,
    pub t: f64,
}

impl FlowState {
    pub fn initial(u: Field, tau: f64) -> Self {
        FlowState {
            u,
            n: 0,
            tau,
            t: 0.0,
        }
    }
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub n: usize,
    pub t: f64,
    /// Dirichlet energy of `u_h^n`.
    pub energy: f64,
    /// `tau ||d_t u_h^n||^2` with the consistent mass matrix; zero at step 0.
    pub dissipation: f64,
    /// `max_z ||u(z)|^2 - 1|`
    pub max_violation: f64,
    /// `sum_z beta_z ||u(z)|^2 - 1|`
    pub l1_violation: f64,
    pub cg_iterations: usize,
}

/// Initial data selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialData {
    /// Interpolant of the rotating phase solution at `t = 0`.
    Phase,
    /// The constant map `e_1`.
    Constant,
    /// Independent pseudo-random unit vectors at each node.
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub dim: usize,
    pub subdivisions: usize,
    pub target_dim: usize,
    pub tau: f64,
    pub final_time: f64,
    pub initial: InitialData,
    pub solver_tol: f64,
    pub quadrature_order: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            dim: 1,
            subdivisions: 16,
            target_dim: 2,
            tau: 1.0 / 64.0,
            final_time: 0.25,
            initial: InitialData::Phase,
            solver_tol: 1e-12,
            quadrature_order: 2,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::invalid("d must be 1, 2 or 3"));
        }
        if self.subdivisions == 0 {
            return Err(Error::invalid("n must be at least 1"));
        }
        if self.target_dim < 2 {
            return Err(Error::invalid("m must be at least 2"));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::invalid("tau must be positive"));
        }
        if !(self.final_time >= self.tau && self.final_time.is_finite()) {
            return Err(Error::invalid("T must be at least tau"));
        }
        if !(self.solver_tol > 0.0 && self.solver_tol < 1.0) {
            return Err(Error::invalid("solver tolerance must lie in (0, 1)"));
        }
        if !(2..=4).contains(&self.quadrature_order) {
            return Err(Error::invalid("quadrature order must be 2, 3 or 4"));
        }
        Ok(())
    }

    /// `N = floor(T / tau + 1e-12)`, the number of steps with `t_N <= T`.
    pub fn num_steps(&self) -> usize {
        num_steps(self.final_time, self.tau)
    }
}

pub fn num_steps(final_time: f64, tau: f64) -> usize {
    let n = (final_time / tau + 1e-12).floor();
    if n > 0.0 {
        n as usize
    } else {
        0
    }
}

/// Everything produced by one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: FlowState,
    /// `d_t u_h^n`
    pub rate: Field,
    /// `u_h^{n-1} / |u_h^{n-1}|` at the nodes.
    pub direction: Field,
    pub record: StepRecord,
}

/// Reusable step operator for a fixed space and step size.
pub struct Stepper<'s, 'm> {
    space: &'s P1Space<'m>,
    tau: f64,
    system: SparseMatrix,
    opts: CgOptions,
    floor: f64,
}

impl<'s, 'm> Stepper<'s, 'm> {
    pub fn new(space: &'s P1Space<'m>, tau: f64, solver_tol: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::invalid("tau must be positive"));
        }
        let system = space.mass().linear_combination(1.0, space.stiffness(), tau)?;
        Ok(Stepper {
            space,
            tau,
            system,
            opts: CgOptions::with_tol(solver_tol),
            floor: DEFAULT_FLOOR,
        })
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn space(&self) -> &'s P1Space<'m> {
        self.space
    }

    /// Advances `state` by one step.
    pub fn step(&self, state: &FlowState) -> Result<StepOutcome> {
        let direction = normalize_nodal(&state.u, self.floor).map_err(|e| self.wrap(state, e))?;
        let frame = tangent_frame(&direction).map_err(|e| self.wrap(state, e))?;
        self.step_in_frame(state, direction, &frame)
    }

    /// Advances `state` using a caller-supplied frame for the tangent space of
    /// `direction`. The result depends only on the spanned subspace.
    pub fn step_in_frame(
        &self,
        state: &FlowState,
        direction: Field,
        frame: &TangentFrame,
    ) -> Result<StepOutcome> {
        let m = state.u.m();
        let full = state.u.values().len();
        let rhs_full = self.space.apply_stiffness(&state.u)?.scaled(-1.0);
        let rhs = frame.reduce(rhs_full.values());

        let op = FnOperator::new(frame.reduced_dim(), |alpha: &[f64], out: &mut [f64]| {
            let mut v = vec![0.0; full];
            let mut sv = vec![0.0; full];
            frame.expand_into(alpha, &mut v);
            self.system.spmv_blocked(&v, m, &mut sv);
            frame.reduce_into(&sv, out);
        });
        let sol = cg_solve(&op, &rhs, self.opts).map_err(|e| self.wrap(state, e))?;

        let rate = frame.expand(&sol.x);
        let u = state.u.add_scaled(self.tau, &rate)?;
        let next = FlowState {
            u,
            n: state.n + 1,
            tau: self.tau,
            t: (state.n + 1) as f64 * self.tau,
        };
        let dissipation = self.tau * self.space.l2_norm_sq(&rate)?;
        let record = self.record(&next, dissipation, sol.iterations)?;
        Ok(StepOutcome {
            state: next,
            rate,
            direction,
            record,
        })
    }

    /// Diagnostics of `state` with the given dissipation and iteration count.
    pub fn record(&self, state: &FlowState, dissipation: f64, cg_iterations: usize) -> Result<StepRecord> {
        let (max_violation, l1_violation) =
            constraint_violation(&state.u, self.space.lumped_weights())?;
        Ok(StepRecord {
            n: state.n,
            t: state.t,
            energy: self.space.energy(&state.u)?,
            dissipation,
            max_violation,
            l1_violation,
            cg_iterations,
        })
    }

    fn wrap(&self, state: &FlowState, source: Error) -> Error {
        Error::Step {
            step: state.n + 1,
            time: (state.n + 1) as f64 * self.tau,
            min_modulus: state.u.moduli().fold(f64::INFINITY, f64::min),
            source: Box::new(source),
        }
    }
}

/// One step of the scheme from `state`.
pub fn step(space: &P1Space<'_>, state: &FlowState, solver_tol: f64) -> Result<StepOutcome> {
    Stepper::new(space, state.tau, solver_tol)?.step(state)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowRun {
    /// Step 0 followed by one record per step.
    pub records: Vec<StepRecord>,
    pub final_state: FlowState,
}

/// Runs `N = floor(T / tau)` steps from `u0`.
pub fn run(space: &P1Space<'_>, config: &FlowConfig, u0: Field) -> Result<FlowRun> {
    run_with(space, config, u0, |_| {})
}

/// Like [`run`], calling `observer` after every step.
pub fn run_with(
    space: &P1Space<'_>,
    config: &FlowConfig,
    u0: Field,
    mut observer: impl FnMut(&StepOutcome),
) -> Result<FlowRun> {
    if config.target_dim < 2 || u0.m() != config.target_dim {
        return Err(Error::invalid("initial field must have m >= 2 components matching the config"));
    }
    let stepper = Stepper::new(space, config.tau, config.solver_tol)?;
    let h = space.mesh().h();
    if config.tau > h.sqrt() {
        log::warn!(
            "tau = {} exceeds h^(1/2) = {}; outside the step-size regime of the error estimate",
            config.tau,
            h.sqrt()
        );
    }

    let mut state = FlowState::initial(u0, config.tau);
    let mut records = Vec::with_capacity(config.num_steps() + 1);
    records.push(stepper.record(&state, 0.0, 0)?);
    for _ in 0..config.num_steps() {
        let outcome = stepper.step(&state)?;
        observer(&outcome);
        records.push(outcome.record);
        state = outcome.state;
    }
    Ok(FlowRun {
        records,
        final_state: state,
    })
}

/// Nodal normalization of a final iterate, for error measurement.
pub fn postprocess_normalize(u: &Field) -> Result<Field> {
    normalize_nodal(u, DEFAULT_FLOOR)
}

/// `(max_z ||u(z)|^2 - 1|, sum_z beta_z ||u(z)|^2 - 1|)`
pub fn constraint_violation(u: &Field, weights: &[f64]) -> Result<(f64, f64)> {
    Error::check_len(weights.len(), u.num_nodes())?;
    let mut max = 0.0f64;
    let mut l1 = 0.0;
    for (node, beta) in u.nodes().zip(weights) {
        let defect = (node.iter().map(|x| x * x).sum::<f64>() - 1.0).abs();
        max = max.max(defect);
        l1 += beta * defect;
    }
    Ok((max, l1))
}
