use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;

use super::{exact_solution_for, initial_field};
use crate::error::{Error, Result};
use crate::fem::P1Space;
use crate::flow::{postprocess_normalize, run_with, FlowConfig};
use crate::mesh::Mesh;

/// Errors below this are treated as exact when computing convergence orders.
pub const EOC_NOISE_FLOOR: f64 = 1e-12;

/// Experimental order of convergence `log2(e_coarse / e_fine)`.
///
/// `None` when an error is not positive or both are below [`EOC_NOISE_FLOOR`].
pub fn eoc(e_coarse: f64, e_fine: f64) -> Option<f64> {
    if !(e_coarse > 0.0 && e_fine > 0.0) {
        return None;
    }
    if e_coarse < EOC_NOISE_FLOOR && e_fine < EOC_NOISE_FLOOR {
        return None;
    }
    Some((e_coarse / e_fine).log2())
}

/// How the step size follows the mesh size across refinement levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauRule {
    /// `tau = h / 4`
    QuarterH,
    /// `tau = h^(1/2) / 8`
    SqrtHOverEight,
    /// The base configuration's `tau` on every level.
    Fixed,
}

impl TauRule {
    pub fn tau(self, h: f64, base_tau: f64) -> f64 {
        match self {
            TauRule::QuarterH => h / 4.0,
            TauRule::SqrtHOverEight => h.sqrt() / 8.0,
            TauRule::Fixed => base_tau,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TauRule::QuarterH => "tau=h/4",
            TauRule::SqrtHOverEight => "tau=sqrt_h/8",
            TauRule::Fixed => "fixed",
        }
    }
}

impl fmt::Display for TauRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TauRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tau=h/4" => Ok(TauRule::QuarterH),
            "tau=sqrt_h/8" => Ok(TauRule::SqrtHOverEight),
            "fixed" => Ok(TauRule::Fixed),
            _ => Err(Error::invalid("tau rule must be one of tau=h/4, tau=sqrt_h/8, fixed")),
        }
    }
}

/// Final-time errors of one refinement level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelErrors {
    pub n_mesh: usize,
    pub h: f64,
    pub tau: f64,
    /// Time of the last step, `N tau`.
    pub final_time: f64,
    pub l2_error: f64,
    pub h1_error: f64,
    /// H¹ error of the nodally normalized final iterate.
    pub h1_error_normalized: f64,
    /// `max_n ||u_h^n - u(t_n)||_{H^1}`, when every step was measured.
    pub h1_error_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EocRow {
    pub n_mesh: usize,
    pub h: f64,
    pub tau: f64,
    pub l2_error: f64,
    pub h1_error: f64,
    pub h1_error_normalized: f64,
    pub h1_error_max: Option<f64>,
    pub eoc_l2: Option<f64>,
    pub eoc_h1: Option<f64>,
    pub runtime_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EocTable {
    pub rows: Vec<EocRow>,
}

impl EocTable {
    /// Builds rows from levels ordered coarse to fine and fills the EOC columns.
    pub fn from_levels(levels: &[(LevelErrors, f64)]) -> Self {
        let mut rows: Vec<EocRow> = levels
            .iter()
            .map(|&(e, runtime_seconds)| EocRow {
                n_mesh: e.n_mesh,
                h: e.h,
                tau: e.tau,
                l2_error: e.l2_error,
                h1_error: e.h1_error,
                h1_error_normalized: e.h1_error_normalized,
                h1_error_max: e.h1_error_max,
                eoc_l2: None,
                eoc_h1: None,
                runtime_seconds,
            })
            .collect();
        for i in 1..rows.len() {
            rows[i].eoc_l2 = eoc(rows[i - 1].l2_error, rows[i].l2_error);
            rows[i].eoc_h1 = eoc(rows[i - 1].h1_error, rows[i].h1_error);
        }
        EocTable { rows }
    }

    /// Orders of an arbitrary column between consecutive rows.
    pub fn orders(&self, column: impl Fn(&EocRow) -> f64) -> Vec<Option<f64>> {
        self.rows
            .windows(2)
            .map(|w| eoc(column(&w[0]), column(&w[1])))
            .collect()
    }
}

/// Runs the flow on `n_mesh` subdivisions with the step size given by `rule`
/// and measures errors against the closed-form solution for `base.initial`.
pub fn study_level(
    base: &FlowConfig,
    n_mesh: usize,
    rule: TauRule,
    all_steps: bool,
) -> Result<LevelErrors> {
    let mesh = Mesh::unit_cube(base.dim, n_mesh)?;
    let space = P1Space::new(&mesh)?;
    let tau = rule.tau(mesh.h(), base.tau);
    let config = FlowConfig {
        subdivisions: n_mesh,
        tau,
        ..base.clone()
    };
    let exact = exact_solution_for(&config)?;
    let u0 = initial_field(&config, &mesh)?;
    let order = config.quadrature_order;

    let mut running_max = if all_steps {
        Some(space.error_norms(&u0, exact.as_ref(), 0.0, order)?.h1)
    } else {
        None
    };
    let mut failure = None;
    let run = run_with(&space, &config, u0, |outcome| {
        if let Some(max) = running_max.as_mut() {
            match space.error_norms(&outcome.state.u, exact.as_ref(), outcome.state.t, order) {
                Ok(e) => *max = max.max(e.h1),
                Err(e) => failure = Some(e),
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }

    let final_state = run.final_state;
    let t = final_state.t;
    let raw = space.error_norms(&final_state.u, exact.as_ref(), t, order)?;
    let normalized = postprocess_normalize(&final_state.u)?;
    let normalized = space.error_norms(&normalized, exact.as_ref(), t, order)?;
    Ok(LevelErrors {
        n_mesh,
        h: mesh.h(),
        tau,
        final_time: t,
        l2_error: raw.l2,
        h1_error: raw.h1,
        h1_error_normalized: normalized.h1,
        h1_error_max: running_max,
    })
}

/// Runs `levels` refinement levels starting at `base.subdivisions`, doubling
/// each time. `clock` returns a monotonic time in seconds and is used only for
/// the runtime column.
pub fn convergence_study(
    base: &FlowConfig,
    levels: usize,
    rule: TauRule,
    all_steps: bool,
    clock: &mut dyn FnMut() -> f64,
) -> Result<EocTable> {
    if levels < 2 {
        return Err(Error::invalid("a convergence study needs at least 2 levels"));
    }
    let mut results = Vec::with_capacity(levels);
    for level in 0..levels {
        let n_mesh = base.subdivisions << level;
        let start = clock();
        let errors = study_level(base, n_mesh, rule, all_steps)?;
        results.push((errors, clock() - start));
    }
    Ok(EocTable::from_levels(&results))
}
