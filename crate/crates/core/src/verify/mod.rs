//! Verification harness: closed-form solutions, the consistency defect, a
//! dense saddle-point oracle for single steps, the convergence-order study
//! and seeded property suites.

pub mod checks;
mod defect;
mod exact;
mod oracle;
pub mod random;
mod study;

pub use defect::defect_norm;
pub use exact::{exact_phase_solution, ConstantSolution, PhaseSolution};
pub use oracle::{saddle_point_step_oracle, OracleStep, ORACLE_MAX_UNKNOWNS};
pub use study::{
    convergence_study, eoc, study_level, EocRow, EocTable, LevelErrors, TauRule, EOC_NOISE_FLOOR,
};

use alloc::boxed::Box;

use crate::error::{Error, Result};
use crate::fem::{ExactSolution, Field};
use crate::flow::{FlowConfig, InitialData};
use crate::mesh::Mesh;

/// The closed-form solution matching `config.initial`, if there is one.
pub fn exact_solution_for(config: &FlowConfig) -> Result<Box<dyn ExactSolution>> {
    match config.initial {
        InitialData::Phase => Ok(Box::new(exact_phase_solution(config.target_dim, config.dim)?)),
        InitialData::Constant => Ok(Box::new(ConstantSolution::unit(config.target_dim, config.dim))),
        InitialData::Random { .. } => Err(Error::invalid(
            "random initial data has no closed-form solution",
        )),
    }
}

/// `u_h^0` for `config.initial` on `mesh`: the nodal interpolant of the
/// initial map, or seeded random unit vectors.
pub fn initial_field(config: &FlowConfig, mesh: &Mesh) -> Result<Field> {
    match config.initial {
        InitialData::Random { seed } => {
            let mut rng = random::rng(seed);
            Ok(random::unit_field(mesh.num_vertices(), config.target_dim, &mut rng))
        }
        _ => {
            let exact = exact_solution_for(config)?;
            crate::fem::interpolate_nodal(exact.as_ref(), mesh, 0.0)
        }
    }
}
