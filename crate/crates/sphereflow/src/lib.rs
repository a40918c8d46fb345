//! Command-line driver for `sphereflow-core`: configuration, CSV output and
//! the `run`, `converge`, `defect` and `check` commands.

pub mod config;
pub mod csv;
pub mod study;

use anyhow::Context;
use sphereflow_core::flow::run;
use sphereflow_core::verify::{checks, defect_norm, exact_solution_for, initial_field};
use sphereflow_core::{Mesh, P1Space};

pub use config::{parse_args, CliConfig, Command, ConfigError};

/// Text produced by a command and whether it counts as success.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub success: bool,
}

/// Runs the command described by `config` and returns its output without
/// writing it anywhere.
pub fn execute(config: &CliConfig, threads: usize) -> anyhow::Result<Outcome> {
    let flow = config.flow_config();
    let text = match config.command {
        Command::Run => {
            let mesh = Mesh::unit_cube(flow.dim, flow.subdivisions)?;
            let space = P1Space::new(&mesh)?;
            let u0 = initial_field(&flow, &mesh)?;
            let result = run(&space, &flow, u0).context("flow run failed")?;
            if let Some(last) = result.records.last() {
                log::info!(
                    "{} steps, final energy {:.6e}, max violation {:.3e}",
                    last.n,
                    last.energy,
                    last.max_violation
                );
            }
            csv::run_csv(&result.records)
        }
        Command::Converge => {
            let table = study::run_study(
                &flow,
                config.levels,
                config.tau_rule,
                config.all_steps,
                threads,
                config.timing,
            )
            .context("convergence study failed")?;
            csv::converge_csv(&table, config.all_steps)
        }
        Command::Defect => {
            let exact = exact_solution_for(&flow)?;
            let mesh = Mesh::unit_cube(flow.dim, flow.subdivisions)?;
            let space = P1Space::new(&mesh)?;
            let n = flow.num_steps();
            let value = defect_norm(
                &space,
                exact.as_ref(),
                flow.tau,
                n,
                flow.quadrature_order,
                flow.solver_tol,
            )
            .context("defect computation failed")?;
            csv::defect_csv(flow.subdivisions, mesh.h(), flow.tau, n, value)
        }
        Command::Check => {
            let reports = checks::run_all(config.seed).context("property suites failed to run")?;
            let mut text = String::new();
            let mut success = true;
            for r in &reports {
                success &= r.passed();
                text.push_str(&format!(
                    "{} {} (worst {:.3e}, tolerance {:.1e})\n",
                    if r.passed() { "PASS" } else { "FAIL" },
                    r.name,
                    r.worst,
                    r.tolerance
                ));
            }
            return Ok(Outcome { text, success });
        }
    };
    Ok(Outcome { text, success: true })
}
