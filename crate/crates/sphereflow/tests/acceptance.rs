//! Acceptance criteria. Each test writes one `PASS`/`FAIL` line straight to
//! stderr, so the summary shows up even when output capture is on.

use std::io::Write;
use std::sync::OnceLock;
use std::time::Instant;

use sphereflow::study::run_study;
use sphereflow_core::fem::NodalLift;
use sphereflow_core::flow::run_with;
use sphereflow_core::linalg::dot;
use sphereflow_core::verify::{
    checks, defect_norm, exact_phase_solution, initial_field, random, EocTable, TauRule,
};
use sphereflow_core::{FlowConfig, InitialData, Mesh, P1Space};

fn report(id: u32, title: &str, passed: bool, detail: &str) {
    let line = format!(
        "criterion {id:>2} {} {title}: {detail}\n",
        if passed { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
    assert!(passed, "criterion {id} ({title}) failed: {detail}");
}

fn in_band(x: Option<f64>, lo: f64, hi: f64) -> bool {
    x.is_some_and(|v| (lo..=hi).contains(&v))
}

fn show(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".to_string(), |v| format!("{v:.4}"))
}

fn one_d_config() -> FlowConfig {
    FlowConfig {
        dim: 1,
        subdivisions: 8,
        target_dim: 2,
        final_time: 0.25,
        initial: InitialData::Phase,
        ..Default::default()
    }
}

fn two_d_config() -> FlowConfig {
    FlowConfig {
        dim: 2,
        subdivisions: 4,
        target_dim: 3,
        final_time: 0.1,
        initial: InitialData::Phase,
        ..Default::default()
    }
}

fn rough_config() -> FlowConfig {
    FlowConfig {
        dim: 2,
        subdivisions: 16,
        target_dim: 3,
        tau: 1.0 / 64.0,
        final_time: 0.5,
        initial: InitialData::Random { seed: 2024 },
        ..Default::default()
    }
}

#[test]
fn criterion_01_convergence_rate_1d() {
    let start = Instant::now();
    let table = run_study(&one_d_config(), 5, TauRule::QuarterH, true, 1, true).unwrap();
    let seconds = start.elapsed().as_secs_f64();

    let last = |orders: Vec<Option<f64>>| orders.last().copied().flatten();
    let raw = last(table.orders(|r| r.h1_error));
    let max = last(table.orders(|r| r.h1_error_max.expect("all steps measured")));
    let normalized = last(table.orders(|r| r.h1_error_normalized));
    let passed = in_band(raw, 0.85, 1.3)
        && in_band(max, 0.85, 1.3)
        && in_band(normalized, 0.85, 1.3)
        && seconds < 60.0;
    report(
        1,
        "H1 convergence rate, d=1",
        passed,
        &format!(
            "EOC raw {}, running max {}, normalized {} in [0.85, 1.3]; {seconds:.1} s < 60 s",
            show(raw),
            show(max),
            show(normalized)
        ),
    );
}

#[test]
fn criterion_02_convergence_rate_2d() {
    let start = Instant::now();
    let table: EocTable = run_study(&two_d_config(), 4, TauRule::QuarterH, false, 1, true).unwrap();
    let seconds = start.elapsed().as_secs_f64();
    let eoc = table.rows.last().and_then(|r| r.eoc_h1);
    let passed = in_band(eoc, 0.8, 1.4) && seconds < 300.0;
    report(
        2,
        "H1 convergence rate, d=2",
        passed,
        &format!("EOC {} in [0.8, 1.4]; {seconds:.1} s < 300 s", show(eoc)),
    );
}

/// Worst energy-law excess and worst constraint-identity gap over one run.
struct RunAudit {
    label: String,
    energy_excess: f64,
    identity_gap: f64,
}

fn audit(config: &FlowConfig, label: String) -> RunAudit {
    let mesh = Mesh::unit_cube(config.dim, config.subdivisions).unwrap();
    let space = P1Space::new(&mesh).unwrap();
    let u0 = initial_field(config, &mesh).unwrap();
    let e0 = space.energy(&u0).unwrap();
    let tau = config.tau;
    let mut dissipated = 0.0;
    let mut energy_excess = f64::NEG_INFINITY;
    let mut accumulated = vec![0.0; mesh.num_vertices()];
    let mut identity_gap = 0.0f64;
    run_with(&space, config, u0, |out| {
        dissipated += out.record.dissipation;
        let bound = e0 * (1.0 + 1e-8) + 1e-10;
        energy_excess = energy_excess.max(out.record.energy + dissipated - bound);
        for (z, acc) in accumulated.iter_mut().enumerate() {
            *acc += tau * tau * dot(out.rate.node(z), out.rate.node(z));
            let modulus_sq = dot(out.state.u.node(z), out.state.u.node(z));
            identity_gap = identity_gap.max((modulus_sq - 1.0 - *acc).abs());
        }
    })
    .unwrap();
    RunAudit { label, energy_excess, identity_gap }
}

fn audits() -> &'static [RunAudit] {
    static AUDITS: OnceLock<Vec<RunAudit>> = OnceLock::new();
    AUDITS.get_or_init(|| {
        let mut out = Vec::new();
        for (base, levels) in [(one_d_config(), 5), (two_d_config(), 4)] {
            for l in 0..levels {
                let n = base.subdivisions << l;
                let h = Mesh::unit_cube(base.dim, n).unwrap().h();
                let config = FlowConfig { subdivisions: n, tau: h / 4.0, ..base.clone() };
                out.push(audit(&config, format!("d={} n={n}", base.dim)));
            }
        }
        out.push(audit(&rough_config(), "rough random d=2 n=16".to_string()));
        out
    })
}

#[test]
fn criterion_03_energy_law() {
    let runs = audits();
    let worst = runs
        .iter()
        .max_by(|a, b| a.energy_excess.total_cmp(&b.energy_excess))
        .unwrap();
    report(
        3,
        "discrete energy law",
        worst.energy_excess <= 0.0,
        &format!(
            "{} runs, largest E^n + dissipation - E^0(1+1e-8) - 1e-10 = {:.3e} ({})",
            runs.len(),
            worst.energy_excess,
            worst.label
        ),
    );
}

#[test]
fn criterion_04_constraint_identity() {
    let runs = audits();
    let worst = runs
        .iter()
        .max_by(|a, b| a.identity_gap.total_cmp(&b.identity_gap))
        .unwrap();
    report(
        4,
        "nodal constraint identity",
        worst.identity_gap <= 1e-9,
        &format!("{} runs, worst gap {:.3e} <= 1e-9 ({})", runs.len(), worst.identity_gap, worst.label),
    );
}

#[test]
fn criterion_05_violation_scaling() {
    let mesh = Mesh::unit_cube(1, 64).unwrap();
    let space = P1Space::new(&mesh).unwrap();
    let final_l1 = |tau: f64| {
        let config = FlowConfig { subdivisions: 64, tau, ..Default::default() };
        let u0 = initial_field(&config, &mesh).unwrap();
        let result = run_with(&space, &config, u0, |_| {}).unwrap();
        result.records.last().unwrap().l1_violation
    };
    let (coarse, fine) = (final_l1(1.0 / 64.0), final_l1(1.0 / 128.0));
    let ratio = coarse / fine;
    report(
        5,
        "O(tau) constraint violation",
        (1.7..=2.3).contains(&ratio),
        &format!("l1 violation {coarse:.4e} -> {fine:.4e}, ratio {ratio:.4} in [1.7, 2.3]"),
    );
}

#[test]
fn criterion_06_projection_algebra() {
    let r = checks::projection_algebra(6).unwrap();
    report(
        6,
        "discrete projection algebra",
        r.passed(),
        &format!("worst deviation {:.3e} <= {:.0e}", r.worst, r.tolerance),
    );
}

#[test]
fn criterion_07_ritz_projection() {
    let mut rng = random::rng(7);
    let mut reproduction = 0.0f64;
    let mut mean_gap = 0.0f64;
    for (d, n) in [(1, 16), (2, 8), (3, 4)] {
        let mesh = Mesh::unit_cube(d, n).unwrap();
        let space = P1Space::new(&mesh).unwrap();
        for m in [2, 3] {
            let v = random::field(mesh.num_vertices(), m, &mut rng);
            let lift = NodalLift::new(&mesh, &v);
            let r = space.ritz_project(&lift, 0.0, 2, 1e-12).unwrap();
            reproduction = reproduction.max(r.max_abs_diff(&v));
            for c in 0..m {
                let beta = space.lumped_weights();
                mean_gap = mean_gap.max((dot(beta, &r.component(c)) - dot(beta, &v.component(c))).abs());
            }
        }
    }

    let phase = exact_phase_solution(2, 1).unwrap();
    let h1 = |n: usize| {
        let mesh = Mesh::unit_cube(1, n).unwrap();
        let space = P1Space::new(&mesh).unwrap();
        let r = space.ritz_project(&phase, 0.0, 2, 1e-12).unwrap();
        space.error_norms(&r, &phase, 0.0, 2).unwrap().h1
    };
    let ratio = h1(16) / h1(32);
    let passed = reproduction <= 1e-10 && mean_gap <= 1e-11 && (1.8..=2.2).contains(&ratio);
    report(
        7,
        "Ritz projection",
        passed,
        &format!(
            "reproduction {reproduction:.3e} <= 1e-10, mean {mean_gap:.3e} <= 1e-11, H1 ratio {ratio:.4} in [1.8, 2.2]"
        ),
    );
}

#[test]
fn criterion_08_consistency_defect() {
    let phase = exact_phase_solution(2, 1).unwrap();
    let defects: Vec<f64> = [16usize, 32, 64]
        .iter()
        .map(|&n| {
            let mesh = Mesh::unit_cube(1, n).unwrap();
            let space = P1Space::new(&mesh).unwrap();
            let tau = 1.0 / n as f64;
            defect_norm(&space, &phase, tau, n / 4, 2, 1e-12).unwrap()
        })
        .collect();
    let ratios: Vec<f64> = defects.windows(2).map(|w| w[0] / w[1]).collect();
    let passed = ratios.iter().all(|r| (1.6..=2.4).contains(r));
    report(
        8,
        "consistency defect",
        passed,
        &format!(
            "(h, tau) = 1/16, 1/32, 1/64 at t = 0.25: ratios {:.4}, {:.4} in [1.6, 2.4]",
            ratios[0], ratios[1]
        ),
    );
}

#[test]
fn criterion_09_oracle_equivalence() {
    let r = checks::oracle_equivalence(9).unwrap();
    report(
        9,
        "saddle-point oracle equivalence",
        r.passed(),
        &format!("max-norm gap {:.3e} <= {:.0e}", r.worst, r.tolerance),
    );
}

#[test]
fn criterion_10_normalization_lipschitz() {
    let r = checks::normalization_lipschitz(10);
    report(
        10,
        "normalization Lipschitz bound",
        r.passed(),
        &format!("largest excess over 4|u - v| is {:.3e}", r.worst),
    );
}
