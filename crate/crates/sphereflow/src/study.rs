//! Refinement studies with wall-clock timing and optional parallel levels.

use std::time::Instant;

use sphereflow_core::verify::{study_level, EocTable, LevelErrors, TauRule};
use sphereflow_core::{FlowConfig, Result};

/// Worker count from `SPHEREFLOW_THREADS`, defaulting to 1.
pub fn threads_from_env() -> usize {
    std::env::var("SPHEREFLOW_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(1)
}

/// Runs `levels` levels starting at `base.subdivisions`, doubling each time,
/// on up to `threads` worker threads. Rows are always ordered coarse to fine
/// and do not depend on the thread count, apart from the runtime column,
/// which is `nan` when `timing` is off.
pub fn run_study(
    base: &FlowConfig,
    levels: usize,
    rule: TauRule,
    all_steps: bool,
    threads: usize,
    timing: bool,
) -> Result<EocTable> {
    if levels < 2 {
        return Err(sphereflow_core::Error::InvalidArgument("a convergence study needs at least 2 levels".into()));
    }
    let meshes: Vec<usize> = (0..levels).map(|l| base.subdivisions << l).collect();
    let timed = &|n_mesh: usize| -> Result<(LevelErrors, f64)> {
        let start = Instant::now();
        let errors = study_level(base, n_mesh, rule, all_steps)?;
        let seconds = if timing { start.elapsed().as_secs_f64() } else { f64::NAN };
        log::info!("level n_mesh={n_mesh}: h1 error {:.3e} in {seconds:.2} s", errors.h1_error);
        Ok((errors, seconds))
    };

    let results: Vec<Result<(LevelErrors, f64)>> = if threads <= 1 {
        meshes.iter().map(|&n| timed(n)).collect()
    } else {
        let mut slots: Vec<Option<Result<(LevelErrors, f64)>>> = (0..levels).map(|_| None).collect();
        // finest levels first so the longest jobs start early
        let mut order: Vec<usize> = (0..levels).rev().collect();
        std::thread::scope(|scope| {
            while !order.is_empty() {
                let batch: Vec<usize> = order.drain(..threads.min(order.len())).collect();
                let handles: Vec<_> = batch
                    .iter()
                    .map(|&l| {
                        let n_mesh = meshes[l];
                        (l, scope.spawn(move || timed(n_mesh)))
                    })
                    .collect();
                for (l, handle) in handles {
                    slots[l] = Some(handle.join().expect("study worker panicked"));
                }
            }
        });
        slots.into_iter().map(|s| s.expect("every level ran")).collect()
    };
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(EocTable::from_levels(&results))
}
