//! CSV output for step records, EOC tables and defect values.
//!
//! Reals are printed in scientific notation with 17 significant digits and
//! undefined values as `nan`. Files are written to a temporary sibling and
//! renamed into place, so a failed command never leaves a partial file.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use sphereflow_core::verify::EocTable;
use sphereflow_core::StepRecord;

pub const RUN_HEADER: &str = "n,t,energy,dissipation,max_violation,l1_violation,cg_iterations";
pub const CONVERGE_HEADER: &str =
    "n_mesh,h,tau,l2_error,h1_error,h1_error_normalized,eoc_l2,eoc_h1,runtime_seconds";
pub const DEFECT_HEADER: &str = "n_mesh,h,tau,n,t,defect_norm";

pub fn real(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn optional(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), real)
}

pub fn run_csv(records: &[StepRecord]) -> String {
    let mut out = String::new();
    out.push_str(RUN_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.n,
            real(r.t),
            real(r.energy),
            real(r.dissipation),
            real(r.max_violation),
            real(r.l1_violation),
            r.cg_iterations
        );
    }
    out
}

/// With `running_max` the `h1_error` column holds `max_n` of the H¹ error
/// over all steps, where the rows carry it.
pub fn converge_csv(table: &EocTable, running_max: bool) -> String {
    let h1 = |row: &sphereflow_core::verify::EocRow| {
        if running_max {
            row.h1_error_max.unwrap_or(row.h1_error)
        } else {
            row.h1_error
        }
    };
    let eoc_h1: Vec<Option<f64>> = if running_max {
        std::iter::once(None).chain(table.orders(h1)).collect()
    } else {
        table.rows.iter().map(|r| r.eoc_h1).collect()
    };

    let mut out = String::new();
    out.push_str(CONVERGE_HEADER);
    out.push('\n');
    for (row, eoc_h1) in table.rows.iter().zip(eoc_h1) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.n_mesh,
            real(row.h),
            real(row.tau),
            real(row.l2_error),
            real(h1(row)),
            real(row.h1_error_normalized),
            optional(row.eoc_l2),
            optional(eoc_h1),
            real(row.runtime_seconds)
        );
    }
    out
}

pub fn defect_csv(n_mesh: usize, h: f64, tau: f64, n: usize, defect: f64) -> String {
    format!(
        "{DEFECT_HEADER}\n{},{},{},{},{},{}\n",
        n_mesh,
        real(h),
        real(tau),
        n,
        real(n as f64 * tau),
        real(defect)
    )
}

/// Writes `contents` to `path` via a temporary file and a rename, or to
/// standard output when `path` is `None`.
pub fn emit(contents: &str, path: Option<&Path>) -> io::Result<()> {
    let Some(path) = path else {
        let mut stdout = io::stdout().lock();
        stdout.write_all(contents.as_bytes())?;
        return stdout.flush();
    };
    let file_name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = std::fs::write(&tmp, contents).and_then(|()| std::fs::rename(&tmp, path));
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}
