use std::process::ExitCode;

use sphereflow::config::{parse_args, wants_help};
use sphereflow::{csv, execute, study, Command};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    if let Some(help) = wants_help(&argv) {
        print!("{help}");
        return ExitCode::SUCCESS;
    }
    let config = match parse_args(&argv) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("sphereflow: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match execute(&config, study::threads_from_env()) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("sphereflow: {e:#}");
            return ExitCode::FAILURE;
        }
    };
    let target = match config.command {
        Command::Check => None,
        _ => config.output.as_deref(),
    };
    if let Err(e) = csv::emit(&outcome.text, target) {
        eprintln!("sphereflow: cannot write output: {e}");
        return ExitCode::FAILURE;
    }
    if outcome.success {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
