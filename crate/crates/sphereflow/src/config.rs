//! Command-line and config-file parsing.
//!
//! Values come from three layers: explicit flags, then a flat `key = value`
//! file given with `--config`, then built-in defaults.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use sphereflow_core::verify::TauRule;
use sphereflow_core::{FlowConfig, InitialData};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid value '{value}' for {key}")]
    Malformed { key: String, value: String },
    #[error("unknown config key '{key}' on line {line}")]
    UnknownKey { key: String, line: usize },
    #[error("config line {line} is not of the form key = value: '{text}'")]
    Syntax { line: usize, text: String },
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Converge,
    Defect,
    Check,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::Converge => "converge",
            Command::Defect => "defect",
            Command::Check => "check",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Closed-form or seeded initial data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solution {
    Phase,
    Constant,
    Random,
}

impl FromStr for Solution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "phase" => Ok(Solution::Phase),
            "constant" => Ok(Solution::Constant),
            "random" => Ok(Solution::Random),
            _ => Err(format!("unknown solution '{s}' (expected phase, constant or random)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub command: Command,
    pub d: usize,
    pub n_mesh: usize,
    pub m: usize,
    pub tau: f64,
    pub final_time: f64,
    pub solution: Solution,
    pub tau_rule: TauRule,
    pub levels: usize,
    pub quadrature_order: usize,
    pub solver_tol: f64,
    /// `None` writes to standard output.
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub all_steps: bool,
    /// Write measured wall-clock times into the runtime column.
    pub timing: bool,
}

impl CliConfig {
    pub fn defaults(command: Command) -> Self {
        CliConfig {
            command,
            d: 1,
            n_mesh: 16,
            m: 2,
            tau: 1.0 / 64.0,
            final_time: 0.25,
            solution: Solution::Phase,
            tau_rule: TauRule::QuarterH,
            levels: 5,
            quadrature_order: 2,
            solver_tol: 1e-12,
            output: None,
            seed: 0,
            all_steps: false,
            timing: true,
        }
    }

    pub fn flow_config(&self) -> FlowConfig {
        FlowConfig {
            dim: self.d,
            subdivisions: self.n_mesh,
            target_dim: self.m,
            tau: self.tau,
            final_time: self.final_time,
            initial: match self.solution {
                Solution::Phase => InitialData::Phase,
                Solution::Constant => InitialData::Constant,
                Solution::Random => InitialData::Random { seed: self.seed },
            },
            solver_tol: self.solver_tol,
            quadrature_order: self.quadrature_order,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.flow_config()
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.command == Command::Converge && self.levels < 2 {
            return Err(ConfigError::Invalid("levels must be at least 2".into()));
        }
        if matches!(self.command, Command::Converge | Command::Defect)
            && self.solution == Solution::Random
        {
            return Err(ConfigError::Invalid(format!(
                "solution random has no closed form and cannot be used with {}",
                self.command
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(name = "sphereflow", version, about = "Harmonic map heat flow into spheres with P1 elements")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Run the flow and write one CSV row per step
    Run(Flags),
    /// Refinement study with experimental orders of convergence
    Converge(Flags),
    /// Consistency defect of the Ritz-projected exact solution at t = T
    Defect(Flags),
    /// Seeded property suites, PASS/FAIL per suite
    Check(Flags),
}

#[derive(Debug, Args, Default)]
struct Flags {
    /// Flat key = value file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// Spatial dimension
    #[arg(long)]
    d: Option<String>,
    /// Subdivisions per axis
    #[arg(long = "n", visible_alias = "n-mesh")]
    n_mesh: Option<String>,
    /// Target dimension
    #[arg(long)]
    m: Option<String>,
    /// Step size, a number or a fraction like 1/64
    #[arg(long)]
    tau: Option<String>,
    /// Final time
    #[arg(long = "T", visible_alias = "final-time")]
    final_time: Option<String>,
    /// phase, constant or random
    #[arg(long)]
    solution: Option<String>,
    /// tau=h/4, tau=sqrt_h/8 or fixed
    #[arg(long)]
    tau_rule: Option<String>,
    #[arg(long)]
    levels: Option<String>,
    /// 2 for the degree-2 rules, 3 or 4 for the degree-4 rules
    #[arg(long)]
    quadrature_order: Option<String>,
    #[arg(long)]
    solver_tol: Option<String>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<String>,
    /// Report the running maximum of the H¹ error over all steps
    #[arg(long)]
    all_steps: bool,
    /// Write nan instead of wall-clock times so reruns are byte-identical
    #[arg(long)]
    no_timing: bool,
}

const KEYS: &[&str] = &[
    "d",
    "n_mesh",
    "m",
    "tau",
    "T",
    "solution",
    "tau_rule",
    "levels",
    "quadrature_order",
    "solver_tol",
    "output",
    "seed",
    "all_steps",
    "timing",
];

/// Parses `argv` (without the program name) and any `--config` file.
pub fn parse_args<I, S>(argv: I) -> Result<CliConfig, ConfigError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let (command, flags) = parse_flags(argv)?;
    let file = match &flags.config {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.clone(),
            source,
        })?),
        None => None,
    };
    resolve(command, &flags, file.as_deref())
}

/// Like [`parse_args`] but with the config file contents supplied directly.
pub fn parse_args_with_file<I, S>(argv: I, file: &str) -> Result<CliConfig, ConfigError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let (command, flags) = parse_flags(argv)?;
    resolve(command, &flags, Some(file))
}

fn parse_flags<I, S>(argv: I) -> Result<(Command, Flags), ConfigError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(program_args(argv))
        .map_err(|e| ConfigError::Usage(first_line(&e.to_string())))?;
    Ok(match cli.command {
        Sub::Run(f) => (Command::Run, f),
        Sub::Converge(f) => (Command::Converge, f),
        Sub::Defect(f) => (Command::Defect, f),
        Sub::Check(f) => (Command::Check, f),
    })
}

fn program_args<I, S>(argv: I) -> impl Iterator<Item = std::ffi::OsString>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    std::iter::once(std::ffi::OsString::from("sphereflow")).chain(argv.into_iter().map(Into::into))
}

/// Whether `argv` asks for help or version output, which clap prints itself.
pub fn wants_help<I, S>(argv: I) -> Option<String>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(program_args(argv)) {
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp
                    | clap::error::ErrorKind::DisplayVersion
                    | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) =>
        {
            Some(e.render().to_string())
        }
        _ => None,
    }
}

fn first_line(s: &str) -> String {
    let line = s.lines().next().unwrap_or_default();
    line.strip_prefix("error: ").unwrap_or(line).to_string()
}

fn resolve(command: Command, flags: &Flags, file: Option<&str>) -> Result<CliConfig, ConfigError> {
    let mut config = CliConfig::defaults(command);
    if let Some(text) = file {
        for (key, value) in parse_file(text)? {
            apply(&mut config, &key, &value)?;
        }
    }
    let given = [
        ("d", &flags.d),
        ("n_mesh", &flags.n_mesh),
        ("m", &flags.m),
        ("tau", &flags.tau),
        ("T", &flags.final_time),
        ("solution", &flags.solution),
        ("tau_rule", &flags.tau_rule),
        ("levels", &flags.levels),
        ("quadrature_order", &flags.quadrature_order),
        ("solver_tol", &flags.solver_tol),
        ("seed", &flags.seed),
    ];
    for (key, value) in given {
        if let Some(v) = value {
            apply(&mut config, key, v)?;
        }
    }
    if let Some(path) = &flags.output {
        config.output = Some(path.clone());
    }
    if flags.all_steps {
        config.all_steps = true;
    }
    if flags.no_timing {
        config.timing = false;
    }
    config.validate()?;
    Ok(config)
}

/// Splits a config file into `(key, value)` pairs, rejecting unknown keys.
pub fn parse_file(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Syntax { line: i + 1, text: raw.to_string() });
        };
        let key = normalize_key(key.trim());
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey { key, line: i + 1 });
        }
        pairs.push((key, value.trim().to_string()));
    }
    Ok(pairs)
}

fn normalize_key(key: &str) -> String {
    match key {
        "n" => "n_mesh".to_string(),
        "final_time" => "T".to_string(),
        other => other.replace('-', "_"),
    }
}

fn apply(config: &mut CliConfig, key: &str, value: &str) -> Result<(), ConfigError> {
    let malformed = || ConfigError::Malformed { key: key.to_string(), value: value.to_string() };
    match key {
        "d" => config.d = value.parse().map_err(|_| malformed())?,
        "n_mesh" => config.n_mesh = value.parse().map_err(|_| malformed())?,
        "m" => config.m = value.parse().map_err(|_| malformed())?,
        "tau" => config.tau = parse_real(value).ok_or_else(malformed)?,
        "T" => config.final_time = parse_real(value).ok_or_else(malformed)?,
        "solution" => config.solution = value.parse().map_err(ConfigError::Invalid)?,
        "tau_rule" => {
            config.tau_rule = value.parse().map_err(|e: sphereflow_core::Error| {
                ConfigError::Invalid(format!("{e}, got '{value}'"))
            })?
        }
        "levels" => config.levels = value.parse().map_err(|_| malformed())?,
        "quadrature_order" => config.quadrature_order = value.parse().map_err(|_| malformed())?,
        "solver_tol" => config.solver_tol = parse_real(value).ok_or_else(malformed)?,
        "output" => config.output = Some(PathBuf::from(value)),
        "seed" => config.seed = value.parse().map_err(|_| malformed())?,
        "all_steps" => config.all_steps = parse_bool(value).ok_or_else(malformed)?,
        "timing" => config.timing = parse_bool(value).ok_or_else(malformed)?,
        _ => return Err(ConfigError::UnknownKey { key: key.to_string(), line: 0 }),
    }
    Ok(())
}

/// A finite float, or a fraction `a/b` of two finite floats.
pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?,
        None => s.parse::<f64>().ok()?,
    };
    value.is_finite().then_some(value)
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "1" | "yes" => Some(true),
        "false" | "0" | "no" => Some(false),
        _ => None,
    }
}
