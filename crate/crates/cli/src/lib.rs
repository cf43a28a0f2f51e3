//! `hetcoop` command-line front end.
//!
//! Every command renders its whole output into a string first, then writes it
//! to `--out` or stdout, so identical inputs give byte-identical files.

pub mod args;
pub mod eval;
pub mod evaluator;
pub mod figure;
pub mod provenance;
pub mod sweep;
pub mod validate;

use std::fmt;
use std::path::Path;

use hetcoop::analytic::AnalyticError;
use hetcoop::model::ConfigError;

pub use args::{Cli, Command};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    /// Bad config file, flag value, unknown id, or unsupported input.
    Config(String),
    /// A quadrature did not reach its tolerance.
    Tolerance(String),
    /// `validate` found at least one failing metric.
    Validation { failed: usize },
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Tolerance(_) => EXIT_TOLERANCE,
            CliError::Validation { .. } => EXIT_VALIDATION,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Tolerance(m) => write!(f, "tolerance not met: {m}"),
            CliError::Validation { failed } => write!(f, "validation failed: {failed} metric(s) outside tolerance"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<AnalyticError> for CliError {
    fn from(e: AnalyticError) -> Self {
        if e.is_tolerance() {
            CliError::Tolerance(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl From<hetcoop::geometry::GeometryError> for CliError {
    fn from(e: hetcoop::geometry::GeometryError) -> Self {
        AnalyticError::from(e).into()
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// A rendered output file plus the number of failed checks it records.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub body: String,
    pub failures: usize,
}

impl Rendered {
    pub fn ok(body: String) -> Self {
        Self { body, failures: 0 }
    }
}

/// Renders the command's output without writing it anywhere.
pub fn render(cli: &Cli) -> Result<Rendered, CliError> {
    match &cli.command {
        Command::Eval(a) => eval::run(a, cli),
        Command::Sweep(a) => sweep::run(a, cli),
        Command::Validate(a) => validate::run(a, cli),
        Command::Figure(a) => figure::run(a, cli),
    }
}

/// Renders and writes the output, then reports validation failures.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let out = render(cli)?;
    write_output(cli.out.as_deref(), &out.body)?;
    if out.failures > 0 {
        return Err(CliError::Validation { failed: out.failures });
    }
    Ok(())
}

fn write_output(path: Option<&Path>, body: &str) -> std::io::Result<()> {
    use std::io::Write;
    match path {
        Some(p) => std::fs::write(p, body),
        None => std::io::stdout().lock().write_all(body.as_bytes()),
    }
}

/// Parses `a,b,c` or `start:stop:step` (inclusive). An empty string is an
/// empty list.
pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let num = |t: &str| {
        t.trim().parse::<f64>().map_err(|_| CliError::Config(format!("not a number: {t:?}")))
    };
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Config(format!("range must be start:stop:step, got {s:?}")));
        }
        let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || stop < start {
            return Err(CliError::Config(format!("empty or invalid range {s:?}")));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + step * i as f64).collect());
    }
    s.split(',').map(num).collect()
}
