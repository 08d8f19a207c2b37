//! Run configuration: an optional JSON file overlaid by command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};

use baernstein::dual::{DualOptions, DEFAULT_DUAL_GUARD, DEFAULT_MAX_ITERATIONS, DEFAULT_TOL};
use baernstein::family::DEFAULT_MEMBER_GUARD;
use baernstein::primal::DEFAULT_NORM_GUARD;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::error::Category;

pub const DEFAULT_DIGITS: usize = 12;

/// Exit status 2 for malformed invocations, 1 for inputs the library rejects.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

impl From<baernstein::Error> for CliError {
    fn from(e: baernstein::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Everything a run can be configured with. Each field may come from the
/// `--config` file; flags given on the command line take precedence.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Inline family spec, or a path to one.
    pub family: Option<serde_json::Value>,
    pub max_support: Option<usize>,
    pub max_ground: Option<usize>,
    pub max_iterations: Option<usize>,
    pub tol: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub digits: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        parse_json(&text, "config")
    }

    /// `self` with every field set in `over` replaced.
    pub fn overlay(self, over: RunConfig) -> RunConfig {
        RunConfig {
            family: over.family.or(self.family),
            max_support: over.max_support.or(self.max_support),
            max_ground: over.max_ground.or(self.max_ground),
            max_iterations: over.max_iterations.or(self.max_iterations),
            tol: over.tol.or(self.tol),
            format: over.format.or(self.format),
            out: over.out.or(self.out),
            digits: over.digits.or(self.digits),
        }
    }

    pub fn resolve(self) -> CliResult<Settings> {
        let positive = |name: &str, v: Option<usize>, default: usize| match v {
            Some(0) => Err(CliError::Usage(format!("--{name} must be positive"))),
            Some(v) => Ok(v),
            None => Ok(default),
        };
        let tol = self.tol.unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol < 1.0) {
            return Err(CliError::Usage(format!("--tol must lie in (0, 1), got {tol}")));
        }
        let family = match self.family {
            Some(serde_json::Value::String(text)) => Some(load_json::<serde_json::Value>(&text, "family")?),
            other => other,
        };
        if self.max_support == Some(0) {
            return Err(CliError::Usage("--max-support must be positive".into()));
        }
        Ok(Settings {
            family,
            max_support: self.max_support,
            max_ground: positive("max-ground", self.max_ground, DEFAULT_MEMBER_GUARD)?,
            max_iterations: positive("max-iterations", self.max_iterations, DEFAULT_MAX_ITERATIONS)?,
            tol,
            format: self.format,
            out: self.out,
            digits: self.digits.unwrap_or(DEFAULT_DIGITS),
        })
    }
}

#[derive(Debug, Clone)]
pub struct Settings {
    /// Family spec JSON, parsed when a command needs it.
    pub family: Option<serde_json::Value>,
    /// Support guard; each command has its own default.
    pub max_support: Option<usize>,
    pub max_ground: usize,
    pub max_iterations: usize,
    pub tol: f64,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub digits: usize,
}

impl Settings {
    pub fn norm_guard(&self) -> usize {
        self.max_support.unwrap_or(DEFAULT_NORM_GUARD)
    }

    pub fn dual_options(&self) -> DualOptions {
        DualOptions {
            tol: self.tol,
            guard: self.max_support.unwrap_or(DEFAULT_DUAL_GUARD),
            max_iterations: self.max_iterations,
        }
    }
}

/// Parses `text`, sorting syntax errors (usage) from rejected contents (domain).
pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| match e.classify() {
        Category::Data => CliError::Domain(format!("{what}: {e}")),
        _ => CliError::Usage(format!("{what}: malformed JSON: {e}")),
    })
}

/// An argument that is either inline JSON or a path to a JSON file.
pub fn load_json<T: DeserializeOwned>(arg: &str, what: &str) -> CliResult<T> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') || trimmed == "true" || trimmed == "false" {
        return parse_json(arg, what);
    }
    let text = std::fs::read_to_string(arg)
        .map_err(|e| CliError::Usage(format!("cannot read {what} file {arg}: {e}")))?;
    parse_json(&text, what)
}
