//! Batch front end for cforge: reads a JSON instance, runs one operation and
//! writes a JSON report with a verification summary.

mod commands;
mod gen;

use std::fmt;
use std::path::PathBuf;

use cforge_core::commdecomp::{BoundCheck, DecompError};
use cforge_core::cucompare::CuError;
use cforge_core::dhsdet::DetError;
use cforge_core::matcore::{MatError, DEFAULT_TOL};
use cforge_core::nildecomp::NilError;
use cforge_core::ErrorClass;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use gen::GenKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Decompose2,
    Peel,
    Fack,
    Nilify,
    Bridge,
    Rosenblum,
    Det,
    Regroup,
    Suzuki,
    Kernel,
    Compare,
    Gen,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Decompose2 => "decompose2",
            Command::Peel => "peel",
            Command::Fack => "fack",
            Command::Nilify => "nilify",
            Command::Bridge => "bridge",
            Command::Rosenblum => "rosenblum",
            Command::Det => "det",
            Command::Regroup => "regroup",
            Command::Suzuki => "suzuki",
            Command::Kernel => "kernel",
            Command::Compare => "compare",
            Command::Gen => "gen",
        }
    }
}

/// One invocation. Optional numeric parameters fall back to per-command
/// defaults or to values stored in the input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(rename = "cmd")]
    pub command: Command,
    #[serde(rename = "in", default)]
    pub input: Option<PathBuf>,
    #[serde(rename = "out", default)]
    pub output: Option<PathBuf>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(rename = "N", default)]
    pub big_n: Option<usize>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub grid: Option<usize>,
    #[serde(default)]
    pub report_only: bool,
    #[serde(default)]
    pub kind: Option<GenKind>,
    #[serde(default)]
    pub depth: Option<usize>,
    #[serde(rename = "L", default)]
    pub l: Option<usize>,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            input: None,
            output: None,
            tol: DEFAULT_TOL,
            seed: 0,
            n: None,
            big_n: None,
            gamma: None,
            eps: None,
            grid: None,
            report_only: false,
            kind: None,
            depth: None,
            l: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tol > 0.0 && self.tol < 1e-2) {
            return Err(CliError::input(format!("tol must lie in (0, 1e-2), got {}", self.tol)));
        }
        if self.command == Command::Gen && self.kind.is_none() {
            return Err(CliError::input("gen needs --kind"));
        }
        if self.command != Command::Gen && self.input.is_none() {
            return Err(CliError::input(format!("{} needs --in", self.command.name())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub class: ErrorClass,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            class: ErrorClass::Input,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        exit_code(self.class)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub fn exit_code(class: ErrorClass) -> i32 {
    match class {
        ErrorClass::Verification => 1,
        ErrorClass::Input => 2,
        ErrorClass::NonConvergence => 3,
    }
}

macro_rules! from_module_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError { class: e.class(), message: e.to_string() }
            }
        }
    )*};
}

from_module_error!(DecompError, NilError, DetError, CuError);

impl From<MatError> for CliError {
    fn from(e: MatError) -> Self {
        CliError {
            class: ErrorClass::of_mat(&e),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckCounts {
    pub passed: usize,
    pub failed: usize,
    pub failed_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub reconstruction_residual: Option<f64>,
    pub bound_checks: CheckCounts,
    pub verified: bool,
}

impl Summary {
    pub fn from_checks(reconstruction_residual: Option<f64>, checks: &[BoundCheck]) -> Self {
        let failed_names: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect();
        Summary {
            reconstruction_residual,
            bound_checks: CheckCounts {
                passed: checks.len() - failed_names.len(),
                failed: failed_names.len(),
                failed_names,
            },
            verified: checks.iter().all(|c| c.pass),
        }
    }
}

/// A finished run: the report document and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub document: String,
    pub summary: Summary,
    pub exit_code: i32,
}

/// Body produced by a command before it is wrapped into the document.
pub(crate) struct Body {
    pub report: Value,
    pub checks: Vec<BoundCheck>,
    pub reconstruction_residual: Option<f64>,
}

pub(crate) fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

/// Runs one configuration and returns the report text without writing it.
pub fn execute(config: &RunConfig) -> Result<Outcome, CliError> {
    config.validate()?;
    let input = match &config.input {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::input(format!("cannot read {}: {e}", p.display())))?;
            Some(
                serde_json::from_str::<Value>(&text)
                    .map_err(|e| CliError::input(format!("{} is not valid JSON: {e}", p.display())))?,
            )
        }
        None => None,
    };
    let body = commands::dispatch(config, input)?;
    let summary = Summary::from_checks(body.reconstruction_residual, &body.checks);
    let mut doc = serde_json::Map::new();
    doc.insert("command".into(), Value::from(config.command.name()));
    doc.insert("tol".into(), Value::from(config.tol));
    if config.command == Command::Gen {
        doc.insert("seed".into(), Value::from(config.seed));
    }
    doc.insert(
        if config.command == Command::Gen { "instance" } else { "report" }.into(),
        body.report,
    );
    doc.insert("bound_checks".into(), to_value(&body.checks));
    doc.insert("summary".into(), to_value(&summary));
    let document = cforge_core::json::to_string(&Value::Object(doc))
        .map_err(|e| CliError::input(format!("cannot serialize report: {e}")))?;
    let exit_code = if summary.verified { 0 } else { 1 };
    Ok(Outcome {
        document,
        summary,
        exit_code,
    })
}

/// Runs one configuration, writing the report to the output path (or
/// standard output) and returning the exit code.
pub fn run(config: &RunConfig) -> i32 {
    match execute(config) {
        Ok(outcome) => {
            let written = match &config.output {
                Some(p) => std::fs::write(p, &outcome.document)
                    .map_err(|e| format!("cannot write {}: {e}", p.display())),
                None => {
                    print!("{}", outcome.document);
                    Ok(())
                }
            };
            match written {
                Ok(()) => outcome.exit_code,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    2
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs every job of a manifest (a JSON array of run configurations) on up
/// to `threads` worker threads. The exit code is the largest job exit code.
pub fn run_manifest(text: &str, threads: usize) -> Result<i32, CliError> {
    let jobs: Vec<RunConfig> =
        serde_json::from_str(text).map_err(|e| CliError::input(format!("bad job manifest: {e}")))?;
    if let Some(k) = jobs.iter().position(|j| j.output.is_none()) {
        return Err(CliError::input(format!("job {k} has no \"out\" path")));
    }
    let threads = threads.max(1).min(jobs.len().max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let worst = std::sync::atomic::AtomicI32::new(0);
    std::thread::scope(|s| {
        for _ in 0..threads {
            s.spawn(|| loop {
                let k = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                let Some(job) = jobs.get(k) else { break };
                let code = run(job);
                worst.fetch_max(code, std::sync::atomic::Ordering::Relaxed);
            });
        }
    });
    Ok(worst.into_inner())
}
