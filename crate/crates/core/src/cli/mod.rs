//! Command-line front end: scenario files in, JSON reports out.
//!
//! Exit codes: 0 success, 2 scenario error, 3 internal invariant violation.

pub mod report;
pub mod scenario;

use std::fs;
use std::path::{Path, PathBuf};

pub use report::{build, render, RunError, SCHEMA_VERSION};
pub use scenario::{load, parse_doc, to_canonical, Scenario, ScenarioDoc, ScenarioError};

use crate::continuity::ProbeSet;

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_SCENARIO: u8 = 2;
pub const EXIT_INVARIANT: u8 = 3;

/// A failed command with its exit code and diagnostic.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Scenario(s) => scenario_failure(&s),
            RunError::Invariant(m) => Failure {
                code: EXIT_INVARIANT,
                message: format!("invariant violation: {m}"),
            },
        }
    }
}

fn scenario_failure(e: &ScenarioError) -> Failure {
    Failure {
        code: EXIT_SCENARIO,
        message: format!("scenario error: {e}"),
    }
}

fn read(path: &Path) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_SCENARIO,
        message: format!("scenario error: cannot read {}: {e}", path.display()),
    })?;
    load(&text).map_err(|e| scenario_failure(&e))
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub report: Option<PathBuf>,
    pub analyses: Vec<String>,
    pub probe_basis_max: Option<u64>,
}

/// Runs a scenario; returns the summary lines printed on success.
pub fn run(path: &Path, opts: &RunOptions) -> Result<Vec<String>, Failure> {
    let mut sc = read(path)?;
    if let Some(n) = opts.probe_basis_max {
        if n == 0 {
            return Err(scenario_failure(&scenario::at("--probe-basis-max", "must be at least 1")));
        }
        let mut cfg = sc.probes.config;
        cfg.basis_max = n;
        sc.probes = ProbeSet::new(cfg);
    }
    let (value, mut lines) = build(&sc, &opts.analyses)?;
    lines.insert(0, format!("scenario {}: {} atoms", sc.doc.name, sc.operator.space().len()));
    if let Some(out) = &opts.report {
        fs::write(out, render(&value)).map_err(|e| Failure {
            code: EXIT_IO,
            message: format!("cannot write {}: {e}", out.display()),
        })?;
        lines.push(format!("report written to {}", out.display()));
    }
    Ok(lines)
}

/// Checks a scenario without running analyses; returns its canonical text.
pub fn validate(path: &Path) -> Result<String, Failure> {
    read(path).map(|sc| to_canonical(&sc.doc))
}
