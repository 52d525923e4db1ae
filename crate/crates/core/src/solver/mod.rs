//! SAT backends behind one interface.
//!
//! The builtin CDCL solver runs in-process. The external backend speaks the
//! usual DIMACS / `s` + `v` line protocol to any competition-style solver.
//! Every satisfying model returned from here has been checked against the
//! instance it came from.

mod cdcl;
mod external;

use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encode::{CnfInstance, Model};

pub use cdcl::{Cdcl, CdclStats, Outcome};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Backend {
    Builtin,
    /// Command template, split on whitespace. `{input}` is replaced by the
    /// path of a DIMACS file; without it the instance is piped to stdin.
    External { command: String },
}

impl Backend {
    /// First external solver found: `LINLAYOUT_SOLVER_CMD`, then a known
    /// solver on `PATH`, then the bundled pysat wrapper if python can run it.
    pub fn discover_external() -> Option<Backend> {
        if let Ok(cmd) = std::env::var("LINLAYOUT_SOLVER_CMD") {
            if !cmd.trim().is_empty() {
                return Some(Backend::External { command: cmd });
            }
        }
        for name in ["kissat", "cadical", "lingeling", "varisat"] {
            if let Some(path) = which(name) {
                let command = match name {
                    "kissat" | "cadical" => format!("{} -q {{input}}", path.display()),
                    _ => format!("{} {{input}}", path.display()),
                };
                return Some(Backend::External { command });
            }
        }
        let wrapper = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../tools/pysat_solve.py");
        let python = which("python3")?;
        let ok = std::process::Command::new(&python)
            .args(["-c", "import pysat.solvers"])
            .stdout(std::process::Stdio::null())
            .stderr(std::process::Stdio::null())
            .status()
            .map(|s| s.success())
            .unwrap_or(false);
        (ok && wrapper.exists()).then(|| Backend::External {
            command: format!("{} {} {{input}}", python.display(), wrapper.display()),
        })
    }
}

fn which(name: &str) -> Option<PathBuf> {
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path)
        .map(|d| d.join(name))
        .find(|p| p.is_file())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub backend: Backend,
    /// Wall-clock budget for the whole job, refinement rounds included.
    #[serde(with = "secs")]
    pub time_limit: Duration,
    /// Maximum number of solver calls made while refining forest pages.
    pub max_rounds: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            backend: Backend::Builtin,
            time_limit: Duration::from_secs(300),
            max_rounds: 200,
        }
    }
}

impl SolverConfig {
    pub fn builtin() -> Self {
        Self::default()
    }

    pub fn external(command: impl Into<String>) -> Self {
        Self {
            backend: Backend::External {
                command: command.into(),
            },
            ..Self::default()
        }
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = limit;
        self
    }
}

mod secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let v = f64::deserialize(d)?;
        if !v.is_finite() || v <= 0.0 {
            return Err(serde::de::Error::custom("time limit must be a positive number of seconds"));
        }
        Ok(Duration::from_secs_f64(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    pub wall_ms: u64,
    pub rounds: u32,
    pub clauses_added: u64,
    /// True when the run ended because its [`CancelToken`] fired.
    pub cancelled: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub model: Option<Model>,
    pub stats: SolveStats,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("solver command is empty")]
    EmptyCommand,
    #[error("failed to start solver `{command}`: {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("solver exited with unexpected status {code:?}: {stderr}")]
    ExitStatus { code: Option<i32>, stderr: String },
    #[error("malformed solver output: {0}")]
    Protocol(String),
    #[error("solver returned a model that falsifies clause {clause}")]
    BadModel { clause: usize },
    #[error("i/o error talking to solver: {0}")]
    Io(#[from] std::io::Error),
}

/// Shared flag used to abandon a running solve.
#[derive(Debug, Clone, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::SeqCst);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::SeqCst)
    }
}

/// Why a solve stopped without a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Interrupt {
    Deadline,
    Cancelled,
}

pub(crate) struct Budget<'a> {
    pub deadline: Instant,
    pub cancel: &'a CancelToken,
}

impl Budget<'_> {
    pub fn check(&self) -> Option<Interrupt> {
        if self.cancel.is_cancelled() {
            Some(Interrupt::Cancelled)
        } else if Instant::now() >= self.deadline {
            Some(Interrupt::Deadline)
        } else {
            None
        }
    }
}

pub(crate) enum Verdict {
    Sat(Model),
    Unsat,
    Stopped(Interrupt),
}

/// One solver call with no wall-clock accounting; the model is checked.
pub(crate) fn run_backend(backend: &Backend, cnf: &CnfInstance, budget: &Budget) -> Result<Verdict, SolverError> {
    let verdict = match backend {
        Backend::Builtin => {
            if let Some(i) = budget.check() {
                return Ok(Verdict::Stopped(i));
            }
            match Cdcl::from_cnf(cnf).solve(&|| budget.check().is_some()) {
                Outcome::Sat(m) => Verdict::Sat(m),
                Outcome::Unsat => Verdict::Unsat,
                Outcome::Interrupted => Verdict::Stopped(budget.check().unwrap_or(Interrupt::Deadline)),
            }
        }
        Backend::External { command } => external::solve(command, cnf, budget)?,
    };
    if let Verdict::Sat(m) = &verdict {
        if let Some(clause) = cnf.first_falsified(m) {
            return Err(SolverError::BadModel { clause });
        }
    }
    Ok(verdict)
}

/// Solves a bare CNF instance.
pub fn solve_cnf(cnf: &CnfInstance, config: &SolverConfig) -> Result<SolveResult, SolverError> {
    solve_cnf_cancellable(cnf, config, &CancelToken::new())
}

pub fn solve_cnf_cancellable(
    cnf: &CnfInstance,
    config: &SolverConfig,
    cancel: &CancelToken,
) -> Result<SolveResult, SolverError> {
    let start = Instant::now();
    let budget = Budget {
        deadline: start + config.time_limit,
        cancel,
    };
    let verdict = run_backend(&config.backend, cnf, &budget)?;
    let mut stats = SolveStats {
        wall_ms: start.elapsed().as_millis() as u64,
        rounds: 1,
        ..SolveStats::default()
    };
    Ok(match verdict {
        Verdict::Sat(m) => SolveResult {
            status: SolveStatus::Sat,
            model: Some(m),
            stats,
        },
        Verdict::Unsat => SolveResult {
            status: SolveStatus::Unsat,
            model: None,
            stats,
        },
        Verdict::Stopped(why) => {
            stats.cancelled = why == Interrupt::Cancelled;
            SolveResult {
                status: SolveStatus::Unknown,
                model: None,
                stats,
            }
        }
    })
}
