//! Batch front end of `cuspfs`: reads an experiment config, runs the
//! registered checks of one command and writes a summary JSON plus one CSV
//! per check.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on a
//! config error (nothing is written), 3 on a numerical failure (a
//! `diagnostic.json` names the check, node and time step).

pub mod config;
pub mod output;
pub mod registry;
pub mod run;

use std::fmt;
use std::fs;
use std::path::Path;

use cuspfs::report::CheckResult;

pub use registry::{list_checks, Command, CHECKS};
pub use run::Plan;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "CUSPFS_THREADS";

/// Invalid or inconsistent input; maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// What happened in a run.
#[derive(Debug)]
pub enum Outcome {
    Finished(Vec<CheckResult>),
    Config(ConfigError),
    Numerical { results: Vec<CheckResult>, diagnostic: output::Diagnostic },
    Io(std::io::Error),
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Finished(r) if r.iter().all(|c| c.pass) => EXIT_PASS,
            Outcome::Finished(_) => EXIT_FAIL,
            Outcome::Config(_) | Outcome::Io(_) => EXIT_CONFIG,
            Outcome::Numerical { .. } => EXIT_NUMERICAL,
        }
    }
}

/// Parse `CUSPFS_THREADS`; unset means "all cores".
pub fn thread_cap(value: Option<&str>) -> Result<Option<usize>, ConfigError> {
    match value.map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => match v.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(ConfigError(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

/// Size the global rayon pool; a no-op without the `parallel` feature.
pub fn init_threads(cap: Option<usize>) {
    #[cfg(feature = "parallel")]
    if let Some(n) = cap {
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = cap;
}

/// Run `command` on the config at `config_path`, writing into `out`.
/// `log` receives one line per finished check.
pub fn run_command(
    command: Command,
    config_path: &Path,
    out: &Path,
    seed: Option<u64>,
    log: &mut dyn FnMut(&str),
) -> Outcome {
    let plan = match config::load(config_path).and_then(|cfg| Plan::new(command, cfg, seed)) {
        Ok(p) => p,
        Err(e) => return Outcome::Config(e),
    };
    if let Err(e) = fs::create_dir_all(out) {
        return Outcome::Io(e);
    }
    let mut results = Vec::new();
    let mut cache = run::Cache::default();
    for info in &plan.checks {
        match plan.execute(info, &mut cache) {
            Ok(o) => {
                for t in &o.tables {
                    if let Err(e) = output::write_table(out, t) {
                        return Outcome::Io(e);
                    }
                }
                for r in o.results {
                    log(&output::report_line(&r));
                    if let Err(e) = output::write_check_csv(out, &r) {
                        return Outcome::Io(e);
                    }
                    results.push(r);
                }
            }
            Err(e) => {
                let diagnostic = output::Diagnostic::new(info.id, &e);
                log(&format!("{:36} ERROR {e}", info.id));
                let written = output::write_diagnostic(out, &diagnostic)
                    .and_then(|_| output::write_summary(out, &results))
                    .and_then(|_| output::write_report(out, &results));
                if let Err(e) = written {
                    return Outcome::Io(e);
                }
                return Outcome::Numerical { results, diagnostic };
            }
        }
    }
    if let Err(e) = output::write_summary(out, &results).and_then(|_| output::write_report(out, &results)) {
        return Outcome::Io(e);
    }
    Outcome::Finished(results)
}
