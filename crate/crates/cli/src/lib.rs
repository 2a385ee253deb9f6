//! Command-line front end for [`fracheat_core`]: evaluation commands writing
//! CSV, samplers, and the validation suite.
//!
//! Exit statuses: 0 success, 1 validation failure, 2 usage error,
//! 3 numerical non-convergence.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;

pub mod commands;
pub mod config;
pub mod output;
pub mod validate;

pub use config::{parse_config, Command, Parsed, RunConfig};
pub use validate::{run_suite, Scale, ValidationReport, ValidationRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Worker-count hint for grid evaluation and sampling.
pub const THREADS_ENV: &str = "FRACHEAT_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(fracheat_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("validation failed: {failed} of {total} checks")]
    ValidationFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::ValidationFailed { .. } => EXIT_VALIDATION,
        }
    }
}

impl From<fracheat_core::Error> for CliError {
    fn from(e: fracheat_core::Error) -> Self {
        use fracheat_core::Error as E;
        match e {
            E::Domain { .. } | E::Unsupported { .. } => CliError::Usage(e.to_string()),
            E::OutOfRange { .. } | E::NonConvergence { .. } | E::RotationInvalid { .. } => {
                CliError::Numerical(e)
            }
        }
    }
}

fn thread_pool(hint: Option<&str>) -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(v) = hint {
        let k: usize = v.trim().parse().ok().filter(|&k| k >= 1).ok_or_else(|| {
            CliError::Usage(format!(
                "{THREADS_ENV}: expected an integer >= 1, got `{v}`"
            ))
        })?;
        builder = builder.num_threads(k);
    }
    builder
        .build()
        .map_err(|e| CliError::Usage(format!("{THREADS_ENV}: {e}")))
}

/// Parses `argv`, runs the command and returns the exit status. Errors are
/// reported on standard error.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = parse_config(argv).and_then(|parsed| match parsed {
        Parsed::Info(text) => {
            print!("{text}");
            Ok(())
        }
        Parsed::Run(config) => {
            let hint = std::env::var(THREADS_ENV).ok();
            thread_pool(hint.as_deref())?.install(|| commands::run(&config))
        }
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => eprint!(
                    "error: {}{}",
                    msg,
                    if msg.ends_with('\n') { "" } else { "\n" }
                ),
                other => eprintln!("error: {other}"),
            }
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_errors_map_to_exit_statuses() {
        let domain = fracheat_core::Error::Domain {
            what: "x",
            value: 1.0,
        };
        assert_eq!(CliError::from(domain).exit_code(), EXIT_USAGE);
        let nc = fracheat_core::Error::NonConvergence {
            what: "q",
            estimate: fracheat_core::QuadResult::new(0.0, 1.0, 10),
        };
        assert_eq!(CliError::from(nc).exit_code(), EXIT_NUMERICAL);
        assert_eq!(
            CliError::ValidationFailed {
                failed: 1,
                total: 2
            }
            .exit_code(),
            EXIT_VALIDATION
        );
    }

    #[test]
    fn thread_hint() {
        assert_eq!(thread_pool(Some("3")).unwrap().current_num_threads(), 3);
        assert!(thread_pool(Some("0")).is_err());
        assert!(thread_pool(Some("many")).is_err());
        assert!(thread_pool(None).is_ok());
    }
}
