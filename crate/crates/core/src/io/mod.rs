//! Run configuration, file formats and the drivers behind the `fraclap`
//! binary. Every driver writes its outputs into the configured directory
//! and returns the JSON report it persisted.

mod commands;
mod config;
mod sampled;
mod table;

use std::path::PathBuf;

pub use commands::{
    run_compare_fft, run_fracderiv, run_soliton, run_trace, CompareReport, FracderivReport, SolitonReport,
    TraceReport, TraceStepReport,
};
pub use config::{RunConfig, ScheduleEntry};
pub use sampled::{load_sampled_function, parse_sampled_function, save_sampled_function, SampledFunction};
pub use table::{derivative_rows, write_derivative_csv, DerivativeRow};

use crate::error::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    /// 1 for anything the user can fix in the invocation, 2 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NumericalDomain { .. } | Error::ImaginaryResidue { .. } | Error::Solver(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
