//! File formats and the `csflab` command line on top of `csflab-core`.

mod cli;
mod error;
pub mod format;

pub use cli::{default_sidecar, dispatch, dispatch_with, run, HARNACK_CSV_HEADER, SQRT_T_H_CSV_HEADER};
pub use error::{CliError, CliResult};

#[cfg(test)]
mod cli_tests;
