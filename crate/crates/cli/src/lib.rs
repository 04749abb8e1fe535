//! Library half of the `eulerist` command-line tool: flag definitions,
//! run configurations, and command execution.

pub mod args;
pub mod commands;
pub mod error;

pub use args::{Cli, RunConfig};
pub use commands::run;
pub use error::CliError;

/// Sizes the global worker pool. Must run before any parallel work.
pub fn init_threads(threads: Option<usize>) -> Result<(), CliError> {
    let Some(n) = threads else {
        return Ok(());
    };
    if n == 0 {
        return Err(CliError::Usage("--threads must be >= 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure {n} threads: {e}")))
}
