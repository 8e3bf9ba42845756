//! Command-line front end: reads `id,p` CSV files and writes JSON reports,
//! PMF and power CSVs, and SVG charts.

pub mod args;
pub mod commands;
pub mod report;
pub mod svg;

pub use commands::{run, CliError, EXIT_CAPACITY, EXIT_INCOMPATIBLE, EXIT_INPUT, EXIT_IO, EXIT_OK};

/// Environment variable capping the worker count; 0 means one per core.
pub const THREADS_ENV: &str = "MTCHERRY_THREADS";

/// Configures the global worker pool from [`THREADS_ENV`].
pub fn init_threads() -> Result<(), CliError> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| CliError {
            code: EXIT_INPUT,
            message: format!("{THREADS_ENV} must be a nonnegative integer, got {v:?}"),
        })?,
        Err(_) => 0,
    };
    // A pool already built by an embedding program keeps its settings.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}
