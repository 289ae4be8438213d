//! Scenario files, sweeps and figure presets on top of `xlirs`.

pub mod angle;
pub mod config;
pub mod error;
pub mod eval;
pub mod presets;
pub mod sweep;

pub use config::{load_scenario, Analysis, RunConfig};
pub use error::{CliError, Result};
pub use eval::run_eval;
pub use sweep::{run_sweep, Axis, Scale, SweepSpec, SweepStatus};

/// Environment variable capping the worker count.
pub const THREADS_VAR: &str = "XLIRS_THREADS";

/// Sizes the global pool from `XLIRS_THREADS` (hardware parallelism when
/// unset). Results do not depend on the count.
pub fn init_thread_pool() -> Result<()> {
    let threads = match std::env::var(THREADS_VAR) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Invalid(format!("{THREADS_VAR} must be a positive integer, got {v:?}")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Invalid(format!("thread pool: {e}")))
}
