//! Experiment runner for `gnw-core`: verification suites that compare the
//! analytic quantities against simulation, bandwidth/sparsity/size sweeps,
//! and SVG figures. Every output is a deterministic function of the
//! configuration and seed.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod figure;
pub mod output;
pub mod sweep;
pub mod verify;

pub use error::{CliError, ExitCode};
pub use figure::{figure_svg, FigureKind};
pub use sweep::{run_sweep, sweep_csv, SweepParam, SweepRow};
pub use verify::{all_pass, run_selftest, run_suite, verification_csv, Suite, VerificationRow};

/// Runs `f` on a dedicated pool of `threads` workers (`None` keeps the global pool).
pub fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start {n} worker threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
