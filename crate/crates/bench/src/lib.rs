//! Benchmark harness for the limited-memory trust-region solver.
//!
//! A suite runs every (problem, solver) cell a number of times, keeps the
//! iteration counts of one run and averages wall-clock time over the runs
//! left after a warm-up discard. Records are written as CSV and JSON, and
//! performance profiles are computed from them and written as TSV.

pub mod config;
pub mod emit;
pub mod error;
pub mod profile;
pub mod record;
pub mod spec;
pub mod suite;

pub use error::{BenchError, Result};
pub use profile::{performance_profile, tau_grid, Metric, ProfileCurve, ProfileTable};
pub use record::RunRecord;
pub use spec::SolverSpec;
pub use suite::{run_suite, SuiteConfig};

/// Environment variable naming the default output directory of `bench run`.
pub const OUT_DIR_ENV: &str = "LMTR_BENCH_OUT";
