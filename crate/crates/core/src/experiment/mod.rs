//! Experiment runner: configs, benchmark fields, sweeps, reports and the
//! invariant checks behind the `hemdd` binary.

mod checks;
mod config;
mod fields;
mod report;
mod sweep;

pub use checks::{run_checks, CheckOutcome};
pub use config::{
    load_config, parse_config, AdaptiveConfig, AlphaConfig, CoarseConfig, ConfigInclusion, ExperimentConfig,
    InclusionValue, SweepConfig,
};
pub use fields::{benchmark_field, Benchmark};
pub use report::{emit_report, spectrum_csv, Format};
pub use sweep::{run_point, run_sweep, sweep_points, ResultRow, SweepPoint};
