//! Harness for the feature-field navigation simulator: trial runs with
//! aggregate metrics, parameter sweeps, field-map renderings and λ traces.

pub mod config;
pub mod experiment;
pub mod plots;
pub mod snapshot;
pub mod svg;

pub use config::{ConfigError, Overrides, RunConfig};
pub use experiment::{
    aggregate, recompute_from_logs, run_sweep, run_trials, CellClass, MetricsRecord, Stat, SweepResult, SweepSpec,
};
pub use snapshot::FrameSnapshot;
