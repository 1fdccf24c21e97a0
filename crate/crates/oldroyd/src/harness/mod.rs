//! Experiment harness: configuration, initial data, sweeps, reports, and
//! checkpoints.

pub mod checkpoint;
pub mod config;
pub mod initial;
pub mod report;
pub mod sweep;

pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use config::{
    load_config, ExperimentConfig, GridConfig, InitialConfig, NormConfig, OutputConfig,
    ParamsConfig, SplitConfig, StressSpec, TimeConfig, VelocitySpec,
};
pub use initial::{generate_initial_data, generate_stress, generate_velocity, materialize_forcing};
pub use report::{render_csv, render_json, write_report};
pub use sweep::{sweep, ConvergenceReport, MonotoneFlags, Slopes, SweepRow};
