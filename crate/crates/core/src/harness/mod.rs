//! Declarative experiment configuration, sweep execution, metrics, and
//! dataset emission.
//!
//! One JSON file fully determines a run, including every seed, so each
//! recorded dataset is a recipe that reproduces itself.  Sweeps fan a base
//! configuration out over derived trial seeds, aggregate per-experiment loss
//! quantiles, and persist both the plot-ready CSV and the full per-trial
//! traces.

mod config;
mod io;
mod metrics;
mod sweep;

pub use config::{
    build_channel, ChannelBuildConfig, FamilyConfig, ModelSelectConfig, NoiseFileConfig,
    PriorConfig, ResampleConfig, RunConfig, SweepConfig, TruthConfig,
};
pub use io::atomic_write;
pub use metrics::{fit_gamma, quadratic_loss, quantiles, GammaFit};
pub use sweep::{
    model_select_sweep, read_loss_csv, run_sweep, write_model_select_dataset, write_run_trace,
    write_sweep_dataset, ModelSelectOutcome, OddsRow, SweepOutcome, SweepRow, TrialOutcome,
};
