//! Sweep execution and dataset emission.
//!
//! A sweep runs one configuration over `trials` derived seeds (trial seed =
//! `mix(base_seed, [TRIAL, index])`), collects the per-experiment quadratic
//! loss across trials, and reports the median with the interquartile band —
//! the 25th/75th-percentile envelope.  Failed trials are kept as flagged
//! rows, never dropped.
//!
//! On disk a sweep is a directory:
//!
//! ```text
//! out/
//!   sweep.csv            experiment_index,median_loss,q25,q75
//!   meta.json            configuration echo + derived seeds
//!   trials/trial_0000.json …   full per-trial traces
//! ```
//!
//! Floats are written in shortest round-trip form, so re-fitting a decay
//! rate from the CSV reproduces the in-memory fit bit-for-bit.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::io::atomic_write;
use super::metrics::quantiles;
use crate::error::Error;
use crate::protocols::{model_select_run, qhl_run, ModelSelectTrace, QhlConfig, TrialTrace};
use crate::seeds::{self, tag};
use crate::Result;

/// One aggregated CSV row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// 1-based experiment number.
    pub experiment: usize,
    pub median_loss: f64,
    pub q25: f64,
    pub q75: f64,
}

/// A trial either completed (possibly flagged aborted inside the trace) or
/// failed outright; failures stay in the dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum TrialOutcome {
    Completed { seed: u64, trace: TrialTrace },
    Failed { seed: u64, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub trials: Vec<TrialOutcome>,
}

impl SweepOutcome {
    pub fn median_losses(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.median_loss).collect()
    }
}

/// Run `trials` independent learning runs and aggregate loss quantiles.
pub fn run_sweep(base: &QhlConfig, trials: usize, base_seed: u64) -> Result<SweepOutcome> {
    if trials == 0 {
        return Err(Error::InvalidConfig("need at least one trial".into()));
    }
    base.validate()?;
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let seed = seeds::mix(base_seed, &[tag::TRIAL, i as u64]);
            let mut cfg = base.clone();
            cfg.seed = seed;
            match qhl_run(cfg) {
                Ok(trace) => TrialOutcome::Completed { seed, trace },
                Err(e) => TrialOutcome::Failed {
                    seed,
                    message: e.to_string(),
                },
            }
        })
        .collect();

    let rows = aggregate_rows(&outcomes, base.experiments, |trace, k| {
        trace.records.get(k).map(|r| r.loss)
    });
    Ok(SweepOutcome {
        rows,
        trials: outcomes,
    })
}

fn aggregate_rows(
    outcomes: &[TrialOutcome],
    experiments: usize,
    value_at: impl Fn(&TrialTrace, usize) -> Option<f64>,
) -> Vec<SweepRow> {
    let mut rows = Vec::with_capacity(experiments);
    for k in 0..experiments {
        let values: Vec<f64> = outcomes
            .iter()
            .filter_map(|o| match o {
                TrialOutcome::Completed { trace, .. } => value_at(trace, k),
                TrialOutcome::Failed { .. } => None,
            })
            .collect();
        if values.is_empty() {
            continue;
        }
        let (median, q25, q75) = quantiles(&values);
        rows.push(SweepRow {
            experiment: k + 1,
            median_loss: median,
            q25,
            q75,
        });
    }
    rows
}

/// One aggregated model-selection row: log10 posterior odds quantiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OddsRow {
    pub experiment: usize,
    pub median_log10_odds: f64,
    pub q25: f64,
    pub q75: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ModelSelectTrial {
    Completed { seed: u64, trace: ModelSelectTrace },
    Failed { seed: u64, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSelectOutcome {
    pub rows: Vec<OddsRow>,
    pub trials: Vec<ModelSelectTrial>,
}

impl ModelSelectOutcome {
    pub fn median_log10_odds(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.median_log10_odds).collect()
    }
}

/// Run `trials` dual-model comparisons; `configs(trial_seed)` materializes
/// the per-trial (null, alternate) pair so per-trial seeds stay under the
/// caller's control.
pub fn model_select_sweep(
    configs: impl Fn(u64) -> Result<(QhlConfig, QhlConfig)> + Sync,
    n_exp: usize,
    trials: usize,
    base_seed: u64,
) -> Result<ModelSelectOutcome> {
    if trials == 0 {
        return Err(Error::InvalidConfig("need at least one trial".into()));
    }
    let outcomes: Vec<ModelSelectTrial> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let seed = seeds::mix(base_seed, &[tag::TRIAL, i as u64]);
            let run = configs(seed)
                .and_then(|(null_cfg, alt_cfg)| model_select_run(&null_cfg, &alt_cfg, n_exp, seed));
            match run {
                Ok(trace) => ModelSelectTrial::Completed { seed, trace },
                Err(e) => ModelSelectTrial::Failed {
                    seed,
                    message: e.to_string(),
                },
            }
        })
        .collect();

    let ln10 = std::f64::consts::LN_10;
    let mut rows = Vec::with_capacity(n_exp);
    for k in 0..n_exp {
        let values: Vec<f64> = outcomes
            .iter()
            .filter_map(|o| match o {
                ModelSelectTrial::Completed { trace, .. } => {
                    trace.records.get(k).map(|r| r.cum_log_odds / ln10)
                }
                ModelSelectTrial::Failed { .. } => None,
            })
            .collect();
        if values.is_empty() {
            continue;
        }
        let (median, q25, q75) = quantiles(&values);
        rows.push(OddsRow {
            experiment: k + 1,
            median_log10_odds: median,
            q25,
            q75,
        });
    }
    Ok(ModelSelectOutcome {
        rows,
        trials: outcomes,
    })
}

fn float(v: f64) -> String {
    format!("{v:?}")
}

/// Persist a sweep: `sweep.csv`, `meta.json`, and one JSON trace per trial.
pub fn write_sweep_dataset(dir: &Path, outcome: &SweepOutcome, meta: &serde_json::Value) -> Result<()> {
    let mut csv = String::from("experiment_index,median_loss,q25,q75\n");
    for row in &outcome.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            row.experiment,
            float(row.median_loss),
            float(row.q25),
            float(row.q75)
        );
    }
    atomic_write(&dir.join("sweep.csv"), &csv)?;
    atomic_write(
        &dir.join("meta.json"),
        &serde_json::to_string_pretty(meta)?,
    )?;
    for (i, trial) in outcome.trials.iter().enumerate() {
        let path = dir.join("trials").join(format!("trial_{i:04}.json"));
        atomic_write(&path, &serde_json::to_string(trial)?)?;
    }
    Ok(())
}

/// Persist a model-selection sweep: `odds.csv`, `meta.json`, trial traces.
pub fn write_model_select_dataset(
    dir: &Path,
    outcome: &ModelSelectOutcome,
    meta: &serde_json::Value,
) -> Result<()> {
    let mut csv = String::from("experiment_index,median_log10_odds,q25,q75\n");
    for row in &outcome.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            row.experiment,
            float(row.median_log10_odds),
            float(row.q25),
            float(row.q75)
        );
    }
    atomic_write(&dir.join("odds.csv"), &csv)?;
    atomic_write(
        &dir.join("meta.json"),
        &serde_json::to_string_pretty(meta)?,
    )?;
    for (i, trial) in outcome.trials.iter().enumerate() {
        let path = dir.join("trials").join(format!("trial_{i:04}.json"));
        atomic_write(&path, &serde_json::to_string(trial)?)?;
    }
    Ok(())
}

/// Persist a single run's trace.
pub fn write_run_trace(dir: &Path, trace: &TrialTrace, meta: &serde_json::Value) -> Result<()> {
    atomic_write(&dir.join("trace.json"), &serde_json::to_string_pretty(trace)?)?;
    atomic_write(
        &dir.join("meta.json"),
        &serde_json::to_string_pretty(meta)?,
    )
}

/// Read the value column of an emitted sweep CSV (second column), e.g. for
/// re-fitting decay rates.  Values return bit-identical to what was written.
pub fn read_loss_csv(path: &Path) -> Result<Vec<(usize, f64)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 || line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let experiment: usize = fields
            .next()
            .and_then(|f| f.trim().parse().ok())
            .ok_or_else(|| Error::ParseError {
                line: lineno + 1,
                column: 1,
                message: "bad experiment index".into(),
            })?;
        let value: f64 = fields
            .next()
            .and_then(|f| f.trim().parse().ok())
            .ok_or_else(|| Error::ParseError {
                line: lineno + 1,
                column: 2,
                message: "bad value".into(),
            })?;
        out.push((experiment, value));
    }
    if out.is_empty() {
        return Err(Error::ParseError {
            line: 1,
            column: 1,
            message: "no data rows".into(),
        });
    }
    Ok(out)
}
