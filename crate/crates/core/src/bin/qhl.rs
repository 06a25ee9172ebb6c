//! Command-line front end: runs, sweeps, model selection, channel
//! construction, and decay-rate fits, all driven by JSON recipe files.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use qhl_core::channels::save_superop;
use qhl_core::harness::{
    build_channel, fit_gamma, model_select_sweep, read_loss_csv, run_sweep,
    write_model_select_dataset, write_run_trace, write_sweep_dataset, ChannelBuildConfig,
    ModelSelectConfig, RunConfig, SweepConfig,
};
use qhl_core::protocols::{marginal_likelihood_trace, qhl_run};
use qhl_core::Error;

#[derive(Parser)]
#[command(
    name = "qhl",
    version,
    about = "Sequential Monte Carlo learning of Hamiltonian parameters with simulated quantum likelihoods"
)]
struct Cli {
    /// Worker threads (default: the QHL_THREADS environment variable, then
    /// all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one learning run and write its trace.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for trace.json and meta.json.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a batch of trials and aggregate per-experiment loss quantiles.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the trial count.
        #[arg(long)]
        trials: Option<usize>,
        /// Override the base seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Race two model families against one simulated system and record the
    /// posterior odds.
    Modelselect {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Build a channel file by propagating a Lindblad schedule.
    ChannelBuild {
        #[arg(long)]
        config: PathBuf,
        /// Destination channel file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit loss(N) ≈ A·e^(-γN) to the value column of an emitted CSV.
    FitGamma {
        #[arg(long)]
        data: PathBuf,
        /// First experiment number of the fit range (1-based, inclusive).
        #[arg(long)]
        from: Option<usize>,
        /// Last experiment number of the fit range (inclusive).
        #[arg(long)]
        to: Option<usize>,
    },
}

fn base_dir(config_path: &Path) -> PathBuf {
    config_path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn thread_count(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| {
        std::env::var("QHL_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
}

fn run(cli: Cli) -> qhl_core::Result<()> {
    if let Some(threads) = thread_count(cli.threads) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    }

    match cli.command {
        Command::Run { config, out, seed } => {
            let mut run_cfg = RunConfig::load(&config)?;
            if let Some(seed) = seed {
                run_cfg.seed = seed;
            }
            let qhl_cfg = run_cfg.to_qhl_config(&base_dir(&config))?;
            let trace = qhl_run(qhl_cfg)?;
            let meta = json!({
                "config": run_cfg,
                "source": config.display().to_string(),
            });
            write_run_trace(&out, &trace, &meta)?;
            let log_evidence = marginal_likelihood_trace(&trace).last().copied();
            println!(
                "{}",
                json!({
                    "experiments": trace.records.len(),
                    "final_loss": trace.records.last().map(|r| r.loss),
                    "log_evidence": log_evidence,
                    "aborted": trace.aborted,
                    "out": out.join("trace.json").display().to_string(),
                })
            );
        }
        Command::Sweep {
            config,
            out,
            trials,
            seed,
        } => {
            let mut sweep_cfg = SweepConfig::load(&config)?;
            if let Some(trials) = trials {
                sweep_cfg.trials = trials;
            }
            if let Some(seed) = seed {
                sweep_cfg.run.seed = seed;
            }
            let qhl_cfg = sweep_cfg.run.to_qhl_config(&base_dir(&config))?;
            let base_seed = sweep_cfg.run.seed;
            let outcome = run_sweep(&qhl_cfg, sweep_cfg.trials, base_seed)?;
            let failed = outcome
                .trials
                .iter()
                .filter(|t| matches!(t, qhl_core::harness::TrialOutcome::Failed { .. }))
                .count();
            let meta = json!({
                "config": sweep_cfg,
                "base_seed": base_seed,
                "band": "interquartile",
                "source": config.display().to_string(),
            });
            write_sweep_dataset(&out, &outcome, &meta)?;
            println!(
                "{}",
                json!({
                    "trials": sweep_cfg.trials,
                    "failed_trials": failed,
                    "rows": outcome.rows.len(),
                    "out": out.join("sweep.csv").display().to_string(),
                })
            );
        }
        Command::Modelselect {
            config,
            out,
            trials,
            seed,
        } => {
            let mut ms_cfg = ModelSelectConfig::load(&config)?;
            if let Some(trials) = trials {
                ms_cfg.trials = trials;
            }
            if let Some(seed) = seed {
                ms_cfg.seed = seed;
            }
            let dir = base_dir(&config);
            let outcome = model_select_sweep(
                |trial_seed| ms_cfg.to_model_configs(&dir, trial_seed),
                ms_cfg.experiments,
                ms_cfg.trials,
                ms_cfg.seed,
            )?;
            let meta = json!({
                "config": ms_cfg,
                "band": "interquartile",
                "source": config.display().to_string(),
            });
            write_model_select_dataset(&out, &outcome, &meta)?;
            println!(
                "{}",
                json!({
                    "trials": ms_cfg.trials,
                    "rows": outcome.rows.len(),
                    "final_median_log10_odds": outcome.rows.last().map(|r| r.median_log10_odds),
                    "out": out.join("odds.csv").display().to_string(),
                })
            );
        }
        Command::ChannelBuild { config, out } => {
            let cfg = ChannelBuildConfig::load(&config)?;
            let channel = build_channel(&cfg)?;
            save_superop(&channel, &out)?;
            println!(
                "{}",
                json!({
                    "dim_in": channel.dim_in(),
                    "dim_out": channel.dim_out(),
                    "trace_preserving": channel.trace_preserving,
                    "completely_positive": channel.completely_positive,
                    "out": out.display().to_string(),
                })
            );
        }
        Command::FitGamma { data, from, to } => {
            let rows = read_loss_csv(&data)?;
            let max_exp = rows.iter().map(|(n, _)| *n).max().unwrap_or(0);
            let mut losses = vec![f64::NAN; max_exp];
            for (n, v) in &rows {
                if *n >= 1 {
                    losses[n - 1] = *v;
                }
            }
            let fit = fit_gamma(&losses, from.unwrap_or(1), to.unwrap_or(max_exp))?;
            println!("{}", serde_json::to_string(&fit)?);
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("{}", json!({ "error": e.to_string(), "kind": e.kind() }));
        std::process::exit(1);
    }
}
