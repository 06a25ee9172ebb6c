//! The learning protocols: the sequential QHL loop (adaptive design →
//! simulated experiment → Bayes update → conditional resample), marginal
//! likelihood accumulation, and dual-model selection by posterior odds with
//! role switching.

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::likelihood::{
    estimate_likelihoods, outcome_distribution, sample_outcome, ExperimentDesign, InitialState,
    Inversion, LikelihoodMode, Measurement, NoiseConfig, OutcomeDatum, Protocol,
};
use crate::models::{hamiltonian_distance, FamilyDescriptor, HamiltonianFamily};
use crate::seeds::{self, tag};
use crate::smc::{
    bayes_update, effective_sample_size, init_cloud, liu_west_resample, posterior_summary,
    ParticleCloud,
};
use crate::Result;

/// Where the data-generating parameters come from.
#[derive(Debug, Clone, PartialEq)]
pub enum TruthSource {
    /// Draw once from the truth family's prior at run start.
    SampledFromPrior,
    Fixed(Vec<f64>),
}

/// The untrusted system being learned: its family (possibly different from
/// the inference family) and its parameter source.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthSpec {
    pub family: HamiltonianFamily,
    pub source: TruthSource,
}

/// Probe preparation policy across experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialStatePolicy {
    PlusAll,
    /// A fresh random local Clifford state every experiment.
    RandomCliffordEachExperiment,
}

/// Full specification of one learning run.
#[derive(Debug, Clone)]
pub struct QhlConfig {
    /// Family the particle cloud lives in.
    pub family: HamiltonianFamily,
    pub truth: TruthSpec,
    /// Particle count M (≥ 2: experiment design draws particle pairs).
    pub particles: usize,
    /// Number of experiments N.
    pub experiments: usize,
    pub protocol: Protocol,
    pub mode: LikelihoodMode,
    pub noise: NoiseConfig,
    /// Liu–West mixing parameter a ∈ (0, 1].
    pub resample_a: f64,
    /// Resample when ESS drops below this fraction of M.
    pub resample_threshold: f64,
    pub initial_state: InitialStatePolicy,
    pub measurement: Measurement,
    pub seed: u64,
}

impl QhlConfig {
    pub fn validate(&self) -> Result<()> {
        if self.particles < 2 {
            return Err(Error::InvalidConfig(
                "need at least two particles for experiment design".into(),
            ));
        }
        if self.experiments == 0 {
            return Err(Error::InvalidConfig("need at least one experiment".into()));
        }
        if !(self.resample_a > 0.0 && self.resample_a <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "resample parameter a = {} outside (0, 1]",
                self.resample_a
            )));
        }
        if !(0.0..=1.0).contains(&self.resample_threshold) {
            return Err(Error::InvalidConfig(format!(
                "resample threshold {} outside [0, 1]",
                self.resample_threshold
            )));
        }
        if self.family.n() != self.truth.family.n() {
            return Err(Error::InvalidConfig(
                "inference and truth families must share the qubit count".into(),
            ));
        }
        if let TruthSource::Fixed(x) = &self.truth.source {
            if x.len() != self.truth.family.param_count() {
                return Err(Error::dims(format!(
                    "fixed truth has {} parameters, family takes {}",
                    x.len(),
                    self.truth.family.param_count()
                )));
            }
        }
        self.noise.validate()
    }
}

/// Everything recorded about one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub index: usize,
    pub design: ExperimentDesign,
    pub outcome: OutcomeDatum,
    /// Quadratic loss of the posterior mean against the truth, on the shared
    /// leading coordinates when dimensions differ.
    pub loss: f64,
    pub log_evidence_increment: f64,
    /// Effective sample size before the Bayes update.
    pub ess_before: f64,
    pub resampled: bool,
    pub posterior_mean: Vec<f64>,
}

/// The full record of one learning run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialTrace {
    pub records: Vec<ExperimentRecord>,
    /// Posterior-mean estimate when the run ended.
    pub final_estimate: Vec<f64>,
    pub x_true: Vec<f64>,
    /// True when the run stopped early on an unrecoverable zero-evidence
    /// datum; the trace is then shorter than requested.
    pub aborted: bool,
}

impl TrialTrace {
    /// Loss at each experiment index.
    pub fn losses(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.loss).collect()
    }
}

/// Cumulative log marginal likelihood log Pr(D₁…D_k | model) per experiment:
/// the running sum of the per-update normalization constants.
pub fn marginal_likelihood_trace(trace: &TrialTrace) -> Vec<f64> {
    trace
        .records
        .iter()
        .scan(0.0, |acc, r| {
            *acc += r.log_evidence_increment;
            Some(*acc)
        })
        .collect()
}

/// Asymptotic marginal-likelihood approximation
/// `max log-likelihood − (d/2)·ln N` (natural log); a diagnostic for
/// comparing model dimensions.
pub fn bic_score(max_loglik: f64, d: usize, n: usize) -> f64 {
    assert!(n >= 1, "need at least one datum");
    max_loglik - 0.5 * d as f64 * (n as f64).ln()
}

/// The particle guess heuristic: draw two distinct particles by weight and
/// set `t = 1 / ‖H(x₋) − H(x′)‖`.  The second particle is redrawn (up to 50
/// attempts) while it coincides with the first.
pub fn particle_guess(
    cloud: &ParticleCloud,
    family: &FamilyDescriptor,
    rng: &mut ChaCha12Rng,
) -> Result<(Vec<f64>, f64)> {
    let x_minus = cloud.location(cloud.sample_index(rng)).to_vec();
    for _ in 0..50 {
        let other = cloud.location(cloud.sample_index(rng));
        let dist = hamiltonian_distance(family, &x_minus, other)?;
        if dist >= 1e-12 {
            return Ok((x_minus, 1.0 / dist));
        }
    }
    Err(Error::DegenerateCloud)
}

fn prefix_loss(estimate: &[f64], truth: &[f64]) -> f64 {
    let shared = estimate.len().min(truth.len());
    estimate[..shared]
        .iter()
        .zip(&truth[..shared])
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

/// One learning run, stepped experiment by experiment.  Use
/// [`QhlEngine::with_cloud`] to pin the particle cloud and truth for
/// controlled studies.
pub struct QhlEngine {
    config: QhlConfig,
    truth_params: Vec<f64>,
    cloud: ParticleCloud,
    design_rng: ChaCha12Rng,
    truth_rng: ChaCha12Rng,
    resample_rng: ChaCha12Rng,
    records: Vec<ExperimentRecord>,
    aborted: bool,
    lik_nonce: u64,
}

impl QhlEngine {
    pub fn new(config: QhlConfig) -> Result<Self> {
        config.validate()?;
        let mut truth_rng = seeds::stream(config.seed, &[tag::TRUTH]);
        let truth_params = match &config.truth.source {
            TruthSource::Fixed(x) => x.clone(),
            TruthSource::SampledFromPrior => config.truth.family.sample_prior(&mut truth_rng),
        };
        let mut init_rng = seeds::stream(config.seed, &[tag::CLOUD_INIT]);
        let cloud = init_cloud(&config.family, config.particles, &mut init_rng);
        Self::assemble(config, cloud, truth_params, truth_rng)
    }

    /// Start from an explicit cloud and truth instead of prior draws.
    pub fn with_cloud(
        config: QhlConfig,
        cloud: ParticleCloud,
        truth_params: Vec<f64>,
    ) -> Result<Self> {
        config.validate()?;
        if cloud.param_dim() != config.family.param_count() {
            return Err(Error::dims(format!(
                "cloud dimension {} vs family parameter count {}",
                cloud.param_dim(),
                config.family.param_count()
            )));
        }
        if truth_params.len() != config.truth.family.param_count() {
            return Err(Error::dims(format!(
                "truth has {} parameters, family takes {}",
                truth_params.len(),
                config.truth.family.param_count()
            )));
        }
        let truth_rng = seeds::stream(config.seed, &[tag::TRUTH]);
        Self::assemble(config, cloud, truth_params, truth_rng)
    }

    fn assemble(
        config: QhlConfig,
        cloud: ParticleCloud,
        truth_params: Vec<f64>,
        truth_rng: ChaCha12Rng,
    ) -> Result<Self> {
        let design_rng = seeds::stream(config.seed, &[tag::DESIGN]);
        let resample_rng = seeds::stream(config.seed, &[tag::RESAMPLE]);
        Ok(QhlEngine {
            config,
            truth_params,
            cloud,
            design_rng,
            truth_rng,
            resample_rng,
            records: Vec::new(),
            aborted: false,
        lik_nonce: 0,
        })
    }

    pub fn cloud(&self) -> &ParticleCloud {
        &self.cloud
    }

    pub fn truth_params(&self) -> &[f64] {
        &self.truth_params
    }

    pub fn records(&self) -> &[ExperimentRecord] {
        &self.records
    }

    fn propose_design(&mut self) -> Result<ExperimentDesign> {
        let (x_minus, t) = particle_guess(
            &self.cloud,
            &self.config.family.descriptor(),
            &mut self.design_rng,
        )?;
        let initial = match self.config.initial_state {
            InitialStatePolicy::PlusAll => InitialState::PlusAll,
            InitialStatePolicy::RandomCliffordEachExperiment => InitialState::RandomLocalClifford {
                seed: self.design_rng.gen(),
            },
        };
        match self.config.protocol {
            Protocol::Iqle => ExperimentDesign::iqle(
                t,
                Inversion {
                    family: self.config.family.descriptor(),
                    params: x_minus,
                },
                initial,
                self.config.measurement,
            ),
            Protocol::Qle => ExperimentDesign::qle(t, initial, self.config.measurement),
        }
    }

    fn try_step(&mut self) -> Result<ExperimentRecord> {
        let design = self.propose_design()?;
        let ess_before = effective_sample_size(&self.cloud);

        let truth_dist = outcome_distribution(
            &self.truth_params,
            &design,
            &self.config.noise,
            &self.config.truth.family.descriptor(),
        )?;
        let outcome = sample_outcome(&truth_dist, &mut self.truth_rng);

        let assumed = self.config.noise.as_assumed();
        let nonce = self.lik_nonce;
        self.lik_nonce += 1;
        let likelihoods = estimate_likelihoods(
            self.cloud.locations_flat(),
            self.cloud.param_dim(),
            outcome,
            &design,
            &assumed,
            &self.config.family.descriptor(),
            self.config.mode,
            seeds::mix(self.config.seed, &[tag::SAMPLED_LIKELIHOOD, nonce]),
        )?;

        let (updated, z) = bayes_update(&self.cloud, &likelihoods)?;
        let mut cloud = updated;
        let resampled =
            effective_sample_size(&cloud) < self.config.resample_threshold * cloud.len() as f64;
        if resampled {
            cloud = liu_west_resample(&cloud, self.config.resample_a, &mut self.resample_rng)?;
        }

        let summary = posterior_summary(&cloud);
        let posterior_mean: Vec<f64> = summary.mean.iter().copied().collect();
        let record = ExperimentRecord {
            index: self.records.len(),
            design,
            outcome,
            loss: prefix_loss(&posterior_mean, &self.truth_params),
            log_evidence_increment: z.ln(),
            ess_before,
            resampled,
            posterior_mean,
        };
        self.cloud = cloud;
        Ok(record)
    }

    /// Run one experiment.  A zero-evidence datum is retried once with a
    /// fresh design; a second failure marks the run aborted and surfaces the
    /// error.
    pub fn step(&mut self) -> Result<&ExperimentRecord> {
        let record = match self.try_step() {
            Err(Error::ZeroEvidence) => match self.try_step() {
                Err(Error::ZeroEvidence) => {
                    self.aborted = true;
                    return Err(Error::ZeroEvidence);
                }
                other => other?,
            },
            other => other?,
        };
        self.records.push(record);
        Ok(self.records.last().expect("just pushed"))
    }

    /// Consume the engine, producing the trial trace.  Ends early with the
    /// aborted flag set if a datum stays impossible after the retry.
    pub fn run(mut self) -> Result<TrialTrace> {
        while self.records.len() < self.config.experiments {
            match self.step() {
                Ok(_) => {}
                Err(Error::ZeroEvidence) => break,
                Err(e) => return Err(e),
            }
        }
        let final_estimate = posterior_summary(&self.cloud).mean.iter().copied().collect();
        Ok(TrialTrace {
            records: self.records,
            final_estimate,
            x_true: self.truth_params,
            aborted: self.aborted,
        })
    }
}

/// Execute a full learning run.
pub fn qhl_run(config: QhlConfig) -> Result<TrialTrace> {
    QhlEngine::new(config)?.run()
}

/// Which model currently drives experiment design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Null,
    Alternate,
}

/// Per-experiment record of a dual-model run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OddsRecord {
    pub index: usize,
    /// Who designed this experiment.
    pub driver: Role,
    pub log_z_null: f64,
    pub log_z_alt: f64,
    /// Cumulative log posterior odds, log Pr(D|alt) − log Pr(D|null).
    pub cum_log_odds: f64,
    pub loss_null: f64,
    pub loss_alt: f64,
    pub resampled_null: bool,
    pub resampled_alt: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSelectTrace {
    pub records: Vec<OddsRecord>,
    pub x_true: Vec<f64>,
    pub aborted: bool,
}

impl ModelSelectTrace {
    pub fn final_log_odds(&self) -> Option<f64> {
        self.records.last().map(|r| r.cum_log_odds)
    }
}

struct Chain {
    config: QhlConfig,
    cloud: ParticleCloud,
    resample_rng: ChaCha12Rng,
    cum_log_evidence: f64,
}

impl Chain {
    fn new(config: &QhlConfig) -> Result<Self> {
        config.validate()?;
        let mut init_rng = seeds::stream(config.seed, &[tag::CLOUD_INIT]);
        let cloud = init_cloud(&config.family, config.particles, &mut init_rng);
        Ok(Chain {
            config: config.clone(),
            cloud,
            resample_rng: seeds::stream(config.seed, &[tag::RESAMPLE]),
            cum_log_evidence: 0.0,
        })
    }

    /// Candidate update for one shared datum; nothing is committed here.
    fn propose_update(
        &self,
        design: &ExperimentDesign,
        outcome: OutcomeDatum,
        nonce: u64,
    ) -> Result<(ParticleCloud, f64)> {
        let assumed = self.config.noise.as_assumed();
        let likelihoods = estimate_likelihoods(
            self.cloud.locations_flat(),
            self.cloud.param_dim(),
            outcome,
            design,
            &assumed,
            &self.config.family.descriptor(),
            self.config.mode,
            seeds::mix(self.config.seed, &[tag::SAMPLED_LIKELIHOOD, nonce]),
        )?;
        bayes_update(&self.cloud, &likelihoods)
    }

    fn commit(&mut self, updated: ParticleCloud, z: f64) -> Result<(bool, f64, f64)> {
        let mut cloud = updated;
        let resampled = effective_sample_size(&cloud)
            < self.config.resample_threshold * cloud.len() as f64;
        if resampled {
            cloud = liu_west_resample(&cloud, self.config.resample_a, &mut self.resample_rng)?;
        }
        self.cloud = cloud;
        self.cum_log_evidence += z.ln();
        Ok((resampled, z.ln(), self.cum_log_evidence))
    }
}

fn check_shared_settings(null: &QhlConfig, alt: &QhlConfig) -> Result<()> {
    if null.truth != alt.truth {
        return Err(Error::InvalidConfig(
            "both models must target the same untrusted system".into(),
        ));
    }
    let same_channel = match (&null.noise.swap_channel, &alt.noise.swap_channel) {
        (None, None) => true,
        (Some(a), Some(b)) => a.matrix() == b.matrix(),
        _ => false,
    };
    if null.protocol != alt.protocol
        || null.measurement != alt.measurement
        || null.initial_state != alt.initial_state
        || null.mode != alt.mode
        || null.experiments != alt.experiments
        || null.noise.depolarizing != alt.noise.depolarizing
        || null.noise.assumed_known != alt.noise.assumed_known
        || !same_channel
    {
        return Err(Error::InvalidConfig(
            "model-selection runs must share protocol, measurement, probe policy, \
             likelihood mode, experiment count, and noise"
                .into(),
        ));
    }
    Ok(())
}

/// Run two models against the same simulated system and accumulate their
/// posterior odds.
///
/// Each experiment is designed by the current role-holder's cloud, one
/// outcome is drawn from the truth, and both clouds absorb it.  Roles switch
/// on the sign of the cumulative log odds (strict inequality, ties keep the
/// incumbent).  Design starts with the lower-dimensional model — the reduced
/// model is the natural null — which also keeps the procedure symmetric
/// under exchanging the two configurations.
pub fn model_select_run(
    config_null: &QhlConfig,
    config_alt: &QhlConfig,
    n_exp: usize,
    seed: u64,
) -> Result<ModelSelectTrace> {
    check_shared_settings(config_null, config_alt)?;
    let mut design_rng = seeds::stream(seed, &[tag::DESIGN]);
    let mut truth_rng = seeds::stream(seed, &[tag::TRUTH]);

    let truth_family = config_null.truth.family.clone();
    let x_true = match &config_null.truth.source {
        TruthSource::Fixed(x) => x.clone(),
        TruthSource::SampledFromPrior => truth_family.sample_prior(&mut truth_rng),
    };

    let mut null = Chain::new(config_null)?;
    let mut alt = Chain::new(config_alt)?;

    let mut driver = if alt.config.family.param_count() < null.config.family.param_count() {
        Role::Alternate
    } else {
        Role::Null
    };

    let mut records = Vec::with_capacity(n_exp);
    let mut aborted = false;
    let mut nonce: u64 = 0;

    'outer: for index in 0..n_exp {
        let mut attempt = 0;
        let (design, outcome, null_up, alt_up) = loop {
            attempt += 1;
            let driving = match driver {
                Role::Null => &null,
                Role::Alternate => &alt,
            };
            let (x_minus, t) = particle_guess(
                &driving.cloud,
                &driving.config.family.descriptor(),
                &mut design_rng,
            )?;
            let initial = match config_null.initial_state {
                InitialStatePolicy::PlusAll => InitialState::PlusAll,
                InitialStatePolicy::RandomCliffordEachExperiment => {
                    InitialState::RandomLocalClifford {
                        seed: design_rng.gen(),
                    }
                }
            };
            let design = match config_null.protocol {
                Protocol::Iqle => ExperimentDesign::iqle(
                    t,
                    Inversion {
                        family: driving.config.family.descriptor(),
                        params: x_minus,
                    },
                    initial,
                    config_null.measurement,
                )?,
                Protocol::Qle => {
                    ExperimentDesign::qle(t, initial, config_null.measurement)?
                }
            };
            let truth_dist = outcome_distribution(
                &x_true,
                &design,
                &config_null.noise,
                &truth_family.descriptor(),
            )?;
            let outcome = sample_outcome(&truth_dist, &mut truth_rng);

            let this_nonce = nonce;
            nonce += 1;
            let null_up = null.propose_update(&design, outcome, this_nonce);
            let alt_up = alt.propose_update(&design, outcome, this_nonce);
            match (null_up, alt_up) {
                (Ok(n), Ok(a)) => break (design, outcome, n, a),
                (Err(Error::ZeroEvidence), _) | (_, Err(Error::ZeroEvidence)) if attempt == 1 => {
                    continue;
                }
                (Err(Error::ZeroEvidence), _) | (_, Err(Error::ZeroEvidence)) => {
                    aborted = true;
                    break 'outer;
                }
                (Err(e), _) | (_, Err(e)) => return Err(e),
            }
        };
        let _ = (design, outcome);

        let (resampled_null, log_z_null, cum_null) = null.commit(null_up.0, null_up.1)?;
        let (resampled_alt, log_z_alt, cum_alt) = alt.commit(alt_up.0, alt_up.1)?;
        let cum_log_odds = cum_alt - cum_null;

        let mean_null: Vec<f64> = posterior_summary(&null.cloud).mean.iter().copied().collect();
        let mean_alt: Vec<f64> = posterior_summary(&alt.cloud).mean.iter().copied().collect();
        records.push(OddsRecord {
            index,
            driver,
            log_z_null,
            log_z_alt,
            cum_log_odds,
            loss_null: prefix_loss(&mean_null, &x_true),
            loss_alt: prefix_loss(&mean_alt, &x_true),
            resampled_null,
            resampled_alt,
        });

        if cum_log_odds > 0.0 {
            driver = Role::Alternate;
        } else if cum_log_odds < 0.0 {
            driver = Role::Null;
        }
    }

    Ok(ModelSelectTrace {
        records,
        x_true,
        aborted,
    })
}
