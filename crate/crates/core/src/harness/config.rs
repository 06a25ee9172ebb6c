//! JSON-backed configuration for runs, sweeps, model selection, and channel
//! construction.  One file fully determines a computation, including seeds.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channels::{
    lindblad_generator, load_superop, magnus2_propagator, LindbladSpec, PiecewiseGenerator,
    Superoperator,
};
use crate::error::Error;
use crate::likelihood::{LikelihoodMode, Measurement, NoiseConfig, Protocol};
use crate::linalg::{c, CMat};
use crate::models::{FamilyDescriptor, FamilyKind, HamiltonianFamily, ParamPrior, PriorSpec};
use crate::protocols::{InitialStatePolicy, QhlConfig, TruthSource, TruthSpec};
use crate::Result;

/// Prior over the parameter vector: one distribution for every coordinate,
/// or an explicit per-parameter list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorConfig {
    Uniform { lo: f64, hi: f64 },
    Gaussian { mean: f64, sd: f64 },
    PerParameter(Vec<ParamPrior>),
}

impl PriorConfig {
    fn to_spec(&self, d: usize) -> Result<PriorSpec> {
        let spec = match self {
            PriorConfig::Uniform { lo, hi } => PriorSpec::uniform(d, *lo, *hi),
            PriorConfig::Gaussian { mean, sd } => PriorSpec(vec![
                ParamPrior::Gaussian {
                    mean: *mean,
                    sd: *sd
                };
                d
            ]),
            PriorConfig::PerParameter(list) => PriorSpec(list.clone()),
        };
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub kind: FamilyKind,
    pub n: usize,
    pub prior: PriorConfig,
}

impl FamilyConfig {
    pub fn to_family(&self) -> Result<HamiltonianFamily> {
        let desc = FamilyDescriptor::new(self.kind, self.n)?;
        let prior = self.prior.to_spec(desc.param_count())?;
        HamiltonianFamily::new(self.kind, self.n, prior)
    }
}

/// The data-generating system.  Defaults to the inference family; `params`
/// pins the truth, otherwise it is drawn from the truth family's prior.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<f64>>,
}

impl TruthConfig {
    fn to_spec(&self, inference: &FamilyConfig) -> Result<TruthSpec> {
        let family = self.family.as_ref().unwrap_or(inference).to_family()?;
        let source = match &self.params {
            Some(x) => TruthSource::Fixed(x.clone()),
            None => TruthSource::SampledFromPrior,
        };
        Ok(TruthSpec { family, source })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseFileConfig {
    #[serde(default)]
    pub depolarizing: f64,
    /// Path to a channel file, relative to the configuration file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<PathBuf>,
    #[serde(default = "default_true")]
    pub assumed_known: bool,
}

impl Default for NoiseFileConfig {
    fn default() -> Self {
        NoiseFileConfig {
            depolarizing: 0.0,
            channel: None,
            assumed_known: true,
        }
    }
}

fn default_true() -> bool {
    true
}

impl NoiseFileConfig {
    pub fn to_noise(&self, base_dir: &Path) -> Result<NoiseConfig> {
        let mut noise = NoiseConfig {
            depolarizing: self.depolarizing,
            swap_channel: None,
            assumed_known: self.assumed_known,
        };
        noise.validate()?;
        if let Some(rel) = &self.channel {
            let path = if rel.is_absolute() {
                rel.clone()
            } else {
                base_dir.join(rel)
            };
            noise = noise.with_channel(load_superop(&path)?)?;
        }
        Ok(noise)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResampleConfig {
    #[serde(default = "default_resample_a")]
    pub a: f64,
    #[serde(default = "default_resample_threshold")]
    pub threshold: f64,
}

fn default_resample_a() -> f64 {
    0.9
}

fn default_resample_threshold() -> f64 {
    0.5
}

impl Default for ResampleConfig {
    fn default() -> Self {
        ResampleConfig {
            a: default_resample_a(),
            threshold: default_resample_threshold(),
        }
    }
}

fn default_protocol() -> Protocol {
    Protocol::Iqle
}

fn default_mode() -> LikelihoodMode {
    LikelihoodMode::Exact
}

fn default_initial_state() -> InitialStatePolicy {
    InitialStatePolicy::PlusAll
}

fn default_measurement() -> Measurement {
    Measurement::TwoOutcome
}

/// One learning run, declaratively.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: FamilyConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<TruthConfig>,
    pub particles: usize,
    pub experiments: usize,
    #[serde(default = "default_protocol")]
    pub protocol: Protocol,
    #[serde(default = "default_mode")]
    pub likelihood: LikelihoodMode,
    #[serde(default)]
    pub noise: NoiseFileConfig,
    #[serde(default)]
    pub resample: ResampleConfig,
    #[serde(default = "default_initial_state")]
    pub initial_state: InitialStatePolicy,
    #[serde(default = "default_measurement")]
    pub measurement: Measurement,
    pub seed: u64,
}

impl RunConfig {
    /// Materialize the runtime configuration; channel paths resolve against
    /// `base_dir` (normally the config file's directory).
    pub fn to_qhl_config(&self, base_dir: &Path) -> Result<QhlConfig> {
        let family = self.family.to_family()?;
        let truth = self
            .truth
            .clone()
            .unwrap_or_default()
            .to_spec(&self.family)?;
        let cfg = QhlConfig {
            family,
            truth,
            particles: self.particles,
            experiments: self.experiments,
            protocol: self.protocol,
            mode: self.likelihood,
            noise: self.noise.to_noise(base_dir)?,
            resample_a: self.resample.a,
            resample_threshold: self.resample.threshold,
            initial_state: self.initial_state,
            measurement: self.measurement,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// A batch of identical runs over derived trial seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub run: RunConfig,
    pub trials: usize,
}

impl SweepConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Dual-model comparison: two families against one simulated system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSelectConfig {
    pub truth: TruthConfig,
    pub null_model: FamilyConfig,
    pub alt_model: FamilyConfig,
    pub particles: usize,
    pub experiments: usize,
    #[serde(default = "default_protocol")]
    pub protocol: Protocol,
    #[serde(default = "default_mode")]
    pub likelihood: LikelihoodMode,
    #[serde(default)]
    pub noise: NoiseFileConfig,
    #[serde(default)]
    pub resample: ResampleConfig,
    #[serde(default = "default_initial_state")]
    pub initial_state: InitialStatePolicy,
    #[serde(default = "default_measurement")]
    pub measurement: Measurement,
    pub trials: usize,
    pub seed: u64,
}

impl ModelSelectConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// The truth config must name its family explicitly here (there is no
    /// single inference family to default to).
    pub fn to_model_configs(
        &self,
        base_dir: &Path,
        trial_seed: u64,
    ) -> Result<(QhlConfig, QhlConfig)> {
        let truth_family_cfg = self.truth.family.as_ref().ok_or_else(|| {
            Error::InvalidConfig("model selection requires an explicit truth family".into())
        })?;
        let truth = self.truth.to_spec(truth_family_cfg)?;
        let noise = self.noise.to_noise(base_dir)?;
        let make = |family_cfg: &FamilyConfig, seed_tag: u64| -> Result<QhlConfig> {
            let cfg = QhlConfig {
                family: family_cfg.to_family()?,
                truth: truth.clone(),
                particles: self.particles,
                experiments: self.experiments,
                protocol: self.protocol,
                mode: self.likelihood,
                noise: noise.clone(),
                resample_a: self.resample.a,
                resample_threshold: self.resample.threshold,
                initial_state: self.initial_state,
                measurement: self.measurement,
                seed: crate::seeds::mix(trial_seed, &[seed_tag]),
            };
            cfg.validate()?;
            Ok(cfg)
        };
        Ok((
            make(&self.null_model, crate::seeds::tag::MODEL_NULL)?,
            make(&self.alt_model, crate::seeds::tag::MODEL_ALT)?,
        ))
    }
}

/// Complex matrix as JSON: rows of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

fn matrix_from_json(m: &MatrixJson) -> Result<CMat> {
    let rows = m.len();
    if rows == 0 {
        return Err(Error::InvalidConfig("empty matrix".into()));
    }
    let cols = m[0].len();
    if m.iter().any(|row| row.len() != cols) {
        return Err(Error::InvalidConfig("ragged matrix rows".into()));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| {
        c(m[i][j][0], m[i][j][1])
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollapseConfig {
    pub operator: MatrixJson,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentConfig {
    pub hamiltonian: MatrixJson,
    #[serde(default)]
    pub collapse: Vec<CollapseConfig>,
    pub duration: f64,
}

/// Build a channel by propagating a piecewise-constant master equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelBuildConfig {
    pub segments: Vec<SegmentConfig>,
    #[serde(default = "default_true")]
    pub trace_preserving: bool,
    #[serde(default)]
    pub completely_positive: bool,
}

impl ChannelBuildConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Propagate the configured schedule into a channel, validating any claimed
/// structural flags.
pub fn build_channel(cfg: &ChannelBuildConfig) -> Result<Superoperator> {
    let mut segments = Vec::with_capacity(cfg.segments.len());
    for seg in &cfg.segments {
        let spec = LindbladSpec {
            hamiltonian: matrix_from_json(&seg.hamiltonian)?,
            collapse: seg
                .collapse
                .iter()
                .map(|col| Ok((matrix_from_json(&col.operator)?, col.rate)))
                .collect::<Result<Vec<_>>>()?,
        };
        segments.push((lindblad_generator(&spec)?, seg.duration));
    }
    let prop = magnus2_propagator(&PiecewiseGenerator::new(segments)?)?;
    Superoperator::with_flags(
        prop.matrix().clone(),
        cfg.trace_preserving,
        cfg.completely_positive,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn fig2_style_json() -> String {
        format!(
            r#"{{
  "family": {{"kind": "ising-line", "n": 4,
              "prior": {{"uniform": {{"lo": {}, "hi": {}}}}}}},
  "particles": 5000,
  "experiments": 100,
  "seed": 42
}}"#,
            -1.0 / PI,
            1.0 / PI
        )
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::from_json(&fig2_style_json()).unwrap();
        assert_eq!(cfg.protocol, Protocol::Iqle);
        assert_eq!(cfg.likelihood, LikelihoodMode::Exact);
        assert_eq!(cfg.measurement, Measurement::TwoOutcome);
        assert_eq!(cfg.resample.a, 0.9);
        assert_eq!(cfg.resample.threshold, 0.5);
        assert!(cfg.noise.assumed_known);

        let qhl = cfg.to_qhl_config(Path::new(".")).unwrap();
        assert_eq!(qhl.family.param_count(), 3);
        assert_eq!(qhl.truth.family, qhl.family);
        assert!(matches!(qhl.truth.source, TruthSource::SampledFromPrior));
    }

    #[test]
    fn sampled_mode_and_fixed_truth_roundtrip() {
        let text = r#"{
  "family": {"kind": "ti-transverse-ising", "n": 2,
             "prior": {"uniform": {"lo": 0.0, "hi": 1.0}}},
  "truth": {"params": [0.3, 0.7]},
  "particles": 100,
  "experiments": 10,
  "likelihood": {"sampled": {"n_samp": 160}},
  "initial_state": "random-clifford-each-experiment",
  "measurement": "product-basis",
  "resample": {"a": 0.98, "threshold": 0.5},
  "seed": 7
}"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert_eq!(cfg.likelihood, LikelihoodMode::Sampled { n_samp: 160 });
        let qhl = cfg.to_qhl_config(Path::new(".")).unwrap();
        assert_eq!(qhl.truth.source, TruthSource::Fixed(vec![0.3, 0.7]));
        assert_eq!(
            qhl.initial_state,
            InitialStatePolicy::RandomCliffordEachExperiment
        );

        let echoed = serde_json::to_string(&cfg).unwrap();
        let back = RunConfig::from_json(&echoed).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn per_parameter_priors_must_match_dimension() {
        let text = r#"{
  "family": {"kind": "ising-line", "n": 3,
             "prior": {"per_parameter": [{"uniform": {"lo": -0.5, "hi": 0.5}}]}},
  "particles": 10,
  "experiments": 1,
  "seed": 1
}"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert!(cfg.to_qhl_config(Path::new(".")).is_err());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{
  "family": {"kind": "ising-line", "n": 3, "prior": {"uniform": {"lo": -0.5, "hi": 0.5}}},
  "particles": 10,
  "experiments": 1,
  "seed": 1,
  "typo_field": true
}"#;
        assert!(RunConfig::from_json(text).is_err());
    }

    #[test]
    fn channel_build_produces_valid_swap_noise() {
        // The two-qubit exchange Hamiltonian whose t = 1 propagator is SWAP,
        // plus weak dephasing on each qubit.
        let sz = [[1.0, 0.0], [-1.0, 0.0]];
        let mut ham = vec![vec![[0.0; 2]; 4]; 4];
        // (π/4)(XX + YY + ZZ − I) in the computational basis.
        let q = PI / 4.0;
        ham[0][0] = [0.0, 0.0];
        ham[1][1] = [-2.0 * q, 0.0];
        ham[1][2] = [2.0 * q, 0.0];
        ham[2][1] = [2.0 * q, 0.0];
        ham[2][2] = [-2.0 * q, 0.0];
        ham[3][3] = [0.0, 0.0];

        let mut z1 = vec![vec![[0.0; 2]; 4]; 4];
        for i in 0..4 {
            z1[i][i] = [sz[i / 2][0] as f64, 0.0];
        }
        let cfg = ChannelBuildConfig {
            segments: vec![SegmentConfig {
                hamiltonian: ham,
                collapse: vec![CollapseConfig {
                    operator: z1,
                    rate: 0.02,
                }],
                duration: 1.0,
            }],
            trace_preserving: true,
            completely_positive: true,
        };
        let chan = build_channel(&cfg).unwrap();
        assert_eq!(chan.dim_in(), 16);
        assert!(chan.trace_preserving);

        // Nearly a swap: the dephasing is weak.
        let ideal = crate::channels::unitary_superop(&crate::channels::swap_unitary());
        let dev = crate::linalg::max_abs_diff(chan.matrix(), ideal.matrix());
        assert!(dev < 0.2, "deviation from ideal swap {dev}");
        assert!(dev > 1e-6, "noise should leave a visible mark");
    }

    #[test]
    fn channel_build_rejects_ragged_matrices() {
        let cfg = ChannelBuildConfig {
            segments: vec![SegmentConfig {
                hamiltonian: vec![vec![[0.0; 2]; 2], vec![[0.0; 2]; 3]],
                collapse: vec![],
                duration: 1.0,
            }],
            trace_preserving: false,
            completely_positive: false,
        };
        assert!(matches!(
            build_channel(&cfg),
            Err(Error::InvalidConfig(_))
        ));
    }
}
