//! Outcome distributions and likelihoods for QLE/IQLE experiments.
//!
//! A QLE experiment evolves a known initial state under `e^{−iH(x)t}` and
//! measures; the interactive variant (IQLE) additionally applies the inverse
//! evolution `e^{+iH(x₋)t}` of a reference model, so a correct hypothesis
//! echoes back to the initial state.  Two measurement coarse-grainings are
//! supported: the two-outcome test {ψ₀, ψ₀⊥} and the full product
//! (computational) basis.
//!
//! Noise enters in two ways, both assumed characterized: a depolarizing
//! mixture applied to the outcome probabilities, and an optional
//! superoperator channel standing in for an imperfect swap between register
//! and simulator, applied between the forward and inverse evolutions.  The
//! channel pathway propagates a density matrix and is limited to two qubits;
//! everything else stays in pure states for speed.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::Superoperator;
use crate::clifford::random_local_clifford_state;
use crate::error::Error;
use crate::linalg::{c, plus_state, CMat, CVec, C64};
use crate::models::{FamilyDescriptor, Hamiltonian};
use crate::seeds;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    Qle,
    Iqle,
}

/// How the probe state is prepared for one experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    /// `|+⟩^{⊗n}`.
    PlusAll,
    /// A random local Clifford applied to |0…0⟩, reproducible from the seed.
    RandomLocalClifford { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measurement {
    /// {|ψ₀⟩⟨ψ₀|, 1 − |ψ₀⟩⟨ψ₀|}: outcome 0 means "returned to the probe".
    TwoOutcome,
    /// All 2ⁿ computational-basis projectors.
    ProductBasis,
}

/// The inverse-evolution reference of an IQLE experiment, kept as family +
/// parameters so designs serialize and can cross model families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inversion {
    pub family: FamilyDescriptor,
    pub params: Vec<f64>,
}

/// One fully specified experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentDesign {
    pub protocol: Protocol,
    /// Evolution time, in inverse-energy units.
    pub t: f64,
    /// Present exactly when `protocol` is IQLE.
    pub inversion: Option<Inversion>,
    pub initial: InitialState,
    pub measurement: Measurement,
}

impl ExperimentDesign {
    pub fn qle(t: f64, initial: InitialState, measurement: Measurement) -> Result<Self> {
        let d = ExperimentDesign {
            protocol: Protocol::Qle,
            t,
            inversion: None,
            initial,
            measurement,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn iqle(
        t: f64,
        inversion: Inversion,
        initial: InitialState,
        measurement: Measurement,
    ) -> Result<Self> {
        let d = ExperimentDesign {
            protocol: Protocol::Iqle,
            t,
            inversion: Some(inversion),
            initial,
            measurement,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t.is_finite() && self.t > 0.0) {
            return Err(Error::InvalidDesign(format!(
                "evolution time must be positive, got {}",
                self.t
            )));
        }
        match (self.protocol, &self.inversion) {
            (Protocol::Qle, None) | (Protocol::Iqle, Some(_)) => Ok(()),
            (Protocol::Qle, Some(_)) => Err(Error::InvalidDesign(
                "QLE designs carry no inverse evolution".into(),
            )),
            (Protocol::Iqle, None) => Err(Error::InvalidDesign(
                "IQLE designs need the inverse-evolution parameters".into(),
            )),
        }
    }
}

/// One recorded measurement outcome: an index into the design's outcome
/// space (0 = ψ₀ for the two-outcome test; the basis index otherwise).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeDatum {
    pub index: usize,
}

/// Characterized noise entering the experiment.
#[derive(Debug, Clone, Default)]
pub struct NoiseConfig {
    /// Depolarizing strength 𝒩 ∈ [0, 1].
    pub depolarizing: f64,
    /// Effective swap channel applied between forward and inverse evolution
    /// (IQLE only); must be trace preserving.
    pub swap_channel: Option<Superoperator>,
    /// When false, the noise acts on the system but the simulator computes
    /// likelihoods as if there were none (a deliberately misspecified run).
    pub assumed_known: bool,
}

impl NoiseConfig {
    pub fn noiseless() -> Self {
        NoiseConfig {
            depolarizing: 0.0,
            swap_channel: None,
            assumed_known: true,
        }
    }

    pub fn depolarizing(strength: f64) -> Result<Self> {
        let cfg = NoiseConfig {
            depolarizing: strength,
            swap_channel: None,
            assumed_known: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_channel(mut self, channel: Superoperator) -> Result<Self> {
        if !channel.is_trace_preserving_within(1e-10) {
            return Err(Error::ChannelFlagViolation(
                "configured swap channel is not trace preserving".into(),
            ));
        }
        self.swap_channel = Some(channel);
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.depolarizing) {
            return Err(Error::StrengthOutOfRange(self.depolarizing));
        }
        Ok(())
    }

    /// The noise the simulator should assume when computing likelihoods.
    pub fn as_assumed(&self) -> NoiseConfig {
        if self.assumed_known {
            self.clone()
        } else {
            NoiseConfig::noiseless()
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.depolarizing == 0.0 && self.swap_channel.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LikelihoodMode {
    Exact,
    Sampled { n_samp: u32 },
}

enum Backend {
    /// Both the particle family and the inversion are diagonal; phases only.
    DiagonalPure {
        /// λ₋(z)·t per basis state (zero for QLE).
        lam_minus_t: DVector<f64>,
        /// |ψ₀(z)|².
        probe_weights: DVector<f64>,
    },
    /// Dense pure-state path with precomputed inverse-evolution pieces.
    DensePure {
        /// `U₋† ψ₀`, so the echo amplitude is one inner product.
        chi: CVec,
        /// Full `U₋ = e^{+iH₋t}`, kept only for product-basis designs.
        u_minus: Option<CMat>,
    },
    /// Density-matrix path through the configured swap channel.
    Density {
        channel: Superoperator,
        u_minus: CMat,
    },
}

/// Everything shared across particles for one experiment: probe state,
/// inverse-evolution data, measurement layout.
pub struct DesignContext {
    family: FamilyDescriptor,
    t: f64,
    psi0: CVec,
    backend: Backend,
    measurement: Measurement,
    dim: usize,
    depolarizing: f64,
}

/// Build the probe state a design asks for.
pub fn initial_state(design: &ExperimentDesign, n_qubits: usize) -> CVec {
    match design.initial {
        InitialState::PlusAll => plus_state(n_qubits),
        InitialState::RandomLocalClifford { seed } => {
            let mut rng = seeds::stream(seed, &[]);
            random_local_clifford_state(n_qubits, &mut rng)
        }
    }
}

impl DesignContext {
    pub fn new(
        design: &ExperimentDesign,
        noise: &NoiseConfig,
        family: &FamilyDescriptor,
    ) -> Result<Self> {
        design.validate()?;
        noise.validate()?;
        let psi0 = initial_state(design, family.n);
        Self::with_probe(design, noise, family, psi0)
    }

    /// As [`DesignContext::new`] but with an explicit probe state; the probe
    /// must live in the family's Hilbert space.
    pub(crate) fn with_probe(
        design: &ExperimentDesign,
        noise: &NoiseConfig,
        family: &FamilyDescriptor,
        psi0: CVec,
    ) -> Result<Self> {
        let dim = family.dim();
        if psi0.len() != dim {
            return Err(Error::dims(format!(
                "probe state has dimension {}, family needs {}",
                psi0.len(),
                dim
            )));
        }
        let inversion = design
            .inversion
            .as_ref()
            .map(|inv| -> Result<Hamiltonian> {
                if inv.family.dim() != dim {
                    return Err(Error::InvalidDesign(format!(
                        "inverse evolution acts on {} dims, system has {}",
                        inv.family.dim(),
                        dim
                    )));
                }
                inv.family.build(&inv.params)
            })
            .transpose()?;

        let backend = if let Some(channel) = &noise.swap_channel {
            if design.protocol == Protocol::Qle {
                return Err(Error::InvalidDesign(
                    "swap channels model the interactive protocol; use IQLE".into(),
                ));
            }
            if family.n > 2 {
                return Err(Error::InvalidDesign(format!(
                    "swap-channel simulation supports at most 2 qubits, got {}",
                    family.n
                )));
            }
            let op_dim = dim * dim;
            if channel.dim_in() != op_dim || channel.dim_out() != op_dim {
                return Err(Error::dims(format!(
                    "swap channel is {}x{}, system needs {}x{}",
                    channel.dim_out(),
                    channel.dim_in(),
                    op_dim,
                    op_dim
                )));
            }
            let h_minus = inversion.expect("IQLE checked above");
            // e^{+iH₋t} = evolve by −t.
            let u_minus = evolution_matrix(&h_minus, -design.t);
            Backend::Density {
                channel: channel.clone(),
                u_minus,
            }
        } else {
            let diag_ok = family.is_diagonal()
                && inversion.as_ref().map_or(true, |h| h.diagonal().is_some());
            if diag_ok {
                let lam_minus_t = match &inversion {
                    Some(h) => h.diagonal().expect("checked diagonal") * design.t,
                    None => DVector::zeros(dim),
                };
                let probe_weights =
                    DVector::from_iterator(dim, psi0.iter().map(|a| a.norm_sqr()));
                Backend::DiagonalPure {
                    lam_minus_t,
                    probe_weights,
                }
            } else {
                let (chi, u_minus) = match &inversion {
                    Some(h) => {
                        let u = evolution_matrix(h, -design.t);
                        let chi = u.adjoint() * &psi0;
                        let keep_u = matches!(design.measurement, Measurement::ProductBasis);
                        (chi, keep_u.then_some(u))
                    }
                    None => (psi0.clone(), None),
                };
                Backend::DensePure { chi, u_minus }
            }
        };

        Ok(DesignContext {
            family: *family,
            t: design.t,
            psi0,
            backend,
            measurement: design.measurement,
            dim,
            depolarizing: noise.depolarizing,
        })
    }

    pub fn outcome_count(&self) -> usize {
        match self.measurement {
            Measurement::TwoOutcome => 2,
            Measurement::ProductBasis => self.dim,
        }
    }

    /// Outcome distribution for hypothesis parameters `x`.
    pub fn distribution(&self, x: &[f64]) -> Result<Vec<f64>> {
        let raw = match &self.backend {
            Backend::DiagonalPure {
                lam_minus_t,
                probe_weights,
            } => {
                let h = self.family.build(x)?;
                let lam = h.diagonal().expect("diagonal family");
                match self.measurement {
                    Measurement::TwoOutcome => {
                        let mut amp = c(0.0, 0.0);
                        for z in 0..self.dim {
                            let theta = lam_minus_t[z] - lam[z] * self.t;
                            amp += c(0.0, theta).exp() * probe_weights[z];
                        }
                        two_outcome(amp.norm_sqr())
                    }
                    // Diagonal evolutions only add phases per basis state.
                    Measurement::ProductBasis => probe_weights.iter().copied().collect(),
                }
            }
            Backend::DensePure { chi, u_minus } => {
                let h = self.family.build(x)?;
                let phi = h.evolve(&self.psi0, self.t);
                match self.measurement {
                    Measurement::TwoOutcome => {
                        let amp: C64 = chi.dotc(&phi);
                        two_outcome(amp.norm_sqr())
                    }
                    Measurement::ProductBasis => {
                        let final_state = match u_minus {
                            Some(u) => u * phi,
                            None => phi,
                        };
                        final_state.iter().map(|a| a.norm_sqr()).collect()
                    }
                }
            }
            Backend::Density { channel, u_minus } => {
                let h = self.family.build(x)?;
                let phi = h.evolve(&self.psi0, self.t);
                let rho = crate::linalg::projector(&phi);
                let mid = channel.apply_to_matrix(&rho)?;
                let fin = u_minus * mid * u_minus.adjoint();
                match self.measurement {
                    Measurement::TwoOutcome => {
                        let p0 = (self.psi0.adjoint() * &fin * &self.psi0)[(0, 0)].re;
                        two_outcome(p0)
                    }
                    Measurement::ProductBasis => (0..self.dim)
                        .map(|z| fin[(z, z)].re.max(0.0))
                        .collect(),
                }
            }
        };
        Ok(self.apply_depolarizing(raw))
    }

    /// Mix with the maximally mixed state: each outcome keeps `(1−𝒩)` of its
    /// weight plus `𝒩 · rank/2ⁿ` from the flat background.
    fn apply_depolarizing(&self, mut probs: Vec<f64>) -> Vec<f64> {
        let strength = self.depolarizing;
        if strength == 0.0 {
            return probs;
        }
        let dim = self.dim as f64;
        match self.measurement {
            Measurement::TwoOutcome => {
                let ranks = [1.0, dim - 1.0];
                for (p, rank) in probs.iter_mut().zip(ranks) {
                    *p = *p * (1.0 - strength) + strength * rank / dim;
                }
            }
            Measurement::ProductBasis => {
                for p in probs.iter_mut() {
                    *p = *p * (1.0 - strength) + strength / dim;
                }
            }
        }
        probs
    }
}

fn two_outcome(p0: f64) -> Vec<f64> {
    let p0 = p0.clamp(0.0, 1.0);
    vec![p0, 1.0 - p0]
}

fn evolution_matrix(h: &Hamiltonian, t: f64) -> CMat {
    let dim = h.dim();
    let mut u = CMat::zeros(dim, dim);
    for k in 0..dim {
        let col = h.evolve(&crate::linalg::basis_state(dim, k), t);
        u.set_column(k, &col);
    }
    u
}

/// Outcome distribution of one design under hypothesis `x`.
pub fn outcome_distribution(
    x: &[f64],
    design: &ExperimentDesign,
    noise: &NoiseConfig,
    family: &FamilyDescriptor,
) -> Result<Vec<f64>> {
    DesignContext::new(design, noise, family)?.distribution(x)
}

/// Draw one outcome index from a distribution.
pub fn sample_outcome(dist: &[f64], rng: &mut ChaCha12Rng) -> OutcomeDatum {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (k, p) in dist.iter().enumerate() {
        acc += p;
        if u < acc {
            return OutcomeDatum { index: k };
        }
    }
    OutcomeDatum {
        index: dist.len() - 1,
    }
}

/// Likelihood of `observed` under every particle.
///
/// Exact mode evaluates the outcome distribution; sampled mode draws
/// `n_samp` simulated outcomes per particle and reports the matching
/// fraction, with each particle on an independent substream derived from
/// `substream_seed` so results do not depend on evaluation order or thread
/// count.
#[allow(clippy::too_many_arguments)]
pub fn estimate_likelihoods(
    locations: &[f64],
    dim_params: usize,
    observed: OutcomeDatum,
    design: &ExperimentDesign,
    noise: &NoiseConfig,
    family: &FamilyDescriptor,
    mode: LikelihoodMode,
    substream_seed: u64,
) -> Result<Vec<f64>> {
    let ctx = DesignContext::new(design, noise, family)?;
    if observed.index >= ctx.outcome_count() {
        return Err(Error::InvalidDesign(format!(
            "outcome {} out of range for {} outcomes",
            observed.index,
            ctx.outcome_count()
        )));
    }
    if dim_params == 0 || locations.len() % dim_params != 0 {
        return Err(Error::dims(format!(
            "flat particle buffer of {} does not divide into rows of {}",
            locations.len(),
            dim_params
        )));
    }
    locations
        .par_chunks(dim_params)
        .enumerate()
        .map(|(j, x)| -> Result<f64> {
            let dist = ctx.distribution(x)?;
            Ok(match mode {
                LikelihoodMode::Exact => dist[observed.index],
                LikelihoodMode::Sampled { n_samp } => {
                    let mut rng = seeds::stream(
                        substream_seed,
                        &[seeds::tag::SAMPLED_LIKELIHOOD, j as u64],
                    );
                    let mut hits = 0u32;
                    for _ in 0..n_samp {
                        if sample_outcome(&dist, &mut rng).index == observed.index {
                            hits += 1;
                        }
                    }
                    f64::from(hits) / f64::from(n_samp)
                }
            })
        })
        .collect()
}
