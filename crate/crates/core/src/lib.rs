//! Quantum Hamiltonian learning at desk scale.
//!
//! This crate implements sequential Monte Carlo Bayesian inference over the
//! parameters of small (n ≤ 6 qubit) Hamiltonian families, where likelihoods
//! come from simulated quantum likelihood evaluation (QLE) or its interactive
//! variant (IQLE).  Experiments are designed adaptively by the particle guess
//! heuristic, noise enters either as depolarizing mixtures or as superoperator
//! channels standing in for an imperfect swap gate, and competing model
//! families are ranked online through their marginal likelihoods.
//!
//! The crate splits into layers:
//!
//! - [`linalg`] / [`clifford`] — dense complex linear algebra and quantum
//!   primitives (matrix exponentials, partial traces, random local Cliffords).
//! - [`models`] — parameterized Hamiltonian families and priors.
//! - [`channels`] — superoperators, Lindblad generators, propagators, and the
//!   channel file format.
//! - [`likelihood`] — outcome distributions for QLE/IQLE experiments.
//! - [`smc`] — the weighted particle cloud: Bayes updates, effective sample
//!   size, Liu–West resampling, posterior summaries.
//! - [`protocols`] — the learning loop, marginal-likelihood accumulation, and
//!   dual-model selection with role switching.
//! - [`harness`] — declarative run/sweep configuration, metrics, and dataset
//!   emission behind the `qhl` command-line tool.

pub mod channels;
pub mod clifford;
pub mod error;
pub mod harness;
pub mod likelihood;
pub mod linalg;
pub mod models;
pub mod protocols;
pub mod seeds;
pub mod smc;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
