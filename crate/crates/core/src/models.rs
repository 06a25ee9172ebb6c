//! Parameterized Hamiltonian families H(x), priors over x, and distances.
//!
//! Four families are built in:
//!
//! - `ising-line`: `H = Σ_{k<n} (π x_k / 2) σz⁽ᵏ⁾σz⁽ᵏ⁺¹⁾`, d = n−1, diagonal.
//! - `ising-complete`: every pair coupled, `H = Σ_{i<j} (π x_{ij} / 2)
//!   σz⁽ⁱ⁾σz⁽ʲ⁾`, d = n(n−1)/2, diagonal.  Parameters are ordered
//!   nearest-neighbor block first, then the longer-range pairs
//!   (1,3), (1,4), …, (n−2,n), so the line family embeds as a prefix.
//! - `transverse-ising`: `H = Σ_k x_k σx⁽ᵏ⁾ + Σ_{k<n} x_{n+k} σz⁽ᵏ⁾σz⁽ᵏ⁺¹⁾`,
//!   d = 2n−1, non-commuting.
//! - `ti-transverse-ising`: the translationally invariant tying,
//!   `H = x₁ Σ_k σx⁽ᵏ⁾ + x₂ Σ_k σz⁽ᵏ⁾σz⁽ᵏ⁺¹⁾`, d = 2.
//!
//! Every family is linear in x, so `H(x₁) − H(x₂) = H(x₁ − x₂)`; distances
//! are computed on the difference parameters directly.  Qubit 1 is the most
//! significant tensor factor.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::{c, CMat, CVec};
use crate::Result;

pub const MAX_QUBITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    IsingLine,
    IsingComplete,
    TransverseIsing,
    TiTransverseIsing,
}

/// The structural identity of a family: enough to build H(x), but carries no
/// prior.  Cheap to copy and serialize; experiment designs embed one to name
/// their inversion Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDescriptor {
    pub kind: FamilyKind,
    pub n: usize,
}

/// A Hamiltonian in the cheapest exact representation its family allows.
#[derive(Debug, Clone)]
pub enum Hamiltonian {
    /// Commuting σz families: just the real diagonal in the computational
    /// basis.
    Diagonal(DVector<f64>),
    /// Non-commuting families built from σx and σz strings: real symmetric.
    RealSymmetric(DMatrix<f64>),
}

/// σz eigenvalue (+1/−1) of 1-based `qubit` in basis state `z`; qubit 1 is
/// the most significant bit.
fn z_sign(z: usize, n: usize, qubit: usize) -> f64 {
    1.0 - 2.0 * ((z >> (n - qubit)) & 1) as f64
}

impl FamilyDescriptor {
    pub fn new(kind: FamilyKind, n: usize) -> Result<Self> {
        if !(2..=MAX_QUBITS).contains(&n) {
            return Err(Error::InvalidConfig(format!(
                "family needs 2..={MAX_QUBITS} qubits, got {n}"
            )));
        }
        Ok(FamilyDescriptor { kind, n })
    }

    /// Parameter count d.
    pub fn param_count(&self) -> usize {
        match self.kind {
            FamilyKind::IsingLine => self.n - 1,
            FamilyKind::IsingComplete => self.n * (self.n - 1) / 2,
            FamilyKind::TransverseIsing => 2 * self.n - 1,
            FamilyKind::TiTransverseIsing => 2,
        }
    }

    /// Hilbert dimension 2ⁿ.
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(
            self.kind,
            FamilyKind::IsingLine | FamilyKind::IsingComplete
        )
    }

    /// σzσz pair list in parameter order for the diagonal families.
    fn zz_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        let mut pairs: Vec<(usize, usize)> = (1..n).map(|i| (i, i + 1)).collect();
        if self.kind == FamilyKind::IsingComplete {
            for i in 1..=n.saturating_sub(2) {
                for j in (i + 2)..=n {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.param_count() {
            return Err(Error::dims(format!(
                "{:?} over {} qubits takes {} parameters, got {}",
                self.kind,
                self.n,
                self.param_count(),
                x.len()
            )));
        }
        Ok(())
    }

    /// Build H(x) in its family's natural representation.
    pub fn build(&self, x: &[f64]) -> Result<Hamiltonian> {
        self.check_len(x)?;
        let n = self.n;
        let dim = self.dim();
        match self.kind {
            FamilyKind::IsingLine | FamilyKind::IsingComplete => {
                let pairs = self.zz_pairs();
                let mut diag = DVector::zeros(dim);
                for z in 0..dim {
                    let mut acc = 0.0;
                    for (k, &(i, j)) in pairs.iter().enumerate() {
                        acc += 0.5 * std::f64::consts::PI
                            * x[k]
                            * z_sign(z, n, i)
                            * z_sign(z, n, j);
                    }
                    diag[z] = acc;
                }
                Ok(Hamiltonian::Diagonal(diag))
            }
            FamilyKind::TransverseIsing | FamilyKind::TiTransverseIsing => {
                let (onsite, coupling): (Vec<f64>, Vec<f64>) = match self.kind {
                    FamilyKind::TransverseIsing => {
                        (x[..n].to_vec(), x[n..].to_vec())
                    }
                    _ => (vec![x[0]; n], vec![x[1]; n - 1]),
                };
                let mut m = DMatrix::zeros(dim, dim);
                for z in 0..dim {
                    // σx on qubit k flips its bit.
                    for (k, &w) in onsite.iter().enumerate() {
                        let flipped = z ^ (1 << (n - (k + 1)));
                        m[(z, flipped)] += w;
                    }
                    let mut acc = 0.0;
                    for (k, &w) in coupling.iter().enumerate() {
                        let (i, j) = (k + 1, k + 2);
                        acc += w * z_sign(z, n, i) * z_sign(z, n, j);
                    }
                    m[(z, z)] += acc;
                }
                Ok(Hamiltonian::RealSymmetric(m))
            }
        }
    }

    /// Dense complex form, for interop with the generic matrix layer.
    pub fn build_dense(&self, x: &[f64]) -> Result<CMat> {
        Ok(self.build(x)?.to_cmat())
    }
}

impl Hamiltonian {
    pub fn dim(&self) -> usize {
        match self {
            Hamiltonian::Diagonal(d) => d.len(),
            Hamiltonian::RealSymmetric(m) => m.nrows(),
        }
    }

    pub fn diagonal(&self) -> Option<&DVector<f64>> {
        match self {
            Hamiltonian::Diagonal(d) => Some(d),
            _ => None,
        }
    }

    pub fn to_cmat(&self) -> CMat {
        match self {
            Hamiltonian::Diagonal(d) => {
                CMat::from_diagonal(&CVec::from_iterator(d.len(), d.iter().map(|&v| c(v, 0.0))))
            }
            Hamiltonian::RealSymmetric(m) => m.map(|v| c(v, 0.0)),
        }
    }

    /// Largest singular value; for these Hermitian representations the
    /// largest |eigenvalue|.
    pub fn spectral_norm(&self) -> f64 {
        match self {
            Hamiltonian::Diagonal(d) => d.iter().fold(0.0_f64, |a, &v| a.max(v.abs())),
            Hamiltonian::RealSymmetric(m) => {
                let se = nalgebra::SymmetricEigen::new(m.clone());
                se.eigenvalues.iter().fold(0.0_f64, |a, &v| a.max(v.abs()))
            }
        }
    }

    /// Apply `e^{−iHt}` to a state.
    pub fn evolve(&self, psi: &CVec, t: f64) -> CVec {
        match self {
            Hamiltonian::Diagonal(d) => {
                CVec::from_iterator(
                    d.len(),
                    d.iter()
                        .zip(psi.iter())
                        .map(|(&lam, amp)| amp * c(0.0, -lam * t).exp()),
                )
            }
            Hamiltonian::RealSymmetric(m) => {
                let se = nalgebra::SymmetricEigen::new(m.clone());
                evolve_from_real_eigen(&se.eigenvalues, &se.eigenvectors, psi, t)
            }
        }
    }
}

/// `V e^{−iΛt} Vᵀ ψ` for a real orthogonal eigenbasis.
pub(crate) fn evolve_from_real_eigen(
    eigenvalues: &DVector<f64>,
    eigenvectors: &DMatrix<f64>,
    psi: &CVec,
    t: f64,
) -> CVec {
    let dim = psi.len();
    let mut y = CVec::zeros(dim);
    for k in 0..dim {
        let mut acc = c(0.0, 0.0);
        for i in 0..dim {
            acc += psi[i] * eigenvectors[(i, k)];
        }
        y[k] = acc * c(0.0, -eigenvalues[k] * t).exp();
    }
    let mut out = CVec::zeros(dim);
    for i in 0..dim {
        let mut acc = c(0.0, 0.0);
        for k in 0..dim {
            acc += y[k] * eigenvectors[(i, k)];
        }
        out[i] = acc;
    }
    out
}

/// `‖H(x1) − H(x2)‖` (spectral norm), computed on the difference parameters
/// since every family is linear in x.
pub fn hamiltonian_distance(family: &FamilyDescriptor, x1: &[f64], x2: &[f64]) -> Result<f64> {
    family.check_len(x1)?;
    family.check_len(x2)?;
    let delta: Vec<f64> = x1.iter().zip(x2).map(|(a, b)| a - b).collect();
    Ok(family.build(&delta)?.spectral_norm())
}

/// Number of leading coordinates two families share; the prefix parameter
/// ordering makes misspecification losses comparable across families.
pub fn shared_prefix_dim(a: &FamilyDescriptor, b: &FamilyDescriptor) -> usize {
    a.param_count().min(b.param_count())
}

/// Per-parameter prior distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamPrior {
    Uniform { lo: f64, hi: f64 },
    Gaussian { mean: f64, sd: f64 },
}

impl ParamPrior {
    fn validate(&self) -> Result<()> {
        match *self {
            ParamPrior::Uniform { lo, hi } if lo < hi => Ok(()),
            ParamPrior::Gaussian { sd, .. } if sd > 0.0 => Ok(()),
            other => Err(Error::InvalidConfig(format!("bad prior {other:?}"))),
        }
    }

    pub fn sample(&self, rng: &mut ChaCha12Rng) -> f64 {
        match *self {
            ParamPrior::Uniform { lo, hi } => rng.gen_range(lo..hi),
            ParamPrior::Gaussian { mean, sd } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + sd * z
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            ParamPrior::Uniform { lo, hi } => 0.5 * (lo + hi),
            ParamPrior::Gaussian { mean, .. } => mean,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            ParamPrior::Uniform { lo, hi } => (hi - lo) * (hi - lo) / 12.0,
            ParamPrior::Gaussian { sd, .. } => sd * sd,
        }
    }
}

/// Joint prior: independent per-parameter factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec(pub Vec<ParamPrior>);

impl PriorSpec {
    pub fn uniform(d: usize, lo: f64, hi: f64) -> Self {
        PriorSpec(vec![ParamPrior::Uniform { lo, hi }; d])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        self.0.iter().try_for_each(ParamPrior::validate)
    }

    pub fn sample(&self, rng: &mut ChaCha12Rng) -> Vec<f64> {
        self.0.iter().map(|p| p.sample(rng)).collect()
    }
}

/// A family plus its prior: the unit the inference engine works with.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianFamily {
    desc: FamilyDescriptor,
    prior: PriorSpec,
}

impl HamiltonianFamily {
    pub fn new(kind: FamilyKind, n: usize, prior: PriorSpec) -> Result<Self> {
        let desc = FamilyDescriptor::new(kind, n)?;
        if prior.len() != desc.param_count() {
            return Err(Error::dims(format!(
                "prior has {} factors, family takes {}",
                prior.len(),
                desc.param_count()
            )));
        }
        prior.validate()?;
        Ok(HamiltonianFamily { desc, prior })
    }

    pub fn with_uniform_prior(kind: FamilyKind, n: usize, lo: f64, hi: f64) -> Result<Self> {
        let desc = FamilyDescriptor::new(kind, n)?;
        Self::new(kind, n, PriorSpec::uniform(desc.param_count(), lo, hi))
    }

    pub fn descriptor(&self) -> FamilyDescriptor {
        self.desc
    }

    pub fn n(&self) -> usize {
        self.desc.n
    }

    pub fn param_count(&self) -> usize {
        self.desc.param_count()
    }

    pub fn prior(&self) -> &PriorSpec {
        &self.prior
    }

    pub fn build(&self, x: &[f64]) -> Result<Hamiltonian> {
        self.desc.build(x)
    }

    /// One i.i.d. draw from the declared prior.
    pub fn sample_prior(&self, rng: &mut ChaCha12Rng) -> Vec<f64> {
        self.prior.sample(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{id2, kron, max_abs_diff, sigma_x, sigma_z, spectral_norm};
    use crate::testutil::rng;
    use std::f64::consts::PI;

    fn ising_line(n: usize) -> HamiltonianFamily {
        HamiltonianFamily::with_uniform_prior(FamilyKind::IsingLine, n, -1.0 / PI, 1.0 / PI)
            .unwrap()
    }

    /// Dense oracle built from explicit Pauli-string Kronecker products.
    fn pauli_chain(n: usize, ops: &[(usize, CMat)]) -> CMat {
        let mut m = CMat::identity(1, 1);
        for q in 1..=n {
            let factor = ops
                .iter()
                .find(|(site, _)| *site == q)
                .map(|(_, op)| op.clone())
                .unwrap_or_else(id2);
            m = kron(&m, &factor);
        }
        m
    }

    #[test]
    fn ising_line_two_qubits_matches_zz_diagonal() {
        let fam = ising_line(2);
        let j = 0.31;
        let h = fam.build(&[j]).unwrap();
        let expect = [1.0, -1.0, -1.0, 1.0].map(|s| 0.5 * PI * j * s);
        let diag = h.diagonal().unwrap();
        for (got, want) in diag.iter().zip(expect.iter()) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn diagonal_families_agree_with_dense_pauli_oracle() {
        let mut r = rng(31);
        for n in 2..=4 {
            let fam = FamilyDescriptor::new(FamilyKind::IsingComplete, n).unwrap();
            let x: Vec<f64> = (0..fam.param_count()).map(|_| r.gen_range(-1.0..1.0)).collect();
            let built = fam.build_dense(&x).unwrap();

            let mut oracle = CMat::zeros(1 << n, 1 << n);
            for (k, &(i, j)) in fam.zz_pairs().iter().enumerate() {
                let term = pauli_chain(n, &[(i, sigma_z()), (j, sigma_z())]);
                oracle += term.map(|z| z * crate::linalg::c(0.5 * PI * x[k], 0.0));
            }
            assert!(max_abs_diff(&built, &oracle) < 1e-13);
        }
    }

    #[test]
    fn transverse_family_matches_dense_pauli_oracle() {
        let mut r = rng(32);
        let n = 3;
        let fam = FamilyDescriptor::new(FamilyKind::TransverseIsing, n).unwrap();
        let x: Vec<f64> = (0..fam.param_count()).map(|_| r.gen_range(-1.0..1.0)).collect();
        let built = fam.build_dense(&x).unwrap();

        let mut oracle = CMat::zeros(8, 8);
        for k in 1..=n {
            oracle += pauli_chain(n, &[(k, sigma_x())]).map(|z| z * crate::linalg::c(x[k - 1], 0.0));
        }
        for k in 1..n {
            oracle += pauli_chain(n, &[(k, sigma_z()), (k + 1, sigma_z())])
                .map(|z| z * crate::linalg::c(x[n + k - 1], 0.0));
        }
        assert!(max_abs_diff(&built, &oracle) < 1e-13);
    }

    #[test]
    fn transverse_zero_parameters_is_zero_matrix() {
        let fam = FamilyDescriptor::new(FamilyKind::TransverseIsing, 2).unwrap();
        let h = fam.build_dense(&[0.0, 0.0, 0.0]).unwrap();
        assert!(h.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn translational_tying_matches_untied_family() {
        let ti = FamilyDescriptor::new(FamilyKind::TiTransverseIsing, 2).unwrap();
        let full = FamilyDescriptor::new(FamilyKind::TransverseIsing, 2).unwrap();
        let (a, b) = (0.4, -0.7);
        let h1 = ti.build_dense(&[a, b]).unwrap();
        let h2 = full.build_dense(&[a, a, b]).unwrap();
        assert!(max_abs_diff(&h1, &h2) < 1e-15);
    }

    #[test]
    fn families_are_linear_in_parameters() {
        let mut r = rng(33);
        for kind in [
            FamilyKind::IsingLine,
            FamilyKind::IsingComplete,
            FamilyKind::TransverseIsing,
            FamilyKind::TiTransverseIsing,
        ] {
            let fam = FamilyDescriptor::new(kind, 3).unwrap();
            let d = fam.param_count();
            let x1: Vec<f64> = (0..d).map(|_| r.gen_range(-1.0..1.0)).collect();
            let x2: Vec<f64> = (0..d).map(|_| r.gen_range(-1.0..1.0)).collect();
            let (alpha, beta) = (0.6, -1.3);
            let combo: Vec<f64> = x1
                .iter()
                .zip(&x2)
                .map(|(a, b)| alpha * a + beta * b)
                .collect();
            let lhs = fam.build_dense(&combo).unwrap();
            let rhs = fam.build_dense(&x1).unwrap() * crate::linalg::c(alpha, 0.0)
                + fam.build_dense(&x2).unwrap() * crate::linalg::c(beta, 0.0);
            assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
        }
    }

    #[test]
    fn line_embeds_as_prefix_of_complete() {
        let line = FamilyDescriptor::new(FamilyKind::IsingLine, 4).unwrap();
        let complete = FamilyDescriptor::new(FamilyKind::IsingComplete, 4).unwrap();
        assert_eq!(shared_prefix_dim(&line, &complete), 3);
        let x = [0.2, -0.4, 0.1];
        let padded = [0.2, -0.4, 0.1, 0.0, 0.0, 0.0];
        let h1 = line.build_dense(&x).unwrap();
        let h2 = complete.build_dense(&padded).unwrap();
        assert!(max_abs_diff(&h1, &h2) < 1e-15);
    }

    #[test]
    fn distance_examples_and_oracle() {
        let fam = FamilyDescriptor::new(FamilyKind::IsingLine, 2).unwrap();
        assert_eq!(hamiltonian_distance(&fam, &[0.5], &[0.5]).unwrap(), 0.0);
        let d = hamiltonian_distance(&fam, &[0.5], &[0.3]).unwrap();
        assert!((d - PI * 0.1).abs() < 1e-13);

        let mut r = rng(34);
        let tf = FamilyDescriptor::new(FamilyKind::TransverseIsing, 2).unwrap();
        for _ in 0..10 {
            let x1: Vec<f64> = (0..3).map(|_| r.gen_range(-1.0..1.0)).collect();
            let x2: Vec<f64> = (0..3).map(|_| r.gen_range(-1.0..1.0)).collect();
            let got = hamiltonian_distance(&tf, &x1, &x2).unwrap();
            let dense = tf.build_dense(&x1).unwrap() - tf.build_dense(&x2).unwrap();
            assert!((got - spectral_norm(&dense)).abs() < 1e-11);
        }
    }

    #[test]
    fn distance_is_a_pseudometric() {
        let mut r = rng(35);
        let fam = FamilyDescriptor::new(FamilyKind::TransverseIsing, 2).unwrap();
        for _ in 0..20 {
            let xs: Vec<Vec<f64>> = (0..3)
                .map(|_| (0..3).map(|_| r.gen_range(-1.0..1.0)).collect())
                .collect();
            let dab = hamiltonian_distance(&fam, &xs[0], &xs[1]).unwrap();
            let dba = hamiltonian_distance(&fam, &xs[1], &xs[0]).unwrap();
            let dac = hamiltonian_distance(&fam, &xs[0], &xs[2]).unwrap();
            let dcb = hamiltonian_distance(&fam, &xs[2], &xs[1]).unwrap();
            assert!((dab - dba).abs() < 1e-10);
            assert!(dab <= dac + dcb + 1e-10);
        }
    }

    #[test]
    fn prior_draws_stay_in_support_and_reproduce() {
        let fam = ising_line(4);
        let mut r = rng(36);
        for _ in 0..200 {
            let x = fam.sample_prior(&mut r);
            assert_eq!(x.len(), 3);
            assert!(x.iter().all(|v| (-1.0 / PI..1.0 / PI).contains(v)));
        }
        let a = fam.sample_prior(&mut rng(77));
        let b = fam.sample_prior(&mut rng(77));
        assert_eq!(a, b);
    }

    #[test]
    fn prior_sample_mean_within_clt_bound() {
        // 1e5 draws; per-coordinate mean within 4σ/√N of the prior mean.
        let prior = PriorSpec(vec![
            ParamPrior::Uniform { lo: -1.0 / PI, hi: 1.0 / PI },
            ParamPrior::Gaussian { mean: 0.25, sd: 0.05 },
        ]);
        let fam = HamiltonianFamily::new(FamilyKind::IsingLine, 3, prior.clone()).unwrap();
        let n_draws = 100_000;
        let mut sums = vec![0.0; 2];
        let mut r = rng(38);
        for _ in 0..n_draws {
            let x = fam.sample_prior(&mut r);
            for (s, v) in sums.iter_mut().zip(&x) {
                *s += v;
            }
        }
        for (k, s) in sums.iter().enumerate() {
            let mean = s / n_draws as f64;
            let bound = 4.0 * prior.0[k].variance().sqrt() / (n_draws as f64).sqrt();
            assert!(
                (mean - prior.0[k].mean()).abs() < bound,
                "coordinate {k}: {mean} vs {} ± {bound}",
                prior.0[k].mean()
            );
        }
    }

    #[test]
    fn evolve_agrees_with_dense_exponential() {
        let mut r = rng(39);
        for kind in [FamilyKind::IsingLine, FamilyKind::TransverseIsing] {
            let fam = FamilyDescriptor::new(kind, 2).unwrap();
            let x: Vec<f64> = (0..fam.param_count()).map(|_| r.gen_range(-1.0..1.0)).collect();
            let h = fam.build(&x).unwrap();
            let psi = crate::testutil::random_state(&mut r, 4);
            let t = 1.7;
            let fast = h.evolve(&psi, t);
            let u = crate::linalg::expm_hermitian(&fam.build_dense(&x).unwrap(), t).unwrap();
            let slow = u * &psi;
            assert!((fast - slow).norm() < 1e-11);
        }
    }

    #[test]
    fn rejects_bad_shapes_and_sizes() {
        assert!(FamilyDescriptor::new(FamilyKind::IsingLine, 1).is_err());
        assert!(FamilyDescriptor::new(FamilyKind::IsingLine, 7).is_err());
        let fam = FamilyDescriptor::new(FamilyKind::IsingLine, 3).unwrap();
        assert!(matches!(
            fam.build(&[1.0]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(HamiltonianFamily::new(
            FamilyKind::IsingLine,
            3,
            PriorSpec::uniform(2, 1.0, 0.0)
        )
        .is_err());
    }
}
