//! The sequential Monte Carlo core: a weighted particle cloud over model
//! parameters, Bayes updates in log space, effective sample size, Liu–West
//! resampling, and posterior summaries with credible ellipsoids.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erf;

use crate::error::Error;
use crate::models::HamiltonianFamily;
use crate::Result;

/// Weighted particles over ℝᵈ.  Weights are kept normalized: Σw = 1 within
/// 1e−12 after every operation.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleCloud {
    dim: usize,
    /// M×d, row-major.
    locations: Vec<f64>,
    weights: Vec<f64>,
}

impl ParticleCloud {
    /// Build a cloud from a flat row-major location buffer and raw weights
    /// (normalized here).  Rejects empty clouds, NaN/∞ entries, and negative
    /// weights.
    pub fn from_parts(locations: Vec<f64>, dim: usize, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 || weights.is_empty() || locations.len() != weights.len() * dim {
            return Err(Error::dims(format!(
                "cloud of {} locations / dim {} / {} weights",
                locations.len(),
                dim,
                weights.len()
            )));
        }
        if locations.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("non-finite particle location".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidConfig("invalid particle weight".into()));
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidConfig("weights sum to zero".into()));
        }
        let weights = weights.iter().map(|w| w / sum).collect();
        Ok(ParticleCloud {
            dim,
            locations,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Parameter dimension d.
    pub fn param_dim(&self) -> usize {
        self.dim
    }

    pub fn location(&self, i: usize) -> &[f64] {
        &self.locations[i * self.dim..(i + 1) * self.dim]
    }

    pub fn locations_flat(&self) -> &[f64] {
        &self.locations
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weighted draw of one particle index (inverse CDF on one uniform).
    pub fn sample_index(&self, rng: &mut ChaCha12Rng) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        self.len() - 1
    }
}

/// M prior draws with uniform weights 1/M.
pub fn init_cloud(family: &HamiltonianFamily, m: usize, rng: &mut ChaCha12Rng) -> ParticleCloud {
    assert!(m >= 1, "need at least one particle");
    let d = family.param_count();
    let mut locations = Vec::with_capacity(m * d);
    for _ in 0..m {
        locations.extend(family.sample_prior(rng));
    }
    ParticleCloud {
        dim: d,
        locations,
        weights: vec![1.0 / m as f64; m],
    }
}

/// One Bayes update: `w_i ← w_i p_i / Z` with `Z = Σ w_i p_i` returned as
/// the marginal-likelihood increment.  The reweighting runs in log space so
/// likelihoods near zero survive; [`Error::ZeroEvidence`] signals a datum
/// that is impossible under every particle.
pub fn bayes_update(cloud: &ParticleCloud, likelihoods: &[f64]) -> Result<(ParticleCloud, f64)> {
    if likelihoods.len() != cloud.len() {
        return Err(Error::dims(format!(
            "{} likelihoods for {} particles",
            likelihoods.len(),
            cloud.len()
        )));
    }
    if likelihoods.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::InvalidConfig("invalid likelihood entry".into()));
    }
    let log_w: Vec<f64> = cloud
        .weights
        .iter()
        .zip(likelihoods)
        .map(|(w, p)| w.ln() + p.ln())
        .collect();
    let peak = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() {
        return Err(Error::ZeroEvidence);
    }
    let log_z = peak + log_w.iter().map(|lw| (lw - peak).exp()).sum::<f64>().ln();
    let z = log_z.exp();
    if !(z.is_finite() && z > 1e-300) {
        return Err(Error::ZeroEvidence);
    }
    let mut weights: Vec<f64> = log_w.iter().map(|lw| (lw - log_z).exp()).collect();
    let sum: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= sum;
    }
    Ok((
        ParticleCloud {
            dim: cloud.dim,
            locations: cloud.locations.clone(),
            weights,
        },
        z,
    ))
}

/// `1 / Σ w_i²`; ranges from 1 (degenerate) to M (uniform).
pub fn effective_sample_size(cloud: &ParticleCloud) -> f64 {
    1.0 / cloud.weights.iter().map(|w| w * w).sum::<f64>()
}

/// First two weighted moments of the cloud.
#[derive(Debug, Clone)]
pub struct PosteriorSummary {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

pub fn posterior_summary(cloud: &ParticleCloud) -> PosteriorSummary {
    let d = cloud.dim;
    let mut mean = DVector::zeros(d);
    for (i, w) in cloud.weights.iter().enumerate() {
        let x = cloud.location(i);
        for k in 0..d {
            mean[k] += w * x[k];
        }
    }
    let mut cov = DMatrix::zeros(d, d);
    for (i, w) in cloud.weights.iter().enumerate() {
        let x = cloud.location(i);
        for r in 0..d {
            let dr = x[r] - mean[r];
            for s in r..d {
                cov[(r, s)] += w * dr * (x[s] - mean[s]);
            }
        }
    }
    for r in 0..d {
        for s in 0..r {
            cov[(r, s)] = cov[(s, r)];
        }
    }
    PosteriorSummary {
        mean,
        covariance: cov,
    }
}

enum NoiseGen {
    Zero,
    Factor(DMatrix<f64>),
    DiagonalOnly(DVector<f64>),
}

impl NoiseGen {
    fn draw(&self, rng: &mut ChaCha12Rng, d: usize) -> DVector<f64> {
        match self {
            NoiseGen::Zero => DVector::zeros(d),
            NoiseGen::Factor(l) => {
                let z = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
                l * z
            }
            NoiseGen::DiagonalOnly(sd) => {
                DVector::from_fn(d, |k, _| sd[k] * rng.sample::<f64, _>(StandardNormal))
            }
        }
    }
}

/// Liu–West refresh: systematic weight-resampling of ancestors, shrinkage
/// toward the posterior mean, and Gaussian jitter with covariance
/// `(1−a²)Σ`, so the first two posterior moments are preserved in
/// expectation.  Returns M equal-weight particles.
///
/// A covariance whose Cholesky factorization fails (late-stage, nearly
/// degenerate clouds) is regularized by `εI` with `ε = 1e−12·tr(Σ)/d`; if
/// even that fails the jitter falls back to independent per-coordinate
/// noise with the same variance floor, which degrades to pure mean
/// shrinkage for a fully collapsed cloud.
pub fn liu_west_resample(
    cloud: &ParticleCloud,
    a: f64,
    rng: &mut ChaCha12Rng,
) -> Result<ParticleCloud> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "Liu-West parameter a must be in (0, 1], got {a}"
        )));
    }
    let d = cloud.dim;
    let m = cloud.len();
    let summary = posterior_summary(cloud);
    let shrink = 1.0 - a * a;
    let noise = if shrink == 0.0 {
        NoiseGen::Zero
    } else {
        let scaled = &summary.covariance * shrink;
        match Cholesky::new(scaled.clone()) {
            Some(ch) => NoiseGen::Factor(ch.l()),
            None => {
                let eps = 1e-12 * summary.covariance.trace() / d as f64;
                let regularized = &scaled + DMatrix::identity(d, d) * eps;
                match Cholesky::new(regularized) {
                    Some(ch) => NoiseGen::Factor(ch.l()),
                    None => NoiseGen::DiagonalOnly(DVector::from_fn(d, |k, _| {
                        scaled[(k, k)].max(eps).max(0.0).sqrt()
                    })),
                }
            }
        }
    };

    // Systematic (low-variance) ancestor selection: one uniform offset,
    // M evenly spaced pointers through the weight CDF.
    let offset: f64 = rng.gen::<f64>() / m as f64;
    let mut ancestors = Vec::with_capacity(m);
    let mut acc = cloud.weights[0];
    let mut idx = 0usize;
    for j in 0..m {
        let pointer = offset + j as f64 / m as f64;
        while pointer >= acc && idx + 1 < m {
            idx += 1;
            acc += cloud.weights[idx];
        }
        ancestors.push(idx);
    }

    let mut locations = Vec::with_capacity(m * d);
    for &anc in &ancestors {
        let x = cloud.location(anc);
        let jitter = noise.draw(rng, d);
        for k in 0..d {
            locations.push(a * x[k] + (1.0 - a) * summary.mean[k] + jitter[k]);
        }
    }
    Ok(ParticleCloud {
        dim: d,
        locations,
        weights: vec![1.0 / m as f64; m],
    })
}

/// The covariance ellipsoid `(x−μ)ᵀ Σ⁻¹ (x−μ) ≤ Z²` with its nominal
/// Gaussian coverage `erf(Z/√2)ᵈ`.
pub struct CredibleEllipsoid {
    mean: DVector<f64>,
    factor: Cholesky<f64, Dyn>,
    z: f64,
    /// Fraction of posterior mass the ellipsoid nominally contains.
    pub coverage: f64,
}

pub fn credible_ellipsoid(summary: &PosteriorSummary, z: f64) -> Result<CredibleEllipsoid> {
    let d = summary.mean.len();
    let cov = &summary.covariance;

    // Condition check; regularize once past 1e12 before factorizing.
    let eigs = nalgebra::SymmetricEigen::new(cov.clone()).eigenvalues;
    let max_eig = eigs.iter().fold(0.0_f64, |m, &l| m.max(l));
    let min_eig = eigs.iter().fold(f64::INFINITY, |m, &l| m.min(l));
    let needs_reg = min_eig <= 0.0 || max_eig / min_eig > 1e12;
    let target = if needs_reg {
        let eps = 1e-12 * cov.trace() / d as f64;
        cov + DMatrix::identity(d, d) * eps
    } else {
        cov.clone()
    };
    let factor = Cholesky::new(target).ok_or(Error::SingularCovariance)?;
    let coverage = erf(z / std::f64::consts::SQRT_2).powi(d as i32);
    Ok(CredibleEllipsoid {
        mean: summary.mean.clone(),
        factor,
        z,
        coverage,
    })
}

impl CredibleEllipsoid {
    pub fn mahalanobis_sq(&self, x: &[f64]) -> f64 {
        let diff = DVector::from_row_slice(x) - &self.mean;
        let solved = self.factor.solve(&diff);
        diff.dot(&solved)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.mahalanobis_sq(x) <= self.z * self.z
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{FamilyKind, HamiltonianFamily};
    use crate::testutil::rng;
    use std::f64::consts::PI;

    fn toy_cloud(locs: &[f64], dim: usize, weights: &[f64]) -> ParticleCloud {
        ParticleCloud::from_parts(locs.to_vec(), dim, weights.to_vec()).unwrap()
    }

    #[test]
    fn init_cloud_is_uniform_and_in_support() {
        let fam =
            HamiltonianFamily::with_uniform_prior(FamilyKind::IsingLine, 3, -1.0 / PI, 1.0 / PI)
                .unwrap();
        let cloud = init_cloud(&fam, 4, &mut rng(101));
        assert_eq!(cloud.weights(), &[0.25; 4]);
        for i in 0..4 {
            assert!(cloud
                .location(i)
                .iter()
                .all(|v| (-1.0 / PI..1.0 / PI).contains(v)));
        }
        let again = init_cloud(&fam, 4, &mut rng(101));
        assert_eq!(cloud, again);
    }

    #[test]
    fn bayes_update_worked_examples() {
        let cloud = toy_cloud(&[0.0, 1.0], 1, &[0.5, 0.5]);
        let (updated, z) = bayes_update(&cloud, &[0.8, 0.2]).unwrap();
        assert!((z - 0.5).abs() < 1e-15);
        assert!((updated.weights()[0] - 0.8).abs() < 1e-15);
        assert!((updated.weights()[1] - 0.2).abs() < 1e-15);

        // Flat likelihoods leave weights alone and return that likelihood.
        let (same, z) = bayes_update(&cloud, &[0.7, 0.7]).unwrap();
        assert!((z - 0.7).abs() < 1e-15);
        assert_eq!(same.weights(), cloud.weights());

        let cloud4 = toy_cloud(&[0.0, 1.0, 2.0, 3.0], 1, &[0.25; 4]);
        let (point, z) = bayes_update(&cloud4, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((z - 0.25).abs() < 1e-15);
        assert_eq!(point.weights()[0], 1.0);
        assert!(point.weights()[1..].iter().all(|&w| w == 0.0));
    }

    #[test]
    fn bayes_update_matches_exact_rationals_on_three_particles() {
        // w = (1/2, 1/4, 1/4), p = (1/2, 1, 1/4): Z = 9/16,
        // w' = (4/9, 4/9, 1/9); with x = (0, 1, 2): μ = 2/3, Σ = 4/9.
        let cloud = toy_cloud(&[0.0, 1.0, 2.0], 1, &[0.5, 0.25, 0.25]);
        let (updated, z) = bayes_update(&cloud, &[0.5, 1.0, 0.25]).unwrap();
        assert!((z - 9.0 / 16.0).abs() < 1e-15);
        let expect = [4.0 / 9.0, 4.0 / 9.0, 1.0 / 9.0];
        for (w, e) in updated.weights().iter().zip(expect) {
            assert!((w - e).abs() < 1e-15);
        }
        let summary = posterior_summary(&updated);
        assert!((summary.mean[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((summary.covariance[(0, 0)] - 4.0 / 9.0).abs() < 1e-15);

        let total: f64 = updated.weights().iter().sum();
        assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn zero_evidence_is_reported() {
        let cloud = toy_cloud(&[0.0, 1.0], 1, &[0.5, 0.5]);
        assert!(matches!(
            bayes_update(&cloud, &[0.0, 0.0]),
            Err(Error::ZeroEvidence)
        ));
    }

    #[test]
    fn log_space_update_survives_tiny_likelihoods() {
        let cloud = toy_cloud(&[0.0, 1.0], 1, &[0.5, 0.5]);
        let (updated, z) = bayes_update(&cloud, &[1e-280, 1e-290]).unwrap();
        assert!(z > 0.0);
        let ratio = updated.weights()[0] / updated.weights()[1];
        assert!((ratio - 1e10).abs() / 1e10 < 1e-10);
    }

    #[test]
    fn ess_examples_and_bounds() {
        let uniform = toy_cloud(&[0.0; 8], 1, &[1.0 / 8.0; 8]);
        assert!((effective_sample_size(&uniform) - 8.0).abs() < 1e-12);

        let point = toy_cloud(&[0.0, 0.0], 1, &[1.0, 0.0]);
        assert!((effective_sample_size(&point) - 1.0).abs() < 1e-12);

        let mixed = toy_cloud(&[0.0, 0.0, 0.0], 1, &[0.5, 0.25, 0.25]);
        assert!((effective_sample_size(&mixed) - 8.0 / 3.0).abs() < 1e-12);

        let mut r = rng(102);
        for _ in 0..20 {
            let m = 16;
            let raw: Vec<f64> = (0..m).map(|_| r.gen_range(0.0..1.0)).collect();
            let cloud = toy_cloud(&vec![0.0; m], 1, &raw);
            let ess = effective_sample_size(&cloud);
            assert!((1.0..=m as f64 + 1e-9).contains(&ess));
        }
    }

    #[test]
    fn resample_with_a_one_keeps_original_locations() {
        let cloud = toy_cloud(&[0.0, 1.0, 2.0, 3.0], 1, &[0.1, 0.2, 0.3, 0.4]);
        let out = liu_west_resample(&cloud, 1.0, &mut rng(103)).unwrap();
        for i in 0..out.len() {
            let v = out.location(i)[0];
            assert!([0.0, 1.0, 2.0, 3.0].contains(&v));
        }
        assert_eq!(out.weights(), &[0.25; 4]);
    }

    #[test]
    fn resample_is_deterministic_for_fixed_seed() {
        let cloud = toy_cloud(&[0.0, 1.0, 2.0, 3.0], 2, &[0.3, 0.7]);
        let a = liu_west_resample(&cloud, 0.9, &mut rng(104)).unwrap();
        let b = liu_west_resample(&cloud, 0.9, &mut rng(104)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn resample_preserves_first_two_moments() {
        // Correlated planted distribution with no small covariance entries,
        // so the 10%-relative check is meaningful on every entry.
        let mut r = rng(105);
        let m = 10_000;
        let d = 3;
        let l = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.6, 0.9, 0.0, 0.5, 0.4, 0.8]);
        let mut locations = Vec::with_capacity(m * d);
        for _ in 0..m {
            let z = DVector::from_fn(d, |_, _| r.sample::<f64, _>(StandardNormal));
            let x = &l * z;
            locations.extend(x.iter());
        }
        let raw_w: Vec<f64> = (0..m).map(|_| r.gen_range(0.5..1.5)).collect();
        let cloud = ParticleCloud::from_parts(locations, d, raw_w).unwrap();
        let before = posterior_summary(&cloud);

        for a in [0.98, 0.9, 0.5, 0.1] {
            let out = liu_west_resample(&cloud, a, &mut rng(106)).unwrap();
            let after = posterior_summary(&out);
            let mean_tol = 4.0 * (before.covariance.trace() / m as f64).sqrt();
            for k in 0..d {
                assert!(
                    (after.mean[k] - before.mean[k]).abs() < mean_tol,
                    "a={a}: mean[{k}] moved {} > {mean_tol}",
                    (after.mean[k] - before.mean[k]).abs()
                );
            }
            for rr in 0..d {
                for s in 0..d {
                    let b = before.covariance[(rr, s)];
                    let afterv = after.covariance[(rr, s)];
                    assert!(
                        (afterv - b).abs() / b.abs() < 0.10,
                        "a={a}: cov[{rr},{s}] {} vs {}",
                        afterv,
                        b
                    );
                }
            }
        }
    }

    #[test]
    fn resample_collapsed_cloud_falls_back_to_mean() {
        let cloud = toy_cloud(&[1.5, 1.5, 1.5, 1.5], 2, &[0.5, 0.5]);
        let out = liu_west_resample(&cloud, 0.9, &mut rng(107)).unwrap();
        for i in 0..out.len() {
            for v in out.location(i) {
                assert!((v - 1.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn posterior_summary_examples_and_oracle() {
        let single = toy_cloud(&[2.0, -1.0], 2, &[1.0]);
        let s = posterior_summary(&single);
        assert_eq!(s.mean.as_slice(), &[2.0, -1.0]);
        assert!(s.covariance.iter().all(|&v| v == 0.0));

        let pair = toy_cloud(&[1.0, -1.0], 1, &[0.5, 0.5]);
        let s = posterior_summary(&pair);
        assert!(s.mean[0].abs() < 1e-15);
        assert!((s.covariance[(0, 0)] - 1.0).abs() < 1e-15);

        // Independent route: E[xxᵀ] − μμᵀ.
        let mut r = rng(108);
        let m = 50;
        let d = 2;
        let locs: Vec<f64> = (0..m * d).map(|_| r.gen_range(-1.0..1.0)).collect();
        let raw_w: Vec<f64> = (0..m).map(|_| r.gen_range(0.1..1.0)).collect();
        let cloud = ParticleCloud::from_parts(locs, d, raw_w).unwrap();
        let s = posterior_summary(&cloud);
        let mut second = DMatrix::zeros(d, d);
        for i in 0..m {
            let x = DVector::from_row_slice(cloud.location(i));
            second += &x * x.transpose() * cloud.weights()[i];
        }
        let oracle = second - &s.mean * s.mean.transpose();
        for (a, b) in s.covariance.iter().zip(oracle.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn ellipsoid_center_and_one_dim_coverage() {
        let summary = PosteriorSummary {
            mean: DVector::from_row_slice(&[0.3]),
            covariance: DMatrix::from_row_slice(1, 1, &[2.0]),
        };
        let ell = credible_ellipsoid(&summary, 1.0).unwrap();
        assert!(ell.contains(&[0.3]));

        // Numerical Gaussian integral over [μ−σ, μ+σ] via Simpson's rule.
        let simpson = {
            let n = 2000;
            let (lo, hi) = (-1.0_f64, 1.0_f64);
            let h = (hi - lo) / n as f64;
            let pdf = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
            let mut acc = pdf(lo) + pdf(hi);
            for k in 1..n {
                let x = lo + k as f64 * h;
                acc += pdf(x) * if k % 2 == 1 { 4.0 } else { 2.0 };
            }
            acc * h / 3.0
        };
        assert!((ell.coverage - simpson).abs() < 1e-6);
        assert!((ell.coverage - 0.682689).abs() < 1e-5);
    }

    #[test]
    fn ellipsoid_coverage_matches_gaussian_monte_carlo_in_two_dims() {
        let mut r = rng(109);
        let l = DMatrix::from_row_slice(2, 2, &[0.8, 0.0, 0.3, 0.5]);
        let mean = DVector::from_row_slice(&[1.0, -2.0]);
        let cov = &l * l.transpose();
        let summary = PosteriorSummary {
            mean: mean.clone(),
            covariance: cov,
        };
        let ell = credible_ellipsoid(&summary, 3.0).unwrap();
        let n = 20_000;
        let mut inside = 0usize;
        for _ in 0..n {
            let z = DVector::from_fn(2, |_, _| r.sample::<f64, _>(StandardNormal));
            let x = &mean + &l * z;
            if ell.contains(x.as_slice()) {
                inside += 1;
            }
        }
        let frac = inside as f64 / n as f64;
        let nominal = erf(3.0 / std::f64::consts::SQRT_2).powi(2);
        assert!(
            (frac - nominal).abs() < 0.02,
            "empirical {frac} vs nominal {nominal}"
        );
    }

    #[test]
    fn ellipsoid_handles_degenerate_covariance() {
        // Rank-one covariance: condition is infinite, regularization kicks
        // in, and the long axis still behaves.
        let summary = PosteriorSummary {
            mean: DVector::zeros(2),
            covariance: DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]),
        };
        let ell = credible_ellipsoid(&summary, 2.0).unwrap();
        assert!(ell.contains(&[0.1, 0.1]));
        assert!(!ell.contains(&[5.0, -5.0]));

        let zero = PosteriorSummary {
            mean: DVector::zeros(2),
            covariance: DMatrix::zeros(2, 2),
        };
        assert!(matches!(
            credible_ellipsoid(&zero, 2.0),
            Err(Error::SingularCovariance)
        ));
    }

    #[test]
    fn cloud_validation_rejects_bad_input() {
        assert!(ParticleCloud::from_parts(vec![], 1, vec![]).is_err());
        assert!(ParticleCloud::from_parts(vec![f64::NAN], 1, vec![1.0]).is_err());
        assert!(ParticleCloud::from_parts(vec![0.0], 1, vec![-1.0]).is_err());
        assert!(ParticleCloud::from_parts(vec![0.0, 1.0], 1, vec![0.0, 0.0]).is_err());
        assert!(liu_west_resample(
            &toy_cloud(&[0.0, 1.0], 1, &[0.5, 0.5]),
            0.0,
            &mut rng(110)
        )
        .is_err());
    }
}
