//! Shared helpers for unit tests.

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, CMat, CVec};
use crate::seeds;

pub fn rng(seed: u64) -> ChaCha12Rng {
    seeds::stream(seed, &[0xdead_beef])
}

pub fn random_matrix(r: &mut ChaCha12Rng, dim: usize) -> CMat {
    CMat::from_fn(dim, dim, |_, _| {
        c(r.sample(StandardNormal), r.sample(StandardNormal))
    })
}

pub fn random_hermitian(r: &mut ChaCha12Rng, dim: usize) -> CMat {
    let a = random_matrix(r, dim);
    (&a + a.adjoint()).map(|z| z * c(0.5, 0.0))
}

pub fn random_state(r: &mut ChaCha12Rng, dim: usize) -> CVec {
    let mut v = CVec::from_fn(dim, |_, _| {
        c(r.sample(StandardNormal), r.sample(StandardNormal))
    });
    let n = v.norm();
    v /= c(n, 0.0);
    v
}
