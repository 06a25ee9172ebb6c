//! Loss, quantile, and decay-rate metrics over loss traces.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Sum of squared coordinate errors, `Σ_j (x̂_j − x_true,j)²`.
pub fn quadratic_loss(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::dims(format!(
            "loss between vectors of length {} and {}",
            estimate.len(),
            truth.len()
        )));
    }
    Ok(estimate
        .iter()
        .zip(truth)
        .map(|(a, b)| (a - b) * (a - b))
        .sum())
}

/// Median and quartiles by sorting with linear interpolation between order
/// statistics (the `h = (n−1)p` convention).
pub fn quantiles(values: &[f64]) -> (f64, f64, f64) {
    assert!(!values.is_empty(), "quantiles of an empty set");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("NaN in quantile input"));
    let at = |p: f64| -> f64 {
        let h = (sorted.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        if lo == hi {
            sorted[lo]
        } else {
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        }
    };
    (at(0.5), at(0.25), at(0.75))
}

/// Result of fitting `loss(N) ≈ A e^{−γN}` by least squares on
/// `(N, ln loss)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaFit {
    pub amplitude: f64,
    pub gamma: f64,
    /// Experiment-number fit range, 1-based and inclusive.
    pub fit_from: usize,
    pub fit_to: usize,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    /// Non-positive losses dropped from the fit.
    pub dropped: usize,
}

/// Fit the decay rate over experiment numbers `from..=to` (1-based) of a
/// loss trace whose k-th entry is experiment k+1.  Non-positive losses
/// cannot enter the log-linear fit; they are dropped and counted.  Fails
/// with [`Error::NonPositiveLoss`] when fewer than two usable points remain.
pub fn fit_gamma(losses: &[f64], from: usize, to: usize) -> Result<GammaFit> {
    if from == 0 || to > losses.len() || from > to {
        return Err(Error::InvalidConfig(format!(
            "fit range {from}..={to} outside the 1..={} trace",
            losses.len()
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut dropped = 0usize;
    for n in from..=to {
        let loss = losses[n - 1];
        if loss > 0.0 {
            xs.push(n as f64);
            ys.push(loss.ln());
        } else {
            dropped += 1;
        }
    }
    if xs.len() < 2 {
        return Err(Error::NonPositiveLoss);
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    Ok(GammaFit {
        amplitude: intercept.exp(),
        gamma: -slope,
        fit_from: from,
        fit_to: to,
        residual: (ss_res / n).sqrt(),
        dropped,
    })
}
