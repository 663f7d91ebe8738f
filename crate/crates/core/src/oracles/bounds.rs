//! The multiplicative Chernoff bound and the clipped-excess bound, with exact
//! binomial and Monte Carlo companions.

use rand::distr::Distribution;
use rand_distr::Binomial;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::util::{derive_seed, rng};

fn check_mean(mu: f64) -> Result<()> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::Domain(format!("mean {mu} outside (0, 1]")));
    }
    Ok(())
}

/// `exp(θ − μm)·(μm/θ)^θ`, an upper bound on `Pr[S > θ]` for `S ~ Bin(m, ≤μ)`.
pub fn chernoff_bound(mu: f64, m: u64, theta: f64) -> Result<f64> {
    check_mean(mu)?;
    let mean = mu * m as f64;
    if !(theta > mean) {
        return Err(Error::Domain(format!("theta {theta} must exceed mu·m = {mean}")));
    }
    Ok((theta - mean + theta * (mean / theta).ln()).exp())
}

/// `ln Pr[Bin(m, μ) = s]`.
fn ln_pmf(mu: f64, m: u64, s: u64) -> f64 {
    let (mf, sf) = (m as f64, s as f64);
    let ln_choose = ln_gamma(mf + 1.0) - ln_gamma(sf + 1.0) - ln_gamma(mf - sf + 1.0);
    let a = if s == 0 { 0.0 } else { sf * mu.ln() };
    let b = if s == m { 0.0 } else { (mf - sf) * (-mu).ln_1p() };
    ln_choose + a + b
}

/// `Σ_{s ≥ from} weight(s)·pmf(s)` accumulated in log space.
fn weighted_upper_sum(mu: f64, m: u64, from: u64, weight: impl Fn(u64) -> f64) -> f64 {
    if from > m {
        return 0.0;
    }
    let terms: Vec<f64> = (from..=m)
        .filter_map(|s| {
            let w = weight(s);
            (w > 0.0).then(|| ln_pmf(mu, m, s) + w.ln())
        })
        .collect();
    let Some(peak) = terms.iter().copied().reduce(f64::max) else {
        return 0.0;
    };
    if peak == f64::NEG_INFINITY {
        return 0.0;
    }
    peak.exp() * terms.iter().map(|t| (t - peak).exp()).sum::<f64>()
}

/// Exact `Pr[S > θ]` for `S ~ Bin(m, μ)`.
pub fn binomial_tail_exact(mu: f64, m: u64, theta: f64) -> Result<f64> {
    check_mean(mu)?;
    if theta.is_nan() {
        return Err(Error::Domain("theta is NaN".into()));
    }
    if theta < 0.0 {
        return Ok(1.0);
    }
    let from = theta.floor() as u64 + 1;
    Ok(weighted_upper_sum(mu, m, from, |_| 1.0).min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClipMode {
    /// `(μm / (τ − μm))²`.
    Bound,
    /// `E[S − clip_τ(S)]` by direct binomial summation.
    Exact,
    MonteCarlo { trials: u64, seed: u64 },
}

/// `E[S − min(S, τ)]` for `S ~ Bin(m, μ)`, evaluated per `mode`.
pub fn clip_excess(mu: f64, m: u64, tau: u64, mode: ClipMode) -> Result<f64> {
    check_mean(mu)?;
    let mean = mu * m as f64;
    if tau == 0 || !(tau as f64 > mean) {
        return Err(Error::Domain(format!("tau {tau} must be a positive integer above mu·m = {mean}")));
    }
    Ok(match mode {
        ClipMode::Bound => (mean / (tau as f64 - mean)).powi(2),
        ClipMode::Exact => weighted_upper_sum(mu, m, tau + 1, |s| (s - tau) as f64),
        ClipMode::MonteCarlo { trials, seed } => {
            monte_carlo(mu, m, trials, seed, 1, |s| s.saturating_sub(tau) as f64)?.estimate
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
}

/// Fraction of `trials` draws of `S ~ Bin(m, μ)` with `S > θ`.
pub fn monte_carlo_tail(mu: f64, m: u64, theta: f64, trials: u64, seed: u64) -> Result<f64> {
    Ok(monte_carlo_tail_split(mu, m, theta, trials, seed, 1)?.estimate)
}

/// [`monte_carlo_tail`] split across `workers` independent streams.
///
/// Worker `w` draws `⌈trials / workers⌉` (or the remainder) samples from the
/// stream seeded with `seed + w`; the result does not depend on thread scheduling.
pub fn monte_carlo_tail_split(
    mu: f64,
    m: u64,
    theta: f64,
    trials: u64,
    seed: u64,
    workers: u64,
) -> Result<MonteCarloEstimate> {
    monte_carlo(mu, m, trials, seed, workers, |s| if s as f64 > theta { 1.0 } else { 0.0 })
}

fn monte_carlo(
    mu: f64,
    m: u64,
    trials: u64,
    seed: u64,
    workers: u64,
    statistic: impl Fn(u64) -> f64 + Sync,
) -> Result<MonteCarloEstimate> {
    check_mean(mu)?;
    if trials == 0 || workers == 0 {
        return Err(Error::Parameter("trials and workers must be positive".into()));
    }
    let dist = Binomial::new(m, mu).map_err(|e| Error::Domain(e.to_string()))?;
    let per = trials.div_ceil(workers);
    let sums: Vec<(f64, f64)> = (0..workers)
        .into_par_iter()
        .map(|w| {
            let count = per.min(trials.saturating_sub(w * per));
            let mut r = rng(derive_seed(seed, w));
            (0..count).fold((0.0, 0.0), |(s1, s2), _| {
                let x = statistic(dist.sample(&mut r));
                (s1 + x, s2 + x * x)
            })
        })
        .collect();
    let (s1, s2) = sums.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let n = trials as f64;
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0);
    Ok(MonteCarloEstimate {
        estimate: mean,
        std_error: (var / n).sqrt(),
        trials,
    })
}
