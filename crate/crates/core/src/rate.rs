//! Monte-Carlo estimate of the maximum achievable backscatter rate.
//!
//! The rate is the mutual information between the tag state `e` and the
//! observation `y`, averaged over channel realizations:
//!
//! ```text
//! R = C(θ₀) − E[C(ω₀)],   ω₀ = P(e = 0 | y),
//! ```
//!
//! where `C` is the binary entropy in bits. Each trial draws a channel, a
//! tag state from the prior, and one observation, and contributes `C(ω₀)`.

use rand::Rng;

use crate::channel::{sample_channel, synthesize_block, ReceivedBlock, TagState};
use crate::detector::{build_covariances, log_likelihood_ratio, CovariancePair};
use crate::error::{Error, Result};
use crate::montecarlo::{map_trials, summarize};
use crate::params::{probability, SimParams};

/// Binary entropy in bits, `−θ log₂ θ − (1−θ) log₂(1−θ)`, with `0 log 0 = 0`.
pub fn binary_entropy(theta: f64) -> Result<f64> {
    probability("prior", theta)?;
    Ok(entropy_bits(theta))
}

fn entropy_bits(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Posterior `(ω₀, ω₁)` of the tag state given an observation block.
///
/// Evaluated in the log domain from the likelihood ratio, so it stays finite
/// when both likelihoods underflow.
pub fn posterior(block: &ReceivedBlock, cov: &CovariancePair, prior: f64) -> Result<(f64, f64)> {
    probability("prior", prior)?;
    let llr = log_likelihood_ratio(block, cov)?;
    Ok(posterior_from_llr(llr, prior))
}

fn posterior_from_llr(llr: f64, prior: f64) -> (f64, f64) {
    if prior == 1.0 {
        return (1.0, 0.0);
    }
    if prior == 0.0 {
        return (0.0, 1.0);
    }
    if llr == 0.0 {
        return (prior, 1.0 - prior);
    }
    // log-odds of e = 1
    let z = (1.0 - prior).ln() - prior.ln() + llr;
    (logistic(-z), logistic(z))
}

/// Result of a rate estimation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    /// Estimated rate in bits per backscatter symbol.
    pub rate_bits: f64,
    pub prior: f64,
    pub trials: usize,
    pub standard_error: f64,
}

/// One trial: returns the posterior entropy `C(ω₀)` of a fresh observation.
pub fn posterior_entropy_sample<R: Rng + ?Sized>(params: &SimParams, rng: &mut R) -> f64 {
    let rows = params.samples_per_observation();
    let obs = SimParams { spreading: rows, ..params.clone() };
    let ch = sample_channel(&obs, rng);
    let cov = build_covariances(&ch, rows);
    let u: f64 = rng.random();
    let state = if u < params.prior_one() { TagState::Reflecting } else { TagState::Absorbing };
    let block = synthesize_block(&ch, state, &obs, rng);
    let llr = log_likelihood_ratio(&block, &cov).expect("dimensions consistent by construction");
    entropy_bits(posterior_from_llr(llr, params.prior).0)
}

/// Estimates the maximum achievable backscatter rate from `trials` trials,
/// trial `t` drawing from stream `t` of `seed`.
pub fn estimate_max_rate(params: &SimParams, trials: usize, seed: u64) -> Result<RateEstimate> {
    if trials == 0 {
        return Err(Error::domain("trials", "must be at least 1"));
    }
    params.validate()?;
    let samples = map_trials(seed, trials, |rng| posterior_entropy_sample(params, rng));
    let summary = summarize(&samples);
    Ok(RateEstimate {
        rate_bits: entropy_bits(params.prior) - summary.mean,
        prior: params.prior,
        trials,
        standard_error: summary.standard_error,
    })
}
