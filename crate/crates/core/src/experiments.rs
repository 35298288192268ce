//! Seeded parameter sweeps: rate vs. prior, rate vs. SNR, BER vs. SNR and
//! decoded bits vs. SNR.
//!
//! Every point of a sweep reuses the same per-trial random streams, so the
//! differences between neighboring points are not swamped by independent
//! sampling noise.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::channel::{sample_channel, synthesize_frame};
use crate::codec::{decode_detected, decoded_bits, differential_encode};
use crate::detector::{build_covariances, detect_frame};
use crate::error::{Error, Result};
use crate::montecarlo::{map_trials, summarize};
use crate::params::{db_to_linear, probability, SimParams};
use crate::rate::estimate_max_rate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Rate against the prior `θ₀`; sweep values are probabilities.
    RateVsPrior,
    /// Rate against `α_dt`; sweep values are in dB.
    RateVsSnr,
    /// Backscatter BER against `α_dt` in dB.
    BerVsSnr,
    /// Decoded bits against `α_dt` in dB, one pair of series per split ratio.
    ThroughputVsSnr,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::RateVsPrior => "rate_vs_prior",
            ExperimentKind::RateVsSnr => "rate_vs_snr",
            ExperimentKind::BerVsSnr => "ber_vs_snr",
            ExperimentKind::ThroughputVsSnr => "throughput_vs_snr",
        }
    }
}

/// A full sweep definition. Trials and seed come from `params`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub sweep: Vec<f64>,
    /// Antenna counts, one series each.
    pub antennas: Vec<usize>,
    /// Split ratios `η` for throughput sweeps.
    pub split_ratios: Vec<f64>,
    pub params: SimParams,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.sweep.is_empty() {
            return Err(Error::domain("sweep", "must not be empty"));
        }
        if self.antennas.is_empty() || self.antennas.contains(&0) {
            return Err(Error::domain("antennas", "need at least one positive antenna count"));
        }
        for &x in &self.sweep {
            match self.kind {
                ExperimentKind::RateVsPrior => probability("sweep", x)?,
                _ if !x.is_finite() => return Err(Error::domain("sweep", format!("{x} dB is not finite"))),
                _ => {}
            }
        }
        if self.kind == ExperimentKind::ThroughputVsSnr && self.split_ratios.is_empty() {
            return Err(Error::domain("split_ratios", "must not be empty"));
        }
        for &eta in &self.split_ratios {
            probability("split_ratios", eta)?;
        }
        Ok(())
    }

    pub fn trials(&self) -> usize {
        self.params.trials
    }

    pub fn seed(&self) -> u64 {
        self.params.seed
    }
}

/// One `(x, series)` cell of a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    pub series: String,
    pub y: f64,
    pub standard_error: f64,
    pub trials: usize,
}

/// Measured backscatter BER.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerEstimate {
    pub ber: f64,
    /// Standard error over per-frame error ratios.
    pub standard_error: f64,
    pub trials: usize,
    pub bit_errors: u64,
}

/// Counts bit errors in one simulated frame of `I` uniformly random bits.
fn frame_errors<R: rand::Rng + ?Sized>(params: &SimParams, rng: &mut R) -> u32 {
    let ch = sample_channel(params, rng);
    let cov = build_covariances(&ch, params.spreading);
    let payload: Vec<u8> = (0..params.frame_bits).map(|_| u8::from(rng.random::<bool>())).collect();
    let states = differential_encode(&payload);
    let blocks = synthesize_frame(&ch, &states[1..], params, rng).expect("frame length matches");
    let detected = detect_frame(&blocks, &cov).expect("dimensions consistent");
    let decoded = decode_detected(&detected).expect("detector emits bits");
    payload.iter().zip(&decoded).filter(|(a, b)| a != b).count() as u32
}

/// Backscatter BER over `trials` frames, trial `t` drawing from stream `t` of `seed`.
pub fn run_ber(params: &SimParams, trials: usize, seed: u64) -> Result<BerEstimate> {
    params.validate()?;
    if trials == 0 {
        return Err(Error::domain("trials", "must be at least 1"));
    }
    let errors = map_trials(seed, trials, |rng| frame_errors(params, rng));
    let bits = params.frame_bits as f64;
    let ratios: Vec<f64> = errors.iter().map(|&e| f64::from(e) / bits).collect();
    let summary = summarize(&ratios);
    let bit_errors = errors.iter().map(|&e| u64::from(e)).sum::<u64>();
    Ok(BerEstimate {
        ber: bit_errors as f64 / (trials as f64 * bits),
        standard_error: summary.standard_error,
        trials,
        bit_errors,
    })
}

/// Decoded-bit counts for one split ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputEstimate {
    /// `T̄` over both streams.
    pub total: f64,
    /// `Tη(1 − ε_b)`, the backscatter stream alone.
    pub backscatter: f64,
    /// Standard error shared by both counts (only `ε_b` is random).
    pub standard_error: f64,
    pub ber: BerEstimate,
}

/// Applies the decoded-bits accounting to a measured BER.
pub fn throughput_from_ber(params: &SimParams, ber: &BerEstimate) -> Result<ThroughputEstimate> {
    let t = params.total_bits as f64;
    let eta = params.split_ratio;
    Ok(ThroughputEstimate {
        total: decoded_bits(t, eta, params.direct_ber, ber.ber)?,
        backscatter: t * eta * (1.0 - ber.ber),
        standard_error: t * eta * ber.standard_error,
        ber: *ber,
    })
}

pub fn run_throughput(params: &SimParams, trials: usize, seed: u64) -> Result<ThroughputEstimate> {
    let ber = run_ber(params, trials, seed)?;
    throughput_from_ber(params, &ber)
}

fn antenna_label(m: usize) -> String {
    format!("M={m}")
}

/// Runs every point of the sweep, in `x`-major then series order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<CurvePoint>> {
    spec.validate()?;
    let trials = spec.trials();
    let seed = spec.seed();
    let mut points = Vec::new();
    for &x in &spec.sweep {
        for &m in &spec.antennas {
            let mut p = SimParams { antennas: m, ..spec.params.clone() };
            match spec.kind {
                ExperimentKind::RateVsPrior => p.prior = x,
                _ => p.direct_snr = db_to_linear(x),
            }
            match spec.kind {
                ExperimentKind::RateVsPrior | ExperimentKind::RateVsSnr => {
                    let est = estimate_max_rate(&p, trials, seed)?;
                    points.push(CurvePoint {
                        x,
                        series: antenna_label(m),
                        y: est.rate_bits,
                        standard_error: est.standard_error,
                        trials,
                    });
                }
                ExperimentKind::BerVsSnr => {
                    let est = run_ber(&p, trials, seed)?;
                    points.push(CurvePoint {
                        x,
                        series: antenna_label(m),
                        y: est.ber,
                        standard_error: est.standard_error,
                        trials,
                    });
                }
                ExperimentKind::ThroughputVsSnr => {
                    let ber = run_ber(&p, trials, seed)?;
                    for &eta in &spec.split_ratios {
                        let q = SimParams { split_ratio: eta, ..p.clone() };
                        let est = throughput_from_ber(&q, &ber)?;
                        let label = format!("{}/eta={eta}", antenna_label(m));
                        points.push(CurvePoint {
                            x,
                            series: format!("{label}/total"),
                            y: est.total,
                            standard_error: est.standard_error,
                            trials,
                        });
                        points.push(CurvePoint {
                            x,
                            series: format!("{label}/backscatter"),
                            y: est.backscatter,
                            standard_error: est.standard_error,
                            trials,
                        });
                    }
                }
            }
        }
    }
    Ok(points)
}

pub const CSV_HEADER: &str = "x,series,y,stderr,trials";

/// Renders points as CSV (header `x,series,y,stderr,trials`, LF endings).
pub fn to_csv(points: &[CurvePoint]) -> String {
    let mut out = String::with_capacity(64 * (points.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(out, "{},{},{},{},{}", p.x, p.series, p.y, p.standard_error, p.trials);
    }
    out
}

/// One human-readable line per point.
pub fn summary_line(kind: ExperimentKind, p: &CurvePoint) -> String {
    let unit = match kind {
        ExperimentKind::RateVsPrior => "theta0",
        _ => "alpha_dt_db",
    };
    format!(
        "{} {unit}={} {} y={:.6} stderr={:.2e} trials={}",
        kind.name(),
        p.x,
        p.series,
        p.y,
        p.standard_error,
        p.trials
    )
}
