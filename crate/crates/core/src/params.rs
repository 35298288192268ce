//! Physical link budgets and the dimensionless simulation knobs derived from them.
//!
//! The receiver noise is CN(0, 1), so the average received direct-link power
//! *is* the direct-link SNR `α_dt`. The backscatter-link SNR follows as
//! `α_bt = α̃_r · α_dt`, where `α̃_r` is the relative backscatter gain.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::codec::FrameLayout;
use crate::error::{Error, Result};

/// Converts decibels to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to decibels.
///
/// `linear_to_db(0.0)` is `f64::NEG_INFINITY`; negative inputs yield NaN.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Physical description of the transmitter, tag and receiver geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// Transmit power `P_t` in watts.
    pub transmit_power: f64,
    pub tx_gain: f64,
    pub rx_gain: f64,
    pub tag_gain: f64,
    /// Transmitter to receiver distance in meters.
    pub tx_rx_distance: f64,
    /// Transmitter to tag distance in meters.
    pub tx_tag_distance: f64,
    /// Tag to receiver distance in meters.
    pub tag_rx_distance: f64,
    pub path_loss_exponent: f64,
    /// Carrier wavelength in meters.
    pub wavelength: f64,
    /// Tag reflection coefficient, `|γ| ≤ 1`.
    pub reflection: Complex64,
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        positive("transmit_power", self.transmit_power)?;
        positive("tx_gain", self.tx_gain)?;
        positive("rx_gain", self.rx_gain)?;
        positive("tag_gain", self.tag_gain)?;
        positive("tx_rx_distance", self.tx_rx_distance)?;
        positive("tx_tag_distance", self.tx_tag_distance)?;
        positive("tag_rx_distance", self.tag_rx_distance)?;
        positive("wavelength", self.wavelength)?;
        if !self.path_loss_exponent.is_finite() || self.path_loss_exponent < 0.0 {
            return Err(Error::domain(
                "path_loss_exponent",
                format!("must be finite and non-negative, got {}", self.path_loss_exponent),
            ));
        }
        let mag = self.reflection.norm();
        if !mag.is_finite() || mag > 1.0 {
            return Err(Error::domain(
                "reflection",
                format!("|γ| must not exceed 1, got {mag}"),
            ));
        }
        Ok(())
    }

    /// Free-space constant `κ = (λ / 4π)²`.
    pub fn kappa(&self) -> f64 {
        (self.wavelength / (4.0 * PI)).powi(2)
    }

    /// Average power received at the tag, `κ P_t G_t G_b / L_b^υ`.
    pub fn tag_incident_power(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.kappa() * self.transmit_power * self.tx_gain * self.tag_gain
            / self.tx_tag_distance.powf(self.path_loss_exponent))
    }
}

fn positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(field, format!("must be finite and > 0, got {value}")))
    }
}

/// Direct-link SNR `α_dt = κ P_t G_t G_r / L_r^υ` (unit noise variance).
pub fn compute_direct_snr(b: &LinkBudget) -> Result<f64> {
    b.validate()?;
    Ok(b.kappa() * b.transmit_power * b.tx_gain * b.rx_gain
        / b.tx_rx_distance.powf(b.path_loss_exponent))
}

/// Relative backscatter gain `α̃_r = κ |γ|² G_b² L_r^υ / (L_b^υ L_e^υ)`.
pub fn compute_relative_backscatter_gain(b: &LinkBudget) -> Result<f64> {
    b.validate()?;
    let v = b.path_loss_exponent;
    Ok(b.kappa() * b.reflection.norm_sqr() * b.tag_gain * b.tag_gain * b.tx_rx_distance.powf(v)
        / (b.tx_tag_distance.powf(v) * b.tag_rx_distance.powf(v)))
}

/// How many received samples form one observation in the rate estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observation {
    /// All `N` samples of one backscatter symbol.
    #[default]
    Block,
    /// A single received vector.
    Single,
}

/// Dimensionless simulation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    /// Receive antennas `M`.
    pub antennas: usize,
    /// Transmitter samples per backscatter bit `N`.
    pub spreading: usize,
    /// Backscatter frame length `I`.
    pub frame_bits: usize,
    /// Prior probability `θ₀` of backscattering a 0.
    pub prior: f64,
    /// Direct-link SNR `α_dt` (linear).
    pub direct_snr: f64,
    /// Relative backscatter gain `α̃_r` (linear).
    pub relative_backscatter_gain: f64,
    /// Splitting ratio `η`.
    pub split_ratio: f64,
    /// Message length `T` in bits.
    pub total_bits: usize,
    pub seed: u64,
    pub trials: usize,
    /// Noise standard deviation multiplier; 0 disables noise.
    pub noise_scale: f64,
    /// Direct-link bit error ratio `ε_d` used in throughput accounting.
    pub direct_ber: f64,
    pub observation: Observation,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            antennas: 10,
            spreading: 5,
            frame_bits: 100,
            prior: 0.5,
            direct_snr: db_to_linear(5.0),
            relative_backscatter_gain: db_to_linear(-10.0),
            split_ratio: 0.1,
            total_bits: 1000,
            seed: 0,
            trials: 100_000,
            noise_scale: 1.0,
            direct_ber: 0.0,
            observation: Observation::Block,
        }
    }
}

impl SimParams {
    /// Builds the SNR pair from a physical link budget, keeping the other defaults.
    pub fn from_link_budget(b: &LinkBudget) -> Result<Self> {
        Ok(SimParams {
            direct_snr: compute_direct_snr(b)?,
            relative_backscatter_gain: compute_relative_backscatter_gain(b)?,
            ..SimParams::default()
        })
    }

    /// Backscatter-link SNR `α_bt = α̃_r · α_dt`.
    pub fn backscatter_snr(&self) -> f64 {
        self.relative_backscatter_gain * self.direct_snr
    }

    /// `θ₁ = 1 − θ₀`.
    pub fn prior_one(&self) -> f64 {
        1.0 - self.prior
    }

    pub fn samples_per_observation(&self) -> usize {
        match self.observation {
            Observation::Block => self.spreading,
            Observation::Single => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.antennas == 0 {
            return Err(Error::domain("antennas", "must be at least 1"));
        }
        if self.spreading == 0 {
            return Err(Error::domain("spreading", "must be at least 1"));
        }
        let overhead = FrameLayout::default().overhead();
        if self.frame_bits <= overhead {
            return Err(Error::domain(
                "frame_bits",
                format!("must exceed pilot + dividing-info overhead of {overhead} bits"),
            ));
        }
        if self.total_bits == 0 {
            return Err(Error::domain("total_bits", "must be at least 1"));
        }
        if self.trials == 0 {
            return Err(Error::domain("trials", "must be at least 1"));
        }
        probability("prior", self.prior)?;
        probability("split_ratio", self.split_ratio)?;
        probability("direct_ber", self.direct_ber)?;
        non_negative("direct_snr", self.direct_snr)?;
        non_negative("relative_backscatter_gain", self.relative_backscatter_gain)?;
        non_negative("noise_scale", self.noise_scale)?;
        Ok(())
    }
}

pub(crate) fn probability(field: &'static str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(field, format!("must lie in [0, 1], got {p}")))
    }
}

fn non_negative(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(field, format!("must be finite and >= 0, got {value}")))
    }
}
