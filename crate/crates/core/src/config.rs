//! JSON experiment configs.
//!
//! Keys are snake_case field names; unknown keys are rejected. SNR fields
//! accept either a linear value (`direct_snr`) or decibels (`direct_snr_db`),
//! never both. Omitted fields take the defaults `N = 5`, `I = 100`,
//! `α̃_r = −10 dB`, `α_dt = 5 dB`, `θ₀ = 0.5`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{ExperimentKind, ExperimentSpec};
use crate::params::{db_to_linear, Observation, SimParams};

/// Raw file contents; every field optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<ExperimentKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub antennas: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split_ratios: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spreading: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame_bits: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prior: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direct_snr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direct_snr_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_backscatter_gain: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_backscatter_gain_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_bits: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direct_ber: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observation: Option<Observation>,
}

fn either(
    linear: Option<f64>,
    db: Option<f64>,
    field: &str,
    default: f64,
) -> Result<f64> {
    match (linear, db) {
        (Some(_), Some(_)) => Err(Error::config(
            format!("{field}_db"),
            format!("give either `{field}` or `{field}_db`, not both"),
        )),
        (Some(v), None) => Ok(v),
        (None, Some(d)) => Ok(db_to_linear(d)),
        (None, None) => Ok(default),
    }
}

fn default_sweep(kind: ExperimentKind) -> Vec<f64> {
    match kind {
        ExperimentKind::RateVsPrior => (1..=9).map(|i| f64::from(i) / 10.0).collect(),
        _ => (1..=9).map(f64::from).collect(),
    }
}

fn default_antennas(kind: ExperimentKind) -> Vec<usize> {
    match kind {
        ExperimentKind::ThroughputVsSnr => vec![10],
        _ => vec![1, 2, 5, 10],
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { "<root>".to_string() } else { path }, e.inner().to_string())
        })
    }

    /// Applies defaults and validates. `default_kind` is used when the file
    /// names no kind.
    pub fn into_spec(self, default_kind: ExperimentKind) -> Result<ExperimentSpec> {
        let kind = self.kind.unwrap_or(default_kind);
        let base = SimParams::default();
        let antennas = self.antennas.unwrap_or_else(|| default_antennas(kind));
        let params = SimParams {
            antennas: antennas.first().copied().unwrap_or(base.antennas),
            spreading: self.spreading.unwrap_or(base.spreading),
            frame_bits: self.frame_bits.unwrap_or(base.frame_bits),
            prior: self.prior.unwrap_or(base.prior),
            direct_snr: either(self.direct_snr, self.direct_snr_db, "direct_snr", base.direct_snr)?,
            relative_backscatter_gain: either(
                self.relative_backscatter_gain,
                self.relative_backscatter_gain_db,
                "relative_backscatter_gain",
                base.relative_backscatter_gain,
            )?,
            split_ratio: self.split_ratio.unwrap_or(base.split_ratio),
            total_bits: self.total_bits.unwrap_or(base.total_bits),
            seed: self.seed.unwrap_or(base.seed),
            trials: self.trials.unwrap_or(base.trials),
            noise_scale: self.noise_scale.unwrap_or(base.noise_scale),
            direct_ber: self.direct_ber.unwrap_or(base.direct_ber),
            observation: self.observation.unwrap_or_default(),
        };
        let spec = ExperimentSpec {
            kind,
            sweep: self.sweep.unwrap_or_else(|| default_sweep(kind)),
            antennas,
            split_ratios: self.split_ratios.unwrap_or_else(|| vec![0.0, 0.1, 0.4]),
            params,
        };
        spec.validate().map_err(|e| match e {
            Error::Domain { field, reason } => Error::config(field, reason),
            other => other,
        })?;
        Ok(spec)
    }

    /// Canonical, fully populated form of a spec (linear SNR keys only).
    pub fn from_spec(spec: &ExperimentSpec) -> Self {
        let p = &spec.params;
        ConfigFile {
            kind: Some(spec.kind),
            sweep: Some(spec.sweep.clone()),
            antennas: Some(spec.antennas.clone()),
            split_ratios: Some(spec.split_ratios.clone()),
            spreading: Some(p.spreading),
            frame_bits: Some(p.frame_bits),
            prior: Some(p.prior),
            direct_snr: Some(p.direct_snr),
            direct_snr_db: None,
            relative_backscatter_gain: Some(p.relative_backscatter_gain),
            relative_backscatter_gain_db: None,
            split_ratio: Some(p.split_ratio),
            total_bits: Some(p.total_bits),
            seed: Some(p.seed),
            trials: Some(p.trials),
            noise_scale: Some(p.noise_scale),
            direct_ber: Some(p.direct_ber),
            observation: Some(p.observation),
        }
    }
}

/// Reads and validates a config file, defaulting the kind to `ber_vs_snr`.
pub fn load_config(path: &Path) -> Result<ExperimentSpec> {
    read_config(path)?.into_spec(ExperimentKind::BerVsSnr)
}

pub fn read_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ConfigFile::parse(&text)
}

/// Pretty JSON of the canonical form, with a trailing newline.
pub fn to_canonical_json(spec: &ExperimentSpec) -> String {
    let mut s = serde_json::to_string_pretty(&ConfigFile::from_spec(spec)).expect("plain data serializes");
    s.push('\n');
    s
}
