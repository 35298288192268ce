//! Covariance statistics and the maximum-likelihood backscatter detector.
//!
//! Conditioned on the tag state, each received vector is CN(0, K_e) with
//!
//! ```text
//! K0 = h1 h1ᴴ + I_M,    K1 = (h1 + h2)(h1 + h2)ᴴ + I_M.
//! ```
//!
//! Both are identity-plus-rank-one, so inverses, log-determinants and
//! quadratic forms have exact closed forms:
//!
//! ```text
//! (I + v vᴴ)⁻¹ = I − v vᴴ / (1 + ‖v‖²),   ln|I + v vᴴ| = ln(1 + ‖v‖²),
//! yᴴ (I + v vᴴ)⁻¹ y = ‖y‖² − |vᴴ y|² / (1 + ‖v‖²).
//! ```
//!
//! The detector decides `ê = 1` when `Σₙ yₙᴴ (K0⁻¹ − K1⁻¹) yₙ` exceeds
//! `N ln(|K1| / |K0|)` and `ê = 0` otherwise, ties included.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::channel::{CMatrix, CVector, ChannelRealization, ReceivedBlock, TagState};
use crate::error::{Error, Result};

/// Identity plus a rank-one Hermitian term, `I + v vᴴ`.
#[derive(Debug, Clone, PartialEq)]
struct RankOne {
    v: CVector,
    /// `1 / (1 + ‖v‖²)`
    shrink: f64,
    logdet: f64,
}

impl RankOne {
    fn new(v: CVector) -> Self {
        let energy = v.norm_squared();
        RankOne {
            v,
            shrink: 1.0 / (1.0 + energy),
            logdet: energy.ln_1p(),
        }
    }

    fn matrix(&self) -> CMatrix {
        let m = self.v.len();
        CMatrix::identity(m, m) + &self.v * self.v.adjoint()
    }

    fn inverse(&self) -> CMatrix {
        let m = self.v.len();
        CMatrix::identity(m, m) - &self.v * self.v.adjoint() * Complex64::from(self.shrink)
    }

    /// `|vᴴ y|² / (1 + ‖v‖²)`, the part removed from `‖y‖²` by the inverse.
    #[inline]
    fn projected_energy<'a>(&self, y: impl Iterator<Item = &'a Complex64>) -> f64 {
        let inner: Complex64 = self.v.iter().zip(y).map(|(v, y)| v.conj() * y).sum();
        inner.norm_sqr() * self.shrink
    }
}

/// Per-hypothesis covariances for one channel realization and spreading factor.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariancePair {
    pub k0: CMatrix,
    pub k1: CMatrix,
    pub k0_inv: CMatrix,
    pub k1_inv: CMatrix,
    pub logdet0: f64,
    pub logdet1: f64,
    /// `N (logdet1 − logdet0)`.
    pub threshold: f64,
    spreading: usize,
    absorbing: RankOne,
    reflecting: RankOne,
}

/// Builds `K0`, `K1` and their cached inverses for blocks of `spreading` samples.
pub fn build_covariances(ch: &ChannelRealization, spreading: usize) -> CovariancePair {
    let absorbing = RankOne::new(ch.h1.clone());
    let reflecting = RankOne::new(&ch.h1 + &ch.h2);
    let (logdet0, logdet1) = (absorbing.logdet, reflecting.logdet);
    CovariancePair {
        k0: absorbing.matrix(),
        k1: reflecting.matrix(),
        k0_inv: absorbing.inverse(),
        k1_inv: reflecting.inverse(),
        logdet0,
        logdet1,
        threshold: spreading as f64 * (logdet1 - logdet0),
        spreading,
        absorbing,
        reflecting,
    }
}

impl CovariancePair {
    pub fn antennas(&self) -> usize {
        self.absorbing.v.len()
    }

    pub fn spreading(&self) -> usize {
        self.spreading
    }

    fn term(&self, state: TagState) -> &RankOne {
        match state {
            TagState::Absorbing => &self.absorbing,
            TagState::Reflecting => &self.reflecting,
        }
    }

    pub fn logdet(&self, state: TagState) -> f64 {
        self.term(state).logdet
    }

    /// `Σₙ yₙᴴ K_e⁻¹ yₙ` over the rows of `samples`.
    pub fn quadratic_form(&self, samples: &CMatrix, state: TagState) -> f64 {
        let term = self.term(state);
        samples
            .row_iter()
            .map(|row| row.norm_squared() - term.projected_energy(row.iter()))
            .sum()
    }

    fn check_antennas(&self, block: &ReceivedBlock) -> Result<()> {
        if block.antennas() != self.antennas() {
            return Err(Error::contract(format!(
                "block has {} antennas, covariances have {}",
                block.antennas(),
                self.antennas()
            )));
        }
        Ok(())
    }

    fn check_block(&self, block: &ReceivedBlock) -> Result<()> {
        self.check_antennas(block)?;
        if block.spreading() != self.spreading {
            return Err(Error::contract(format!(
                "block has {} samples, detector built for {}",
                block.spreading(),
                self.spreading
            )));
        }
        Ok(())
    }
}

/// Log-likelihood of a block under one hypothesis:
/// `−N M ln π − N ln|K_e| − Σₙ yₙᴴ K_e⁻¹ yₙ`, with `N` the number of rows in `block`.
pub fn log_likelihood(block: &ReceivedBlock, cov: &CovariancePair, state: TagState) -> Result<f64> {
    cov.check_antennas(block)?;
    let rows = block.spreading() as f64;
    let m = block.antennas() as f64;
    Ok(-rows * m * PI.ln() - rows * cov.logdet(state) - cov.quadratic_form(&block.samples, state))
}

/// Log-likelihood ratio `ln L(Y | e=1) − ln L(Y | e=0)` for any number of rows.
pub fn log_likelihood_ratio(block: &ReceivedBlock, cov: &CovariancePair) -> Result<f64> {
    cov.check_antennas(block)?;
    let rows = block.spreading() as f64;
    Ok(detection_statistic(block, cov) - rows * (cov.logdet1 - cov.logdet0))
}

/// `Σₙ yₙᴴ (K0⁻¹ − K1⁻¹) yₙ`.
///
/// The `‖yₙ‖²` terms of both quadratic forms cancel exactly, leaving the
/// difference of the two rank-one projections.
pub fn detection_statistic(block: &ReceivedBlock, cov: &CovariancePair) -> f64 {
    block
        .samples
        .row_iter()
        .map(|row| {
            cov.reflecting.projected_energy(row.iter()) - cov.absorbing.projected_energy(row.iter())
        })
        .sum()
}

/// ML decision for one block; exact ties decode to 0.
pub fn ml_detect(block: &ReceivedBlock, cov: &CovariancePair) -> Result<u8> {
    cov.check_block(block)?;
    Ok(u8::from(detection_statistic(block, cov) > cov.threshold))
}

/// Applies [`ml_detect`] to every block of a frame.
pub fn detect_frame(blocks: &[ReceivedBlock], cov: &CovariancePair) -> Result<Vec<u8>> {
    blocks.iter().map(|b| ml_detect(b, cov)).collect()
}
