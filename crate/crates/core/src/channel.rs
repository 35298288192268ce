//! Rayleigh fading draws and received-signal synthesis.
//!
//! During backscatter symbol `i` the receiver observes, for `n = 1..N`,
//!
//! ```text
//! y_n = h1 · s_n + e · h2 · s_n + σ_n,   h1 = f_r √α_dt,   h2 = g_r f_b √α_bt
//! ```
//!
//! with `s_n ~ CN(0, 1)` the unknown ambient symbol and `σ_n ~ CN(0, I_M)`.
//! One channel realization is held for a whole frame.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::params::SimParams;

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

/// One draw from CN(0, 1): independent real and imaginary parts of variance 1/2.
#[inline]
pub fn cscg<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// A length-`len` vector of i.i.d. CN(0, 1) entries.
pub fn cscg_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> CVector {
    CVector::from_fn(len, |_, _| cscg(rng))
}

/// Fading state of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// `f_r`: transmitter to receiver fading, one entry per antenna.
    pub direct_fading: CVector,
    /// `f_b`: tag to receiver fading.
    pub tag_fading: CVector,
    /// `g_r`: transmitter to tag fading.
    pub tag_incident: Complex64,
    /// `h1 = f_r √α_dt`.
    pub h1: CVector,
    /// `h2 = g_r f_b √α_bt`.
    pub h2: CVector,
}

impl ChannelRealization {
    pub fn from_fading(
        direct_fading: CVector,
        tag_fading: CVector,
        tag_incident: Complex64,
        direct_snr: f64,
        backscatter_snr: f64,
    ) -> Result<Self> {
        if direct_fading.len() != tag_fading.len() || direct_fading.is_empty() {
            return Err(Error::contract(format!(
                "fading vectors must share a nonzero length, got {} and {}",
                direct_fading.len(),
                tag_fading.len()
            )));
        }
        let h1 = &direct_fading * Complex64::from(direct_snr.sqrt());
        let h2 = &tag_fading * (tag_incident * backscatter_snr.sqrt());
        Ok(ChannelRealization {
            direct_fading,
            tag_fading,
            tag_incident,
            h1,
            h2,
        })
    }

    /// Builds a realization straight from the effective channels, with the
    /// fading fields set so that the invariants hold at unit SNRs.
    pub fn from_effective(h1: CVector, h2: CVector) -> Result<Self> {
        Self::from_fading(h1, h2, Complex64::new(1.0, 0.0), 1.0, 1.0)
    }

    pub fn antennas(&self) -> usize {
        self.h1.len()
    }
}

/// Draws a fresh realization for one frame.
pub fn sample_channel<R: Rng + ?Sized>(params: &SimParams, rng: &mut R) -> ChannelRealization {
    let m = params.antennas;
    let direct_fading = cscg_vector(m, rng);
    let tag_fading = cscg_vector(m, rng);
    let tag_incident = cscg(rng);
    ChannelRealization::from_fading(
        direct_fading,
        tag_fading,
        tag_incident,
        params.direct_snr,
        params.backscatter_snr(),
    )
    .expect("antenna count validated")
}

/// The `N × M` observation for one backscatter symbol; row `n` is `y_nᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedBlock {
    pub samples: CMatrix,
    /// Backscatter symbol index within its frame (0-based).
    pub index: usize,
}

impl ReceivedBlock {
    pub fn spreading(&self) -> usize {
        self.samples.nrows()
    }

    pub fn antennas(&self) -> usize {
        self.samples.ncols()
    }
}

/// Tag state `e` during one backscatter symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TagState {
    /// `e = 0`
    Absorbing,
    /// `e = 1`
    Reflecting,
}

impl TagState {
    pub fn from_bit(bit: u8) -> Option<Self> {
        match bit {
            0 => Some(TagState::Absorbing),
            1 => Some(TagState::Reflecting),
            _ => None,
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            TagState::Absorbing => 0,
            TagState::Reflecting => 1,
        }
    }
}

/// Synthesizes one block with the tag held in `state` for all `N` samples.
pub fn synthesize_block<R: Rng + ?Sized>(
    ch: &ChannelRealization,
    state: TagState,
    params: &SimParams,
    rng: &mut R,
) -> ReceivedBlock {
    let gain = match state {
        TagState::Absorbing => ch.h1.clone(),
        TagState::Reflecting => &ch.h1 + &ch.h2,
    };
    let n = params.spreading;
    let noise = params.noise_scale;
    let symbols: Vec<Complex64> = (0..n).map(|_| cscg(rng)).collect();
    let mut samples = CMatrix::zeros(n, gain.len());
    // Storage is column-major: one contiguous run of N samples per antenna.
    for (column, g) in samples.as_mut_slice().chunks_exact_mut(n).zip(gain.iter()) {
        for (y, s) in column.iter_mut().zip(&symbols) {
            *y = g * s;
            if noise != 0.0 {
                *y += cscg(rng) * noise;
            }
        }
    }
    ReceivedBlock { samples, index: 0 }
}

/// Synthesizes a frame: one block per encoded state, sharing `ch`.
pub fn synthesize_frame<R: Rng + ?Sized>(
    ch: &ChannelRealization,
    encoded: &[u8],
    params: &SimParams,
    rng: &mut R,
) -> Result<Vec<ReceivedBlock>> {
    if encoded.len() != params.frame_bits {
        return Err(Error::contract(format!(
            "frame carries {} states, expected {}",
            encoded.len(),
            params.frame_bits
        )));
    }
    encoded
        .iter()
        .enumerate()
        .map(|(i, &e)| match TagState::from_bit(e) {
            Some(state) => {
                let mut block = synthesize_block(ch, state, params, rng);
                block.index = i;
                Ok(block)
            }
            None => Err(Error::contract(format!("state {i} is {e}, not a bit"))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(m: usize) -> SimParams {
        SimParams {
            antennas: m,
            ..SimParams::default()
        }
    }

    #[test]
    fn fading_has_unit_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = 100_000;
        let (mut power, mut re2, mut im2) = (0.0, 0.0, 0.0);
        for _ in 0..draws {
            let z = cscg(&mut rng);
            power += z.norm_sqr();
            re2 += z.re * z.re;
            im2 += z.im * z.im;
        }
        let n = draws as f64;
        assert!((power / n - 1.0).abs() < 0.02);
        assert!((re2 / n - 0.5).abs() < 0.01);
        assert!((im2 / n - 0.5).abs() < 0.01);
    }

    #[test]
    fn sampled_channel_entries_have_unit_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = params(4);
        let draws = 25_000;
        let mut acc = 0.0;
        for _ in 0..draws {
            let ch = sample_channel(&p, &mut rng);
            acc += ch.direct_fading.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        assert!((acc / (draws * 4) as f64 - 1.0).abs() < 0.02);
    }

    #[test]
    fn zero_snr_gives_zero_h1() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = SimParams {
            direct_snr: 0.0,
            ..params(3)
        };
        let ch = sample_channel(&p, &mut rng);
        assert!(ch.h1.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn effective_channels_consistent_with_fading() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = params(5);
        let ch = sample_channel(&p, &mut rng);
        let h1 = &ch.direct_fading * Complex64::from(p.direct_snr.sqrt());
        let h2 = &ch.tag_fading * ch.tag_incident * Complex64::from(p.backscatter_snr().sqrt());
        assert!((h1 - &ch.h1).norm() < 1e-15);
        assert!((h2 - &ch.h2).norm() < 1e-15);
    }

    #[test]
    fn noiseless_absorbing_rows_are_scaled_h1() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = SimParams {
            noise_scale: 0.0,
            ..params(4)
        };
        let ch = sample_channel(&p, &mut rng);
        let block = synthesize_block(&ch, TagState::Absorbing, &p, &mut rng);
        let h1n = ch.h1.norm_squared();
        for row in block.samples.row_iter() {
            // Recover the scalar symbol and confirm the row is exactly s · h1ᵀ.
            let s = row.iter().zip(ch.h1.iter()).map(|(y, h)| y * h.conj()).sum::<Complex64>() / h1n;
            for (y, h) in row.iter().zip(ch.h1.iter()) {
                assert!((y - h * s).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn noiseless_unit_symbol_row_equals_h1() {
        // With s = 1 and no noise the received vector is h1 itself.
        let h1 = CVector::from_vec(vec![Complex64::new(0.3, -1.1), Complex64::new(2.0, 0.5)]);
        let h2 = CVector::from_vec(vec![Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.2)]);
        let ch = ChannelRealization::from_effective(h1.clone(), h2).unwrap();
        let s = Complex64::new(1.0, 0.0);
        let row = &ch.h1 * s;
        assert_eq!(row, h1);
    }

    #[test]
    fn noiseless_reflecting_rows_are_rank_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = SimParams {
            noise_scale: 0.0,
            ..params(6)
        };
        let ch = sample_channel(&p, &mut rng);
        let g = &ch.h1 + &ch.h2;
        let block = synthesize_block(&ch, TagState::Reflecting, &p, &mut rng);
        for row in block.samples.row_iter() {
            let s = row[0] / g[0];
            for (y, gm) in row.iter().zip(g.iter()) {
                assert!((y - gm * s).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn frame_length_mismatch_is_contract_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p = params(2);
        let ch = sample_channel(&p, &mut rng);
        assert!(matches!(
            synthesize_frame(&ch, &[1, 0, 1], &p, &mut rng),
            Err(Error::Contract(_))
        ));
        let mut states = vec![0u8; p.frame_bits];
        states[7] = 2;
        assert!(synthesize_frame(&ch, &states, &p, &mut rng).is_err());
    }

    #[test]
    fn single_state_frame_matches_block() {
        let p = SimParams {
            frame_bits: 1,
            ..params(3)
        };
        let ch = sample_channel(&p, &mut ChaCha8Rng::seed_from_u64(7));
        let frame = synthesize_frame(&ch, &[1], &p, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        let block = synthesize_block(&ch, TagState::Reflecting, &p, &mut ChaCha8Rng::seed_from_u64(8));
        assert_eq!(frame.len(), 1);
        assert_eq!(frame[0].samples, block.samples);
    }

    #[test]
    fn replay_is_bit_identical() {
        let p = params(4);
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ch = sample_channel(&p, &mut rng);
            let states: Vec<u8> = (0..p.frame_bits).map(|i| (i % 3 == 0) as u8).collect();
            synthesize_frame(&ch, &states, &p, &mut rng).unwrap()
        };
        assert_eq!(run(99), run(99));
        assert_ne!(run(99), run(100));
    }
}
