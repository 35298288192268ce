//! Message dividing, backscatter frame format and differential encoding.
//!
//! The transmitter routes every `K`-th bit of the message, starting at
//! `first_bit_id`, to the backscatter tag and sends the rest actively. The
//! tag transmits fixed-size frames laid out MSB-first as
//!
//! ```text
//! [ pilot: 8 ][ first_bit_id: 16 ][ K: 8 ][ payload: I − 32 ]
//! ```
//!
//! with pilot pattern `10101010`, and the final frame zero-padded. Frame bits
//! are differentially encoded, `e⁽ⁱ⁾ = e⁽ⁱ⁻¹⁾ ⊕ b⁽ⁱ⁾` with `e⁽⁰⁾ = 1`, before
//! they drive the tag state. The payload length travels out of band.

use rand::Rng;

use crate::error::{Error, Result};
use crate::params::probability;

/// Frame field widths. All widths are in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameLayout {
    /// Frame length `I`.
    pub total_bits: usize,
    /// Pilot length `P`.
    pub pilot_bits: usize,
    pub first_bit_id_width: usize,
    pub step_width: usize,
}

impl Default for FrameLayout {
    fn default() -> Self {
        FrameLayout {
            total_bits: 100,
            pilot_bits: 8,
            first_bit_id_width: 16,
            step_width: 8,
        }
    }
}

impl FrameLayout {
    /// Default field widths with frame length `total_bits`.
    pub fn with_total_bits(total_bits: usize) -> Result<Self> {
        let layout = FrameLayout { total_bits, ..Default::default() };
        layout.validate()?;
        Ok(layout)
    }

    /// Dividing-information width `S`.
    pub fn info_bits(&self) -> usize {
        self.first_bit_id_width + self.step_width
    }

    /// `P + S`.
    pub fn overhead(&self) -> usize {
        self.pilot_bits + self.info_bits()
    }

    pub fn payload_bits(&self) -> usize {
        self.total_bits.saturating_sub(self.overhead())
    }

    pub fn validate(&self) -> Result<()> {
        if self.overhead() >= self.total_bits {
            return Err(Error::contract(format!(
                "pilot + info ({}) must be smaller than the frame ({})",
                self.overhead(),
                self.total_bits
            )));
        }
        if self.first_bit_id_width > 63 || self.step_width > 63 {
            return Err(Error::contract("field widths above 63 bits are unsupported"));
        }
        Ok(())
    }

    /// Alternating `1010…` pilot of length `P`.
    pub fn pilot(&self) -> Vec<u8> {
        (0..self.pilot_bits).map(|i| u8::from(i % 2 == 0)).collect()
    }

    /// Frames needed for `payload_len` payload bits.
    pub fn frames_for(&self, payload_len: usize) -> usize {
        payload_len.div_ceil(self.payload_bits())
    }
}

/// Appends `value` as `width` bits, MSB first.
fn push_field(out: &mut Vec<u8>, value: u64, width: usize) {
    out.extend((0..width).rev().map(|k| ((value >> k) & 1) as u8));
}

fn read_field(bits: &[u8]) -> u64 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | u64::from(b))
}

fn check_bits(bits: &[u8], what: &str) -> Result<()> {
    match bits.iter().position(|&b| b > 1) {
        Some(i) => Err(Error::contract(format!("{what}[{i}] = {} is not a bit", bits[i]))),
        None => Ok(()),
    }
}

/// The two streams produced from one message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMessage {
    pub active_bits: Vec<u8>,
    pub backscatter_payload: Vec<u8>,
    pub first_bit_id: usize,
    /// Stride `K` between extracted bits.
    pub step: usize,
}

fn check_positions(len: usize, first_bit_id: usize, step: usize, count: usize) -> Result<()> {
    if count == 0 {
        return Ok(());
    }
    if step == 0 && count > 1 {
        return Err(Error::contract("step K must be at least 1"));
    }
    let last = (count - 1)
        .checked_mul(step)
        .and_then(|o| o.checked_add(first_bit_id))
        .ok_or_else(|| Error::contract("extraction positions overflow"))?;
    if last >= len {
        return Err(Error::contract(format!(
            "position {last} (first {first_bit_id}, step {step}, count {count}) beyond message of {len} bits"
        )));
    }
    Ok(())
}

/// Takes `count` bits at `first_bit_id + j·step` for the backscatter stream;
/// the remaining bits form the active stream in original order.
pub fn split_message(original: &[u8], first_bit_id: usize, step: usize, count: usize) -> Result<SplitMessage> {
    check_bits(original, "original")?;
    check_positions(original.len(), first_bit_id, step, count)?;
    let mut taken = vec![false; original.len()];
    let backscatter_payload = (0..count)
        .map(|j| {
            let pos = first_bit_id + j * step;
            taken[pos] = true;
            original[pos]
        })
        .collect();
    let active_bits = original
        .iter()
        .zip(&taken)
        .filter(|(_, &t)| !t)
        .map(|(&b, _)| b)
        .collect();
    Ok(SplitMessage {
        active_bits,
        backscatter_payload,
        first_bit_id,
        step,
    })
}

/// Receiver-side inverse of [`split_message`].
pub fn merge_message(active: &[u8], payload: &[u8], first_bit_id: usize, step: usize) -> Result<Vec<u8>> {
    let len = active.len() + payload.len();
    check_positions(len, first_bit_id, step, payload.len())?;
    let mut out = Vec::with_capacity(len);
    let mut active_iter = active.iter();
    let mut payload_iter = payload.iter().enumerate().peekable();
    for pos in 0..len {
        let from_payload = matches!(payload_iter.peek(), Some((j, _)) if first_bit_id + j * step == pos);
        let bit = if from_payload {
            payload_iter.next().map(|(_, b)| *b)
        } else {
            active_iter.next().copied()
        };
        out.push(bit.ok_or_else(|| Error::contract("stream lengths inconsistent with metadata"))?);
    }
    Ok(out)
}

/// Dividing parameters chosen for one message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitPlan {
    pub first_bit_id: usize,
    pub step: usize,
    pub count: usize,
}

impl SplitPlan {
    /// Routes `round(η·len)` bits to the backscatter stream with the widest
    /// stride that fits both the message and the layout's step field, and a
    /// random first position.
    pub fn random<R: Rng + ?Sized>(len: usize, split_ratio: f64, layout: &FrameLayout, rng: &mut R) -> Result<Self> {
        probability("split_ratio", split_ratio)?;
        let count = (split_ratio * len as f64).round() as usize;
        let max_step = (1usize << layout.step_width) - 1;
        let max_id = (1usize << layout.first_bit_id_width) - 1;
        if count == 0 {
            return Ok(SplitPlan { first_bit_id: 0, step: 1, count });
        }
        let step = (len / count).clamp(1, max_step);
        let slack = len - 1 - (count - 1) * step;
        let first_bit_id = rng.random_range(0..=slack.min(max_id));
        Ok(SplitPlan { first_bit_id, step, count })
    }
}

/// `e⁽⁰⁾ = 1, e⁽ⁱ⁾ = e⁽ⁱ⁻¹⁾ ⊕ b⁽ⁱ⁾`. The output has one more entry than the input.
pub fn differential_encode(bits: &[u8]) -> Vec<u8> {
    let mut states = Vec::with_capacity(bits.len() + 1);
    let mut e = 1u8;
    states.push(e);
    for &b in bits {
        e ^= b & 1;
        states.push(e);
    }
    states
}

/// `b⁽ⁱ⁾ = e⁽ⁱ⁻¹⁾ ⊕ e⁽ⁱ⁾`; `states` includes `e⁽⁰⁾`.
pub fn differential_decode(states: &[u8]) -> Result<Vec<u8>> {
    if states.is_empty() {
        return Err(Error::contract("state sequence must include e(0)"));
    }
    check_bits(states, "states")?;
    Ok(states.windows(2).map(|w| w[0] ^ w[1]).collect())
}

/// Decodes detected states `ê⁽¹⁾…ê⁽ᴵ⁾`, using the known reference `e⁽⁰⁾ = 1`.
pub fn decode_detected(detected: &[u8]) -> Result<Vec<u8>> {
    check_bits(detected, "detected")?;
    let mut prev = 1u8;
    Ok(detected
        .iter()
        .map(|&e| {
            let b = prev ^ e;
            prev = e;
            b
        })
        .collect())
}

/// One frame: raw bits `b⁽¹⁾…b⁽ᴵ⁾` and encoded states `e⁽⁰⁾…e⁽ᴵ⁾`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackscatterFrame {
    pub bits: Vec<u8>,
    pub states: Vec<u8>,
}

impl BackscatterFrame {
    pub fn from_bits(bits: Vec<u8>) -> Self {
        let states = differential_encode(&bits);
        BackscatterFrame { bits, states }
    }

    /// States that drive the tag, `e⁽¹⁾…e⁽ᴵ⁾`.
    pub fn transmitted_states(&self) -> &[u8] {
        &self.states[1..]
    }
}

/// Packs `payload` into frames carrying pilot and dividing information.
pub fn build_frames(payload: &[u8], layout: &FrameLayout, first_bit_id: usize, step: usize) -> Result<Vec<BackscatterFrame>> {
    layout.validate()?;
    check_bits(payload, "payload")?;
    if (first_bit_id as u64) >> layout.first_bit_id_width != 0 {
        return Err(Error::contract(format!(
            "first_bit_id {first_bit_id} exceeds {} bits",
            layout.first_bit_id_width
        )));
    }
    if (step as u64) >> layout.step_width != 0 {
        return Err(Error::contract(format!("step {step} exceeds {} bits", layout.step_width)));
    }
    let mut header = layout.pilot();
    push_field(&mut header, first_bit_id as u64, layout.first_bit_id_width);
    push_field(&mut header, step as u64, layout.step_width);
    Ok(payload
        .chunks(layout.payload_bits())
        .map(|chunk| {
            let mut bits = header.clone();
            bits.extend_from_slice(chunk);
            bits.resize(layout.total_bits, 0);
            BackscatterFrame::from_bits(bits)
        })
        .collect())
}

/// Payload and dividing information recovered from a frame sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedFrames {
    pub payload: Vec<u8>,
    pub first_bit_id: usize,
    pub step: usize,
}

/// Parses raw frame bits; `payload_len` strips the padding of the last frame.
pub fn parse_frames(frames: &[Vec<u8>], layout: &FrameLayout, payload_len: usize) -> Result<ParsedFrames> {
    layout.validate()?;
    if frames.len() != layout.frames_for(payload_len) {
        return Err(Error::contract(format!(
            "{} frames cannot carry {payload_len} payload bits",
            frames.len()
        )));
    }
    let pilot = layout.pilot();
    let id_end = layout.pilot_bits + layout.first_bit_id_width;
    let mut meta = None;
    let mut payload = Vec::with_capacity(payload_len);
    for (index, bits) in frames.iter().enumerate() {
        if bits.len() != layout.total_bits {
            return Err(Error::Frame { index, reason: format!("length {} != {}", bits.len(), layout.total_bits) });
        }
        check_bits(bits, "frame")?;
        if bits[..layout.pilot_bits] != pilot[..] {
            return Err(Error::Frame { index, reason: "pilot mismatch".into() });
        }
        let this = (
            read_field(&bits[layout.pilot_bits..id_end]) as usize,
            read_field(&bits[id_end..layout.overhead()]) as usize,
        );
        if *meta.get_or_insert(this) != this {
            return Err(Error::Frame { index, reason: "dividing information differs between frames".into() });
        }
        payload.extend_from_slice(&bits[layout.overhead()..]);
    }
    payload.truncate(payload_len);
    let (first_bit_id, step) = meta.unwrap_or((0, 0));
    Ok(ParsedFrames { payload, first_bit_id, step })
}

/// Expected successfully decoded bits, `T(1−η)(1−ε_d) + Tη(1−ε_b)`.
pub fn decoded_bits(total_bits: f64, split_ratio: f64, direct_ber: f64, backscatter_ber: f64) -> Result<f64> {
    if !(total_bits >= 0.0 && total_bits.is_finite()) {
        return Err(Error::domain("total_bits", format!("must be finite and >= 0, got {total_bits}")));
    }
    probability("split_ratio", split_ratio)?;
    probability("direct_ber", direct_ber)?;
    probability("backscatter_ber", backscatter_ber)?;
    Ok(total_bits * (1.0 - split_ratio) * (1.0 - direct_ber) + total_bits * split_ratio * (1.0 - backscatter_ber))
}

/// Bits of a hex string, MSB first within each nibble.
pub fn bits_from_hex(hex: &str) -> Result<Vec<u8>> {
    let hex = hex.trim().trim_start_matches("0x");
    hex.chars()
        .map(|c| {
            c.to_digit(16)
                .ok_or_else(|| Error::contract(format!("`{c}` is not a hex digit")))
        })
        .try_fold(Vec::with_capacity(hex.len() * 4), |mut acc, d| {
            push_field(&mut acc, u64::from(d?), 4);
            Ok(acc)
        })
}
