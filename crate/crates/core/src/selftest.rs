//! Quick oracle checks behind `bscat selftest`.

use rand::Rng;

use crate::channel::{sample_channel, synthesize_block, TagState};
use crate::codec::{
    build_frames, differential_decode, differential_encode, merge_message, parse_frames, split_message,
    FrameLayout,
};
use crate::detector::{build_covariances, ml_detect};
use crate::montecarlo::trial_rng;
use crate::oracle;
use crate::params::SimParams;
use crate::rate::posterior;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, failures: usize, cases: usize) -> CheckResult {
    CheckResult {
        name,
        passed: failures == 0,
        detail: format!("{failures} failures in {cases} cases"),
    }
}

fn random_params<R: Rng>(rng: &mut R) -> SimParams {
    SimParams {
        antennas: [1, 2, 4, 8][rng.random_range(0..4)],
        spreading: [1, 5][rng.random_range(0..2)],
        direct_snr: rng.random_range(0.1..10.0),
        relative_backscatter_gain: rng.random_range(0.01..1.0),
        ..SimParams::default()
    }
}

fn closed_form_linear_algebra(seed: u64, cases: usize) -> CheckResult {
    let mut rng = trial_rng(seed, 0);
    let mut failures = 0;
    for _ in 0..cases {
        let p = random_params(&mut rng);
        let ch = sample_channel(&p, &mut rng);
        let cov = build_covariances(&ch, p.spreading);
        let k0 = oracle::dense_covariance(&ch.h1);
        let k1 = oracle::dense_covariance(&(&ch.h1 + &ch.h2));
        let ok = [(&k0, &cov.k0_inv, cov.logdet0), (&k1, &cov.k1_inv, cov.logdet1)]
            .iter()
            .all(|(k, inv, logdet)| {
                let dense_inv = oracle::dense_inverse(k).expect("positive definite");
                let dense_logdet = oracle::dense_logdet(k).expect("positive definite");
                (dense_inv - *inv).norm() < 1e-10 && (dense_logdet - logdet).abs() < 1e-10
            });
        failures += usize::from(!ok);
    }
    check("rank-one inverse and log-determinant vs dense factorization", failures, cases)
}

fn detector_equivalence(seed: u64, cases: usize) -> CheckResult {
    let mut rng = trial_rng(seed, 1);
    let mut failures = 0;
    for i in 0..cases {
        let p = random_params(&mut rng);
        let ch = sample_channel(&p, &mut rng);
        let cov = build_covariances(&ch, p.spreading);
        let state = if i % 2 == 0 { TagState::Absorbing } else { TagState::Reflecting };
        let block = synthesize_block(&ch, state, &p, &mut rng);
        let fast = ml_detect(&block, &cov).expect("dimensions match");
        failures += usize::from(fast != oracle::naive_decision(&block, &cov.k0, &cov.k1));
    }
    check("ML rule vs direct likelihood comparison", failures, cases)
}

fn posterior_normalization(seed: u64, cases: usize) -> CheckResult {
    let mut rng = trial_rng(seed, 2);
    let mut failures = 0;
    for _ in 0..cases {
        let p = random_params(&mut rng);
        let prior = rng.random_range(0.0..=1.0);
        let ch = sample_channel(&p, &mut rng);
        let cov = build_covariances(&ch, p.spreading);
        let block = synthesize_block(&ch, TagState::Reflecting, &p, &mut rng);
        let (w0, w1) = posterior(&block, &cov, prior).expect("valid prior");
        failures += usize::from((w0 + w1 - 1.0).abs() > 1e-12 || !(0.0..=1.0).contains(&w0));
    }
    check("posterior sums to one", failures, cases)
}

fn codec_round_trips(seed: u64, cases: usize) -> CheckResult {
    let mut rng = trial_rng(seed, 3);
    let layout = FrameLayout::default();
    let mut failures = 0;
    for _ in 0..cases {
        let len = rng.random_range(0..400);
        let msg: Vec<u8> = (0..len).map(|_| rng.random_range(0..2)).collect();
        let diff_ok = differential_decode(&differential_encode(&msg)).ok().as_ref() == Some(&msg);

        let step = rng.random_range(1..20);
        let first = if len == 0 { 0 } else { rng.random_range(0..len) };
        let count = if len == 0 { 0 } else { (len - 1 - first) / step + 1 };
        let split = split_message(&msg, first, step, count).expect("positions in range");
        let merge_ok = merge_message(&split.active_bits, &split.backscatter_payload, first, step)
            .ok()
            .as_ref()
            == Some(&msg);

        let frames = build_frames(&split.backscatter_payload, &layout, first, step).expect("fits");
        let raw: Vec<Vec<u8>> = frames.iter().map(|f| f.bits.clone()).collect();
        let frame_ok = match parse_frames(&raw, &layout, split.backscatter_payload.len()) {
            Ok(parsed) => {
                parsed.payload == split.backscatter_payload
                    && (raw.is_empty() || (parsed.first_bit_id, parsed.step) == (first, step))
            }
            Err(_) => false,
        };
        failures += usize::from(!(diff_ok && merge_ok && frame_ok));
    }
    check("codec round-trips", failures, cases)
}

/// Runs every check with modest case counts.
pub fn run(seed: u64) -> Vec<CheckResult> {
    vec![
        closed_form_linear_algebra(seed, 1_000),
        detector_equivalence(seed, 10_000),
        posterior_normalization(seed, 10_000),
        codec_round_trips(seed, 2_000),
    ]
}
