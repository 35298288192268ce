//! Acceptance suite: one pass/fail line per criterion.
//!
//! Desk scale is 10⁵ trials per Monte-Carlo point. Run with
//! `cargo test --release -p backscatter-sim --test acceptance`.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use backscatter_sim::channel::{sample_channel, synthesize_block, TagState};
use backscatter_sim::codec::{
    build_frames, differential_decode, differential_encode, merge_message, parse_frames,
    split_message, FrameLayout,
};
use backscatter_sim::detector::{build_covariances, ml_detect};
use backscatter_sim::experiments::{run_ber, throughput_from_ber, BerEstimate};
use backscatter_sim::montecarlo::trial_rng;
use backscatter_sim::oracle;
use backscatter_sim::params::db_to_linear;
use backscatter_sim::rate::{binary_entropy, estimate_max_rate, posterior, RateEstimate};
use backscatter_sim::SimParams;
use rand::Rng;

const TRIALS: usize = 100_000;
const SEED: u64 = 2024;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Combined standard error of the difference of two independent-looking estimates.
fn sigma(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

fn base() -> SimParams {
    SimParams {
        antennas: 10,
        prior: 0.5,
        direct_snr: db_to_linear(5.0),
        relative_backscatter_gain: db_to_linear(-10.0),
        ..SimParams::default()
    }
}

fn rate(p: &SimParams) -> RateEstimate {
    estimate_max_rate(p, TRIALS, SEED).expect("valid params")
}

/// Shared Monte-Carlo results so criteria that reuse a curve do not recompute it.
struct Curves {
    rate_vs_prior: Vec<(f64, RateEstimate)>,
    rate_vs_antennas: Vec<(usize, RateEstimate)>,
    rate_vs_snr: Vec<(f64, RateEstimate)>,
    /// (M, dB, estimate)
    ber: Vec<(usize, f64, BerEstimate)>,
}

impl Curves {
    fn ber_at(&self, m: usize, db: f64) -> BerEstimate {
        self.ber
            .iter()
            .find(|(mm, d, _)| *mm == m && *d == db)
            .map(|(_, _, e)| *e)
            .unwrap_or_else(|| {
                let p = SimParams { antennas: m, direct_snr: db_to_linear(db), ..base() };
                run_ber(&p, TRIALS, SEED).expect("valid params")
            })
    }
}

fn snr_grid() -> Vec<f64> {
    (1..=9).map(f64::from).collect()
}

type RateCurves = (Vec<(f64, RateEstimate)>, Vec<(usize, RateEstimate)>, Vec<(f64, RateEstimate)>);

fn compute_rate_curves() -> RateCurves {
    let prior = (1..=9)
        .map(|i| {
            let theta = f64::from(i) / 10.0;
            (theta, rate(&SimParams { prior: theta, ..base() }))
        })
        .collect();
    let antennas = [1, 5, 10]
        .into_iter()
        .map(|m| (m, rate(&SimParams { antennas: m, ..base() })))
        .collect();
    let snr = snr_grid()
        .into_iter()
        .map(|db| (db, rate(&SimParams { direct_snr: db_to_linear(db), ..base() })))
        .collect();
    (prior, antennas, snr)
}

fn compute_ber_curves() -> Vec<(usize, f64, BerEstimate)> {
    let mut out = Vec::new();
    for m in [5, 10] {
        for db in snr_grid() {
            let p = SimParams { antennas: m, direct_snr: db_to_linear(db), ..base() };
            out.push((m, db, run_ber(&p, TRIALS, SEED).expect("valid params")));
        }
    }
    out
}

fn criterion_1(c: &Curves) -> Outcome {
    let best = c
        .rate_vs_prior
        .iter()
        .max_by(|a, b| a.1.rate_bits.total_cmp(&b.1.rate_bits))
        .unwrap();
    ensure(best.0 == 0.5, || format!("argmax at theta0 = {}", best.0))?;
    let mut worst = 0.0f64;
    for i in 0..4 {
        let (lo, hi) = (&c.rate_vs_prior[i].1, &c.rate_vs_prior[8 - i].1);
        let gap = (lo.rate_bits - hi.rate_bits).abs();
        let tol = 3.0 * sigma(lo.standard_error, hi.standard_error);
        ensure(gap <= tol, || format!("theta0={} vs {}: |diff| {gap:.2e} > 3σ {tol:.2e}", lo.prior, hi.prior))?;
        worst = worst.max(gap / tol);
    }
    Ok(format!("argmax 0.5, R={:.4}; worst asymmetry {:.2} of 3σ", best.1.rate_bits, worst))
}

fn criterion_2(c: &Curves) -> Outcome {
    let r = |m: usize| c.rate_vs_antennas.iter().find(|x| x.0 == m).unwrap().1;
    let (r1, r5, r10) = (r(1), r(5), r(10));
    for (hi, lo, label) in [(r10, r5, "M=10 vs M=5"), (r5, r1, "M=5 vs M=1")] {
        let s = sigma(hi.standard_error, lo.standard_error);
        ensure(hi.rate_bits - lo.rate_bits >= 3.0 * s, || {
            format!("{label}: {:.4} vs {:.4}, sep < 3σ", hi.rate_bits, lo.rate_bits)
        })?;
    }
    Ok(format!("R(1)={:.4} < R(5)={:.4} < R(10)={:.4}", r1.rate_bits, r5.rate_bits, r10.rate_bits))
}

fn criterion_3(c: &Curves) -> Outcome {
    let mut min_sep = f64::INFINITY;
    for w in c.rate_vs_snr.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let s = sigma(a.1.standard_error, b.1.standard_error);
        let sep = (b.1.rate_bits - a.1.rate_bits) / s;
        ensure(sep >= 2.0, || format!("{} dB -> {} dB separated by {sep:.2}σ", a.0, b.0))?;
        min_sep = min_sep.min(sep);
    }
    Ok(format!(
        "R from {:.4} (1 dB) to {:.4} (9 dB); min step {min_sep:.1}σ",
        c.rate_vs_snr[0].1.rate_bits,
        c.rate_vs_snr[8].1.rate_bits
    ))
}

fn criterion_4(c: &Curves) -> Outcome {
    let mut min_sep = f64::INFINITY;
    for m in [5, 10] {
        for w in snr_grid().windows(2) {
            let (a, b) = (c.ber_at(m, w[0]), c.ber_at(m, w[1]));
            let sep = (a.ber - b.ber) / sigma(a.standard_error, b.standard_error);
            ensure(sep >= 3.0, || format!("M={m} {} -> {} dB: separation {sep:.2}σ", w[0], w[1]))?;
            min_sep = min_sep.min(sep);
        }
    }
    let (b1, b5, b10) = (c.ber_at(1, 5.0), c.ber_at(5, 5.0), c.ber_at(10, 5.0));
    for (lo, hi, label) in [(b10, b5, "M=10 vs M=5"), (b5, b1, "M=5 vs M=1")] {
        let sep = (hi.ber - lo.ber) / sigma(lo.standard_error, hi.standard_error);
        ensure(sep >= 3.0, || format!("{label} at 5 dB: separation {sep:.2}σ"))?;
    }
    Ok(format!(
        "at 5 dB: M=10 {:.4} < M=5 {:.4} < M=1 {:.4}; min SNR step {min_sep:.1}σ",
        b10.ber, b5.ber, b1.ber
    ))
}

fn criterion_5(c: &Curves) -> Outcome {
    let t = 1000.0;
    let ber5 = c.ber_at(10, 5.0);
    let none = throughput_from_ber(&SimParams { split_ratio: 0.0, total_bits: 1000, direct_ber: 0.0, ..base() }, &ber5)
        .map_err(|e| e.to_string())?;
    ensure(none.total == 1000.0, || format!("eta=0 gives {}", none.total))?;
    for eta in [0.1, 0.4] {
        let mut prev_gap = f64::INFINITY;
        for db in snr_grid() {
            let ber = c.ber_at(10, db);
            let p = SimParams { split_ratio: eta, total_bits: 1000, direct_ber: 0.0, ..base() };
            let tp = throughput_from_ber(&p, &ber).map_err(|e| e.to_string())?;
            let bs = t * eta * (1.0 - ber.ber);
            let total = t * (1.0 - eta) * (1.0 - 0.0) + t * eta * (1.0 - ber.ber);
            ensure(tp.backscatter == bs, || format!("eta={eta} {db} dB: backscatter {} != {bs}", tp.backscatter))?;
            ensure((tp.total - total).abs() <= 4.0 * f64::EPSILON * total, || {
                format!("eta={eta} {db} dB: total {} != {total}", tp.total)
            })?;
            let gap = t - tp.total;
            ensure(gap < prev_gap, || format!("eta={eta}: gap {gap} at {db} dB did not shrink from {prev_gap}"))?;
            prev_gap = gap;
        }
    }
    Ok(format!(
        "eta=0 -> 1000; eta=0.4 gap {:.1} (1 dB) -> {:.1} (9 dB)",
        t * 0.4 * c.ber_at(10, 1.0).ber,
        t * 0.4 * c.ber_at(10, 9.0).ber
    ))
}

fn random_params<R: Rng>(rng: &mut R, m: usize, n: usize) -> SimParams {
    SimParams {
        antennas: m,
        spreading: n,
        direct_snr: db_to_linear(rng.random_range(-5.0..10.0)),
        relative_backscatter_gain: db_to_linear(rng.random_range(-20.0..0.0)),
        ..SimParams::default()
    }
}

fn criterion_6() -> Outcome {
    let mut rng = trial_rng(SEED, 6);
    let (mut disagreements, mut ones) = (0, 0);
    let cases = 10_000;
    for i in 0..cases {
        let m = [1, 2, 4, 8][i % 4];
        let n = [1, 5][(i / 4) % 2];
        let p = random_params(&mut rng, m, n);
        let ch = sample_channel(&p, &mut rng);
        let cov = build_covariances(&ch, n);
        let state = if rng.random::<bool>() { TagState::Reflecting } else { TagState::Absorbing };
        let block = synthesize_block(&ch, state, &p, &mut rng);
        let fast = ml_detect(&block, &cov).map_err(|e| e.to_string())?;
        let naive = oracle::naive_decision(&block, &cov.k0, &cov.k1);
        disagreements += usize::from(fast != naive);
        ones += usize::from(fast);
    }
    ensure(disagreements == 0, || format!("{disagreements} disagreements in {cases}"))?;
    Ok(format!("{cases} instances, 0 disagreements ({ones} decided 1)"))
}

fn criterion_7() -> Outcome {
    let mut rng = trial_rng(SEED, 7);
    let (mut worst_inv, mut worst_det) = (0.0f64, 0.0f64);
    for i in 0..1000 {
        let p = random_params(&mut rng, 1 + i % 10, 5);
        let ch = sample_channel(&p, &mut rng);
        let cov = build_covariances(&ch, 5);
        for (v, inv, logdet) in [(&ch.h1, &cov.k0_inv, cov.logdet0), (&(&ch.h1 + &ch.h2), &cov.k1_inv, cov.logdet1)] {
            let k = oracle::dense_covariance(v);
            let dense_inv = oracle::dense_inverse(&k).ok_or("dense factorization failed")?;
            let dense_logdet = oracle::dense_logdet(&k).ok_or("dense factorization failed")?;
            worst_inv = worst_inv.max((dense_inv - inv).norm());
            worst_det = worst_det.max((dense_logdet - logdet).abs());
        }
    }
    ensure(worst_inv <= 1e-10 && worst_det <= 1e-10, || {
        format!("worst inverse err {worst_inv:.2e}, logdet err {worst_det:.2e}")
    })?;
    Ok(format!("1000 channels; max inverse err {worst_inv:.1e}, max logdet err {worst_det:.1e}"))
}

fn criterion_8(c: &Curves) -> Outcome {
    let mut rng = trial_rng(SEED, 8);
    let mut worst = 0.0f64;
    for i in 0..10_000 {
        let p = random_params(&mut rng, 1 + i % 8, [1, 5][i % 2]);
        let prior = rng.random_range(0.0..=1.0);
        let ch = sample_channel(&p, &mut rng);
        let cov = build_covariances(&ch, p.spreading);
        let state = if rng.random::<bool>() { TagState::Reflecting } else { TagState::Absorbing };
        let block = synthesize_block(&ch, state, &p, &mut rng);
        let (w0, w1) = posterior(&block, &cov, prior).map_err(|e| e.to_string())?;
        worst = worst.max((w0 + w1 - 1.0).abs());
    }
    ensure(worst <= 1e-12, || format!("posterior sum off by {worst:.2e}"))?;

    let all = c
        .rate_vs_prior
        .iter()
        .map(|x| x.1)
        .chain(c.rate_vs_antennas.iter().map(|x| x.1))
        .chain(c.rate_vs_snr.iter().map(|x| x.1));
    let mut count = 0;
    for est in all {
        let cap = binary_entropy(est.prior).map_err(|e| e.to_string())?;
        ensure(est.rate_bits >= 0.0 && est.rate_bits <= cap + 3.0 * est.standard_error, || {
            format!("rate {} outside [0, {cap} + 3σ]", est.rate_bits)
        })?;
        count += 1;
    }

    let silent = rate(&SimParams { relative_backscatter_gain: 0.0, ..base() });
    ensure(silent.rate_bits.abs() <= 3.0 * silent.standard_error, || {
        format!("zero-gain rate {} ± {}", silent.rate_bits, silent.standard_error)
    })?;
    Ok(format!(
        "max |w0+w1-1| {worst:.1e}; {count} estimates in bounds; zero-gain rate {}",
        silent.rate_bits
    ))
}

fn criterion_9() -> Outcome {
    let mut rng = trial_rng(SEED, 9);
    let layout = FrameLayout::default();
    let random_bits = |rng: &mut rand_chacha::ChaCha8Rng, len: usize| -> Vec<u8> {
        (0..len).map(|_| rng.random_range(0..2u8)).collect()
    };
    let payload_bits = layout.payload_bits();
    // Boundary payload sizes first: empty, exactly one frame, padded final frame.
    let boundary = [0, 1, payload_bits - 1, payload_bits, payload_bits + 1, 5 * payload_bits / 2];
    for i in 0..10_000 {
        let len = boundary.get(i).copied().unwrap_or_else(|| rng.random_range(0..600));

        let bits = random_bits(&mut rng, len);
        let back = differential_decode(&differential_encode(&bits)).map_err(|e| e.to_string())?;
        ensure(back == bits, || format!("differential round trip failed at len {len}"))?;

        let msg = random_bits(&mut rng, len + 1);
        let step = rng.random_range(1..=255usize);
        let first = rng.random_range(0..msg.len());
        let count = if i % 7 == 0 { 0 } else { (msg.len() - 1 - first) / step + 1 };
        let split = split_message(&msg, first, step, count).map_err(|e| e.to_string())?;
        let merged = merge_message(&split.active_bits, &split.backscatter_payload, first, step)
            .map_err(|e| e.to_string())?;
        ensure(merged == msg, || format!("split/merge failed: len {} first {first} step {step}", msg.len()))?;

        let first_id = rng.random_range(0..1usize << 16);
        let frames = build_frames(&bits, &layout, first_id, step).map_err(|e| e.to_string())?;
        ensure(frames.len() == len.div_ceil(payload_bits), || format!("{} frames for {len} bits", frames.len()))?;
        let raw: Vec<Vec<u8>> = frames.iter().map(|f| f.bits.clone()).collect();
        let parsed = parse_frames(&raw, &layout, len).map_err(|e| e.to_string())?;
        ensure(parsed.payload == bits, || format!("frame payload round trip failed at len {len}"))?;
        ensure(len == 0 || (parsed.first_bit_id, parsed.step) == (first_id, step), || {
            "frame metadata round trip failed".to_string()
        })?;
        for f in &frames {
            let decoded = differential_decode(&f.states).map_err(|e| e.to_string())?;
            ensure(decoded == f.bits, || "frame state decode mismatch".to_string())?;
        }
    }
    Ok("10000 cases each for differential, split/merge, frame build/parse".into())
}

fn run_cli(config: &Path, out: &Path, threads: usize) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_bscat"))
        .args(["ber", "--seed", "7", "--threads", &threads.to_string()])
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .env_remove("BSCAT_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), || format!("bscat exited with {:?}", status.status))?;
    std::fs::read(out).map_err(|e| e.to_string())
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("ber.json");
    std::fs::write(
        &config,
        r#"{"kind": "ber_vs_snr", "sweep": [1, 5, 9], "antennas": [1, 5], "trials": 400}"#,
    )
    .map_err(|e| e.to_string())?;
    let reference = run_cli(&config, &dir.path().join("a.csv"), 1)?;
    let again = run_cli(&config, &dir.path().join("b.csv"), 1)?;
    ensure(reference == again, || "repeat run differs".to_string())?;
    for threads in [4, 8] {
        let other = run_cli(&config, &dir.path().join(format!("t{threads}.csv")), threads)?;
        ensure(reference == other, || format!("--threads {threads} output differs"))?;
    }
    Ok(format!("{} CSV bytes identical across repeats and --threads 1/4/8", reference.len()))
}

fn main() {
    let started = Instant::now();
    let (rate_vs_prior, rate_vs_antennas, rate_vs_snr) = compute_rate_curves();
    let curves = Curves { rate_vs_prior, rate_vs_antennas, rate_vs_snr, ber: compute_ber_curves() };

    type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;
    let criteria: Vec<(&str, Check)> = vec![
        ("1 rate maximized at theta0 = 0.5, symmetric", Box::new(|| criterion_1(&curves))),
        ("2 rate monotone in M", Box::new(|| criterion_2(&curves))),
        ("3 rate monotone in alpha_dt", Box::new(|| criterion_3(&curves))),
        ("4 BER trends", Box::new(|| criterion_4(&curves))),
        ("5 throughput endpoints", Box::new(|| criterion_5(&curves))),
        ("6 detector oracle equivalence", Box::new(criterion_6)),
        ("7 closed-form linear algebra", Box::new(criterion_7)),
        ("8 posterior and entropy bounds", Box::new(|| criterion_8(&curves))),
        ("9 codec round trips", Box::new(criterion_9)),
        ("10 reproducibility across runs and threads", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed ({:.0?})",
        criteria.len() - failed,
        started.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
