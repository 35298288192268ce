//! Detect and differentially decode one frame, then compare with the sent bits.

use backscatter_sim::channel::{sample_channel, synthesize_frame};
use backscatter_sim::codec::{decode_detected, differential_encode};
use backscatter_sim::detector::{build_covariances, detect_frame, detection_statistic};
use backscatter_sim::montecarlo::trial_rng;
use backscatter_sim::params::db_to_linear;
use backscatter_sim::SimParams;
use rand::Rng;

fn main() -> backscatter_sim::Result<()> {
    let params = SimParams { antennas: 10, direct_snr: db_to_linear(7.0), ..SimParams::default() };
    let mut rng = trial_rng(42, 0);
    let ch = sample_channel(&params, &mut rng);
    let cov = build_covariances(&ch, params.spreading);
    println!("threshold N(logdet K1 - logdet K0) = {:.4}", cov.threshold);

    let payload: Vec<u8> = (0..params.frame_bits).map(|_| rng.random_range(0..2)).collect();
    let states = differential_encode(&payload);
    let blocks = synthesize_frame(&ch, &states[1..], &params, &mut rng)?;
    for block in blocks.iter().take(5) {
        println!("block {}  statistic {:+.3}", block.index, detection_statistic(block, &cov));
    }

    let decoded = decode_detected(&detect_frame(&blocks, &cov)?)?;
    let errors = payload.iter().zip(&decoded).filter(|(a, b)| a != b).count();
    println!("{errors} bit errors in {} bits", payload.len());
    Ok(())
}
