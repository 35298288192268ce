//! Draw one channel and synthesize the received blocks of a short frame.

use backscatter_sim::channel::{sample_channel, synthesize_frame};
use backscatter_sim::codec::differential_encode;
use backscatter_sim::montecarlo::trial_rng;
use backscatter_sim::SimParams;

fn main() -> backscatter_sim::Result<()> {
    // Short frame for display; real frames also carry 32 header bits.
    let params = SimParams { antennas: 4, frame_bits: 8, ..SimParams::default() };
    let mut rng = trial_rng(3, 0);
    let ch = sample_channel(&params, &mut rng);
    println!("|h1|^2 = {:.3}  |h2|^2 = {:.4}", ch.h1.norm_squared(), ch.h2.norm_squared());

    let payload = [1, 0, 1, 1, 0, 0, 1, 0];
    let states = differential_encode(&payload);
    let blocks = synthesize_frame(&ch, &states[1..], &params, &mut rng)?;
    for (block, state) in blocks.iter().zip(&states[1..]) {
        let energy = block.samples.norm_squared() / block.spreading() as f64;
        println!("block {}  tag state {state}  mean row energy {energy:.3}", block.index);
    }
    Ok(())
}
