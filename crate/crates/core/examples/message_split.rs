//! Split a message between the two links, frame the backscatter part and
//! reassemble it at the receiver.

use backscatter_sim::codec::{build_frames, merge_message, parse_frames, split_message, FrameLayout, SplitPlan};
use backscatter_sim::montecarlo::trial_rng;
use rand::Rng;

fn main() -> backscatter_sim::Result<()> {
    let mut rng = trial_rng(8, 0);
    let message: Vec<u8> = (0..1000).map(|_| rng.random_range(0..2)).collect();
    let layout = FrameLayout::default();

    let plan = SplitPlan::random(message.len(), 0.1, &layout, &mut rng)?;
    let split = split_message(&message, plan.first_bit_id, plan.step, plan.count)?;
    println!(
        "first_bit_id {} step {}: {} active bits, {} backscatter bits",
        plan.first_bit_id,
        plan.step,
        split.active_bits.len(),
        split.backscatter_payload.len()
    );

    let frames = build_frames(&split.backscatter_payload, &layout, plan.first_bit_id, plan.step)?;
    for (i, f) in frames.iter().enumerate() {
        let head: String = f.bits[..layout.overhead()].iter().map(|b| char::from(b'0' + b)).collect();
        println!("frame {i} header {head}");
    }

    let raw: Vec<Vec<u8>> = frames.iter().map(|f| f.bits.clone()).collect();
    let parsed = parse_frames(&raw, &layout, split.backscatter_payload.len())?;
    let merged = merge_message(&split.active_bits, &parsed.payload, parsed.first_bit_id, parsed.step)?;
    assert_eq!(merged, message);
    println!("reassembled {} bits", merged.len());
    Ok(())
}
