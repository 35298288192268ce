//! Maximum achievable backscatter rate against the prior, the antenna count
//! and the direct-link SNR.
//!
//! ```bash
//! cargo run --release --example max_rate -- 100000
//! ```

use backscatter_sim::params::db_to_linear;
use backscatter_sim::rate::{binary_entropy, estimate_max_rate};
use backscatter_sim::SimParams;

fn main() -> backscatter_sim::Result<()> {
    let trials: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let seed = 11;
    let base = SimParams::default();

    println!("rate vs prior (M = 10, alpha_dt = 5 dB, {trials} trials)");
    for i in 1..=9 {
        let prior = f64::from(i) / 10.0;
        let est = estimate_max_rate(&SimParams { prior, ..base.clone() }, trials, seed)?;
        println!(
            "  theta0={prior:.1}  R={:.5} ± {:.5}  (C(theta0) = {:.4})",
            est.rate_bits,
            est.standard_error,
            binary_entropy(prior)?
        );
    }

    println!("rate vs antennas (theta0 = 0.5, alpha_dt = 5 dB)");
    for m in [1, 2, 5, 10] {
        let est = estimate_max_rate(&SimParams { antennas: m, ..base.clone() }, trials, seed)?;
        println!("  M={m:<2}  R={:.5} ± {:.5}", est.rate_bits, est.standard_error);
    }

    println!("rate vs alpha_dt (M = 10)");
    for db in 1..=9 {
        let p = SimParams { direct_snr: db_to_linear(f64::from(db)), ..base.clone() };
        let est = estimate_max_rate(&p, trials, seed)?;
        println!("  {db} dB  R={:.5} ± {:.5}", est.rate_bits, est.standard_error);
    }
    Ok(())
}
