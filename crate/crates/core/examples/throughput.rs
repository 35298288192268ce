//! Decoded bits per 1000-bit message against direct-link SNR and split ratio.
//!
//! ```bash
//! cargo run --release --example throughput -- 10000
//! ```

use backscatter_sim::experiments::{run_ber, throughput_from_ber};
use backscatter_sim::params::db_to_linear;
use backscatter_sim::SimParams;

fn main() -> backscatter_sim::Result<()> {
    let trials: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2_000);
    println!("{:>5} {:>8} {:>10} {:>10} {:>10}", "dB", "BER", "eta=0", "eta=0.1", "eta=0.4");
    for db in 1..=9 {
        let params = SimParams { direct_snr: db_to_linear(f64::from(db)), ..SimParams::default() };
        let ber = run_ber(&params, trials, 5)?;
        let totals = [0.0, 0.1, 0.4]
            .map(|eta| throughput_from_ber(&SimParams { split_ratio: eta, ..params.clone() }, &ber).map(|t| t.total));
        let [a, b, c] = totals;
        println!("{db:>5} {:>8.4} {:>10.1} {:>10.1} {:>10.1}", ber.ber, a?, b?, c?);
    }
    Ok(())
}
