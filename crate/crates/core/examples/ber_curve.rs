//! Backscatter BER against direct-link SNR for several antenna counts.
//!
//! ```bash
//! cargo run --release --example ber_curve -- 20000
//! ```

use backscatter_sim::experiments::run_ber;
use backscatter_sim::params::db_to_linear;
use backscatter_sim::SimParams;

fn main() -> backscatter_sim::Result<()> {
    let trials: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    println!("frames per point: {trials} (I = 100 bits each)");
    println!("{:>6} {:>16} {:>16} {:>16}", "dB", "M=1", "M=5", "M=10");
    for db in 1..=9 {
        let mut row = format!("{db:>6}");
        for m in [1, 5, 10] {
            let p = SimParams {
                antennas: m,
                direct_snr: db_to_linear(db as f64),
                ..SimParams::default()
            };
            let est = run_ber(&p, trials, 7)?;
            row.push_str(&format!(" {:>9.5}±{:.5}", est.ber, est.standard_error));
        }
        println!("{row}");
    }
    Ok(())
}
