//! Derive the dimensionless SNRs from a physical deployment.

use backscatter_sim::params::{compute_direct_snr, compute_relative_backscatter_gain, linear_to_db};
use backscatter_sim::{LinkBudget, SimParams};
use num_complex::Complex64;

fn main() -> backscatter_sim::Result<()> {
    // 915 MHz, tag 0.5 m from the transmitter, receiver 200 m away. Powers are
    // in units of the receiver noise power: 20 dBm over a -90 dBm floor.
    let budget = LinkBudget {
        transmit_power: 1e11,
        tx_gain: 1.64,
        rx_gain: 1.64,
        tag_gain: 1.64,
        tx_rx_distance: 200.0,
        tx_tag_distance: 0.5,
        tag_rx_distance: 200.0,
        path_loss_exponent: 3.0,
        wavelength: 299_792_458.0 / 915e6,
        reflection: Complex64::new(0.8, 0.0),
    };
    let direct = compute_direct_snr(&budget)?;
    let relative = compute_relative_backscatter_gain(&budget)?;
    println!("kappa            {:.4e}", budget.kappa());
    println!("power at tag     {:.4e}", budget.tag_incident_power()?);
    println!("alpha_dt         {direct:.4e} ({:.1} dB)", linear_to_db(direct));
    println!("alpha_r~         {relative:.4e} ({:.1} dB)", linear_to_db(relative));

    let params = SimParams::from_link_budget(&budget)?;
    println!("alpha_bt         {:.4e}", params.backscatter_snr());
    Ok(())
}
