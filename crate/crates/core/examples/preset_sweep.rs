//! Run a JSON experiment config and print its CSV, as `bscat` would write it.
//!
//! ```bash
//! cargo run --release --example preset_sweep -- crates/core/presets/fig2a.json 2000
//! ```

use std::path::PathBuf;

use backscatter_sim::config::{read_config, to_canonical_json};
use backscatter_sim::experiments::{run_experiment, to_csv, ExperimentKind};

fn main() -> backscatter_sim::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/presets/fig2a.json")));
    let mut file = read_config(&path)?;
    // Presets use desk-scale trial counts; allow a smaller override.
    if let Some(trials) = args.next().and_then(|s| s.parse().ok()) {
        file.trials = Some(trials);
    }
    let spec = file.into_spec(ExperimentKind::BerVsSnr)?;
    eprint!("{}", to_canonical_json(&spec));
    print!("{}", to_csv(&run_experiment(&spec)?));
    Ok(())
}
