//! The `bscat` command-line front-end.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 on runtime
//! errors. CSV output is written to a temporary file next to the target and
//! renamed into place, so a partial file is never visible at `--out`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::Rng;

use crate::codec::{bits_from_hex, build_frames, merge_message, parse_frames, split_message, FrameLayout, SplitPlan};
use crate::config::{read_config, ConfigFile};
use crate::error::Error;
use crate::experiments::{run_experiment, summary_line, to_csv, ExperimentKind, ExperimentSpec};
use crate::montecarlo::{trial_rng, with_threads};
use crate::selftest;

#[derive(Debug, Parser)]
#[command(name = "bscat", version, about = "Ambient backscatter link-level simulator")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximum achievable backscatter rate sweep (rate_vs_snr or rate_vs_prior).
    Rate(ExperimentArgs),
    /// Backscatter BER sweep.
    Ber(ExperimentArgs),
    /// Decoded-bits sweep over split ratios.
    Throughput(ExperimentArgs),
    /// Split a message, frame the backscatter part and verify the round trip.
    CodecDemo(CodecArgs),
    /// Run the built-in oracle checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON experiment config; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, env = "BSCAT_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// CSV output path [default: <kind>.csv]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CodecArgs {
    /// Message as hex; a random 1000-bit message is used when omitted.
    #[arg(long)]
    pub message: Option<String>,
    /// Fraction of bits routed over the backscatter link.
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    #[arg(long, default_value_t = 100)]
    pub frame_bits: usize,
    #[arg(long, env = "BSCAT_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, env = "BSCAT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Runtime(m) => m,
        }
    }
}

fn config_failure(e: Error) -> Failure {
    Failure::Config(e.to_string())
}

/// Parses `argv` (program name first) and runs the command; returns the exit code.
pub fn main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(argv) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cfg) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("bscat: {}", f.message());
            f.code()
        }
    }
}

fn run(cfg: RunConfig) -> Result<(), Failure> {
    match cfg.command {
        Command::Rate(args) => run_sweep(args, ExperimentKind::RateVsSnr, &[ExperimentKind::RateVsSnr, ExperimentKind::RateVsPrior]),
        Command::Ber(args) => run_sweep(args, ExperimentKind::BerVsSnr, &[ExperimentKind::BerVsSnr]),
        Command::Throughput(args) => {
            run_sweep(args, ExperimentKind::ThroughputVsSnr, &[ExperimentKind::ThroughputVsSnr])
        }
        Command::CodecDemo(args) => codec_demo(args),
        Command::Selftest(args) => {
            let results = with_threads(args.threads.unwrap_or(0), || selftest::run(args.seed));
            let mut failed = 0;
            for r in &results {
                println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
                failed += usize::from(!r.passed);
            }
            if failed == 0 {
                Ok(())
            } else {
                Err(Failure::Runtime(format!("{failed} selftest check(s) failed")))
            }
        }
    }
}

/// Loads the config (if any), applies overrides and validates.
pub fn resolve_spec(args: &ExperimentArgs, default_kind: ExperimentKind) -> crate::Result<ExperimentSpec> {
    let mut file = match &args.config {
        Some(path) => read_config(path)?,
        None => ConfigFile::default(),
    };
    if args.seed.is_some() {
        file.seed = args.seed;
    }
    if args.trials.is_some() {
        file.trials = args.trials;
    }
    file.into_spec(default_kind)
}

fn run_sweep(args: ExperimentArgs, default_kind: ExperimentKind, allowed: &[ExperimentKind]) -> Result<(), Failure> {
    let spec = resolve_spec(&args, default_kind).map_err(config_failure)?;
    if !allowed.contains(&spec.kind) {
        return Err(Failure::Config(format!(
            "config kind `{}` does not match this subcommand",
            spec.kind.name()
        )));
    }
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", spec.kind.name())));
    let points = with_threads(args.threads.unwrap_or(0), || run_experiment(&spec))
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    for p in &points {
        println!("{}", summary_line(spec.kind, p));
    }
    write_atomic(&out, to_csv(&points).as_bytes()).map_err(|e| Failure::Runtime(e.to_string()))?;
    Ok(())
}

/// Writes `bytes` to a temp file in the target directory, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> crate::Result<()> {
    let io = |source| Error::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn codec_demo(args: CodecArgs) -> Result<(), Failure> {
    let layout = FrameLayout::with_total_bits(args.frame_bits).map_err(config_failure)?;
    let mut rng = trial_rng(args.seed, 0);
    let message = match &args.message {
        Some(hex) => bits_from_hex(hex).map_err(config_failure)?,
        None => (0..1000).map(|_| rng.random_range(0..2u8)).collect(),
    };
    let plan = SplitPlan::random(message.len(), args.eta, &layout, &mut rng).map_err(config_failure)?;
    let split = split_message(&message, plan.first_bit_id, plan.step, plan.count).map_err(config_failure)?;
    let frames = build_frames(&split.backscatter_payload, &layout, plan.first_bit_id, plan.step)
        .map_err(config_failure)?;
    let raw: Vec<Vec<u8>> = frames.iter().map(|f| f.bits.clone()).collect();
    let parsed = parse_frames(&raw, &layout, split.backscatter_payload.len())
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    let merged = merge_message(&split.active_bits, &parsed.payload, plan.first_bit_id, plan.step)
        .map_err(|e| Failure::Runtime(e.to_string()))?;

    println!("message bits: {}", message.len());
    println!("active bits: {}", split.active_bits.len());
    println!("backscatter bits: {}", split.backscatter_payload.len());
    println!("first_bit_id: {} step: {}", plan.first_bit_id, plan.step);
    println!(
        "frames: {} x {} bits ({} payload bits each)",
        frames.len(),
        layout.total_bits,
        layout.payload_bits()
    );
    if merged != message {
        return Err(Failure::Runtime("merged message differs from the original".into()));
    }
    println!("round trip: ok");
    Ok(())
}
