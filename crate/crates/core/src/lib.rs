//! Link-level Monte-Carlo simulator for anti-eavesdropping ambient backscatter
//! communication.
//!
//! A transmitter splits each message into an active stream and a short
//! backscatter stream. A co-located tag carries the backscatter stream by
//! reflecting or absorbing the transmitter's own signal, and a multi-antenna
//! receiver recovers it with a maximum-likelihood detector.
//!
//! Modules, bottom-up:
//!
//! - [`params`]: link budgets and simulation knobs
//! - [`channel`]: Rayleigh fading and received-signal synthesis
//! - [`detector`]: per-hypothesis covariances and the ML decision rule
//! - [`rate`]: Monte-Carlo maximum achievable backscatter rate
//! - [`codec`]: message splitting, frame format, differential coding
//! - [`experiments`]: seeded sweeps producing CSV curves
//! - [`config`] and [`cli`]: JSON configs and the `bscat` front-end
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod channel;
pub mod cli;
pub mod codec;
pub mod config;
pub mod detector;
pub mod error;
pub mod experiments;
pub mod montecarlo;
pub mod oracle;
pub mod params;
pub mod rate;
pub mod selftest;

pub use error::{Error, Result};
pub use params::{LinkBudget, Observation, SimParams};
