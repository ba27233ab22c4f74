//! Flat run configuration and the command implementations behind the
//! `flowinfer` binary.

mod commands;
mod config;

pub use commands::{cmd_consistency, cmd_defaults, cmd_observe, cmd_posterior, cmd_solve, Written};
pub use config::RunConfig;
