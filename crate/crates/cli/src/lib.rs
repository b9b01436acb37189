//! Command-line front end and campaign harness for the streaming FDR
//! procedures in `toad-core`: single-stream runs (file or live stdin),
//! Monte Carlo simulation campaigns, didactic scenarios, and policy/shape
//! validation.

pub mod campaign;
pub mod commands;
pub mod io;
pub mod scenario;
pub mod spec;

pub use commands::{run_cli, Failure};
