//! Sweep configuration, execution and output.

pub mod config;
pub mod emit;
pub mod sweep;

pub use config::{parse_config, parse_config_str, OutputFormat, SweepConfig};
pub use emit::{emit, render, CSV_HEADER};
pub use sweep::{nehari_comparison_check, run_sweep, NehariComparison, SweepOutcome, SweepRecord};
