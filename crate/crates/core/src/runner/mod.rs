//! Configuration, sweeps, reports and subcommand bodies.

pub mod commands;
pub mod config;
pub mod report;
pub mod sweep;
pub mod table1;

pub use config::{load_config, parse_config, ExperimentConfig, Format};
pub use report::{emit_report, load_report};
pub use sweep::{run_sweep, SweepRow};
pub use table1::{table1_demo, Table1};
