//! Scenario grid, configuration, run persistence and reporting.

mod config;
mod report;
mod run;
mod scenario;

pub use config::{Config, NeuroConfig, TopologyConfig, WorkloadConfig};
pub use report::{load_records, render_table, report, write_summary_csv, Summary};
pub use run::{persist, read_manifest, replay, run, Algorithm, Manifest, RunOutput, RunRecord};
pub use scenario::{scenario_grid, Instance, Scenario};
