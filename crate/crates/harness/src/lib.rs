//! Experiment harness: configuration files, replicated runs over dataset
//! sizes, gap evaluation against a reference optimum, coverage reports and
//! online cache runs. The `offcmab` binary is a thin front end over this
//! library.

pub mod config;
pub mod coverage;
pub mod error;
pub mod gap;
pub mod online;
pub mod run;

pub use config::{ExperimentConfig, OptimumMode, OUTPUT_DIR_VAR};
pub use coverage::{coverage_for, CoverageSummary};
pub use error::{HarnessError, Result};
pub use gap::{evaluate_gap, optimum, value_of, EvalSpec, Optimum};
pub use online::{run_online, write_online_csv};
pub use run::{cell_seed, csv_string, run_experiment, summarize, write_csv, write_outputs, Experiment, ResultRow, Summary, SummaryEntry};
