//! Command-line front end for `platoon-core`: scenario files, analysis
//! reports and CSV export.
//!
//! Exit codes: 0 success or affirmative verdict, 1 negative verdict,
//! 2 usage or parse error, 3 runtime error.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod csv;
pub mod scenario;

pub use commands::{run, Cli, CliError, Outcome};
pub use scenario::{Scenario, ScenarioError};
