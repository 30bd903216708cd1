//! Command-line front end: argument parsing, command execution, JSON run
//! reports and the acceptance suite behind `verify-paper`.

pub mod acceptance;
pub mod commands;
pub mod run_report;

pub use commands::{execute, Cli, Command, CommonArgs, Failure};
pub use run_report::{Payload, RunReport};

/// Exit status for a run whose checks all passed.
pub const EXIT_PASS: i32 = 0;
/// Exit status when at least one check failed or a computation broke down.
pub const EXIT_FAIL: i32 = 1;
/// Exit status for bad arguments or unreadable field descriptions.
pub const EXIT_USAGE: i32 = 2;
