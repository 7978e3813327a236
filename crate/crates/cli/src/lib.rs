//! Spec-file parsing, command dispatch, JSON reports and DOT export.

pub mod dot;
pub mod run;
pub mod spec;

pub use run::{emit, run, run_with_spec, Cli, CliError, Command, Common, Report, SCHEMA};
pub use spec::{parse_spec, SpecError, SpecFile};
