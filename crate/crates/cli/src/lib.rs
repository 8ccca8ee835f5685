//! Scenario files, reports and the `mecpath` command line on top of
//! `mecpath-core`.

pub mod app;
pub mod batch;
pub mod error;
pub mod report;
pub mod scenario;
pub mod svg;

pub use error::CliError;
pub use scenario::ScenarioFile;
