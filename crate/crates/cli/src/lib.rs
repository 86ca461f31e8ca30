//! Batch verification driver: configurable invariant suites over the
//! set-family library, encode/decode between canonical text forms, Ramsey
//! witness and threshold search, and counterexample replay.

pub mod config;
pub mod error;
pub mod report;
pub mod suites;
pub mod textform;

pub use config::{CampaignConfig, ScheduleChoice, SuiteId};
pub use error::{CliError, Result};
pub use report::{render_report, FailureRecord, ReportRecord};
