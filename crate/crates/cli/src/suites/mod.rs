//! The verification suites run by `verify`, plus counterexample replay.
//!
//! Every failure a suite reports carries a self-contained JSON case that
//! [`replay_case`] can re-execute to the same verdict.

pub mod encodings;
pub mod fact311;
pub mod fraenkel;
pub mod nilpotency;
pub mod phi_roundtrip;
pub mod ramsey;

use std::time::Instant;

use crate::config::{CampaignConfig, SuiteId};
use crate::error::{CliError, Result};
use crate::report::ReportRecord;

/// Verdict of one replayed case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseOutcome {
    pub pass: bool,
    pub message: String,
}

impl CaseOutcome {
    pub fn pass() -> Self {
        CaseOutcome {
            pass: true,
            message: "ok".into(),
        }
    }

    pub fn fail(message: impl Into<String>) -> Self {
        CaseOutcome {
            pass: false,
            message: message.into(),
        }
    }
}

fn run_one(suite: SuiteId, cfg: &CampaignConfig) -> ReportRecord {
    let start = Instant::now();
    let mut record = match suite {
        SuiteId::Fact311 => fact311::run(cfg),
        SuiteId::Nilpotency => nilpotency::run(cfg),
        SuiteId::PhiRoundtrip => phi_roundtrip::run(cfg),
        SuiteId::Encodings => encodings::run(cfg),
        SuiteId::Ramsey => ramsey::run(cfg),
        SuiteId::Fraenkel => fraenkel::run(cfg),
    };
    record.millis = if cfg.timings {
        start.elapsed().as_millis() as u64
    } else {
        0
    };
    record
}

/// Runs the enabled suites inside a thread pool of the configured size.
pub fn run_suites(cfg: &CampaignConfig) -> Result<Vec<ReportRecord>> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))?;
    let records = pool.install(|| {
        cfg.enabled()
            .into_iter()
            .map(|suite| run_one(suite, cfg))
            .collect::<Vec<ReportRecord>>()
    });
    Ok(records)
}

/// Re-executes one serialized counterexample and returns its verdict.
pub fn replay_case(case: &serde_json::Value) -> Result<CaseOutcome> {
    let suite = case
        .get("suite")
        .and_then(|v| v.as_str())
        .ok_or_else(|| CliError::Replay("case has no suite field".into()))?;
    match suite {
        "fact-311" => fact311::replay(case),
        "nilpotency" => nilpotency::replay(case),
        "phi-roundtrip" => phi_roundtrip::replay(case),
        "encodings" => encodings::replay(case),
        "ramsey" => ramsey::replay(case),
        "fraenkel" => fraenkel::replay(case),
        other => Err(CliError::Replay(format!("unknown suite '{other}'"))),
    }
}

pub(crate) fn case_str<'a>(case: &'a serde_json::Value, key: &str) -> Result<&'a str> {
    case.get(key)
        .and_then(|v| v.as_str())
        .ok_or_else(|| CliError::Replay(format!("case is missing string field '{key}'")))
}

pub(crate) fn case_u64(case: &serde_json::Value, key: &str) -> Result<u64> {
    case.get(key)
        .and_then(|v| v.as_u64())
        .ok_or_else(|| CliError::Replay(format!("case is missing numeric field '{key}'")))
}

pub(crate) fn case_shape(case: &serde_json::Value, key: &str) -> Result<Vec<u32>> {
    case.get(key)
        .and_then(|v| v.as_array())
        .and_then(|arr| {
            arr.iter()
                .map(|v| v.as_u64().map(|x| x as u32))
                .collect::<Option<Vec<u32>>>()
        })
        .ok_or_else(|| CliError::Replay(format!("case is missing shape field '{key}'")))
}
