//! Machine-readable suite reports: one JSON record per line, fixed field
//! set, canonical ordering. Wall times are reported as zero unless timings
//! were requested, so that reports are byte-stable across thread counts
//! and machines.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    /// Self-contained replayable case descriptor.
    pub case: serde_json::Value,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub suite: String,
    pub params: BTreeMap<String, String>,
    pub cases: u64,
    pub failures: Vec<FailureRecord>,
    pub millis: u64,
}

impl ReportRecord {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Serializes records as JSON lines, sorted by suite name.
pub fn render_report(records: &[ReportRecord]) -> String {
    let mut sorted: Vec<&ReportRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.suite.cmp(&b.suite));
    let mut out = String::new();
    for record in sorted {
        out.push_str(&serde_json::to_string(record).expect("report serializes"));
        out.push('\n');
    }
    out
}

/// Collects the first `limit` failures, keeping the count of all cases.
/// Failures are sorted by their serialized case for deterministic output
/// regardless of evaluation order.
pub fn finalize_failures(mut failures: Vec<FailureRecord>, limit: usize) -> Vec<FailureRecord> {
    failures.sort_by_key(|f| f.case.to_string());
    failures.truncate(limit);
    failures
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_lines_are_sorted_and_stable() {
        let mk = |suite: &str| ReportRecord {
            suite: suite.into(),
            params: [("a".to_string(), "1".to_string())].into_iter().collect(),
            cases: 2,
            failures: vec![],
            millis: 0,
        };
        let a = render_report(&[mk("zeta"), mk("alpha")]);
        let b = render_report(&[mk("alpha"), mk("zeta")]);
        assert_eq!(a, b);
        assert!(a.starts_with("{\"suite\":\"alpha\""));
    }

    #[test]
    fn failure_order_is_canonical() {
        let f = |case: &str| FailureRecord {
            case: serde_json::json!({ "family": case }),
            message: "m".into(),
        };
        let sorted = finalize_failures(vec![f("b"), f("a")], 10);
        assert_eq!(sorted[0].case["family"], "a");
    }
}
