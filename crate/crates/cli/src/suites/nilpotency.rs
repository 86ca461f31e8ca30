//! Exhaustive descent sweeps: every family of each pinned grid must empty
//! within `k_1 + .. + k_n + 1` applications of H.

use std::collections::BTreeMap;

use finfam_core::grid::{nilpotency_check, OperatorContext};
use finfam_core::ground::{CellShape, Family, GroundSet};
use rayon::prelude::*;
use serde_json::json;

use crate::config::CampaignConfig;
use crate::error::Result;
use crate::report::{finalize_failures, FailureRecord, ReportRecord};
use crate::suites::{case_shape, case_str, case_u64, CaseOutcome};
use crate::textform::{parse_family, serialize_family};

pub const NAME: &str = "nilpotency";

/// Mutation hook: demand emptiness one step early.
pub const MUTATION_TIGHT_BOUND: &str = "nilpotency-tight-bound";

pub type Grid = (u32, Vec<u32>, Vec<u32>);

/// Default grids: the smallest ground sizes at which the descent property
/// is exhaustively true (the middle one needs six atoms, the two-coloring
/// triangle threshold).
pub fn default_grids() -> Vec<Grid> {
    vec![
        (4, vec![1], vec![2]),
        (6, vec![2], vec![3]),
        (3, vec![1, 1], vec![1, 2]),
    ]
}

fn check_family(
    ground: u32,
    k: &[u32],
    l: &[u32],
    family: &Family,
    mutation: Option<&str>,
) -> Result<CaseOutcome> {
    let ctx = OperatorContext::new(
        GroundSet::new(ground)?,
        CellShape::new(k.to_vec())?,
        CellShape::new(l.to_vec())?,
    )?;
    let trace = nilpotency_check(family, &ctx)?;
    let limit = if mutation == Some(MUTATION_TIGHT_BOUND) {
        trace.bound().saturating_sub(1)
    } else {
        trace.bound()
    };
    match trace.emptied_at() {
        Some(step) if step <= limit => Ok(CaseOutcome::pass()),
        Some(step) => Ok(CaseOutcome::fail(format!(
            "descent empties at step {step}, above the required {limit}"
        ))),
        None => Ok(CaseOutcome::fail(format!(
            "descent does not empty within {} steps",
            trace.bound()
        ))),
    }
}

/// Sweeps the given grids exhaustively; the verify command uses
/// [`default_grids`], other callers may pin their own.
pub fn run_on_grids(cfg: &CampaignConfig, grids: &[Grid]) -> ReportRecord {
    let mutation = cfg
        .mutate
        .as_deref()
        .filter(|m| m.starts_with("nilpotency"));
    let mut cases = 0u64;
    let mut failures: Vec<FailureRecord> = Vec::new();
    for (ground_size, k, l) in grids {
        let ground = GroundSet::new(*ground_size).expect("grid grounds are positive");
        let shape = CellShape::new(k.clone()).expect("grid shapes are nonempty");
        let cell = shape.cell_size(&ground).expect("grid cells are tiny");
        let results: Vec<(u64, Option<(Family, String)>)> = (0..1u64 << cell)
            .into_par_iter()
            .map(|mask| {
                let family = Family::from_rank_mask(ground, shape.clone(), mask)
                    .expect("mask within cell");
                match check_family(*ground_size, k, l, &family, mutation) {
                    Ok(outcome) if outcome.pass => (1, None),
                    Ok(outcome) => (1, Some((family, outcome.message))),
                    Err(e) => (1, Some((family, format!("sweep error: {e}")))),
                }
            })
            .collect();
        for (count, failure) in results {
            cases += count;
            if let Some((family, message)) = failure {
                failures.push(FailureRecord {
                    case: json!({
                        "suite": NAME,
                        "ground": ground_size,
                        "k": k,
                        "l": l,
                        "family": serialize_family(&family),
                        "mutation": mutation,
                    }),
                    message,
                });
            }
        }
    }
    let mut params = BTreeMap::new();
    params.insert(
        "grids".into(),
        grids
            .iter()
            .map(|(g, k, l)| format!("A={g},k={k:?},l={l:?}"))
            .collect::<Vec<_>>()
            .join(";"),
    );
    if let Some(m) = mutation {
        params.insert("mutation".into(), m.to_string());
    }
    ReportRecord {
        suite: NAME.into(),
        params,
        cases,
        failures: finalize_failures(failures, 16),
        millis: 0,
    }
}

pub fn run(cfg: &CampaignConfig) -> ReportRecord {
    run_on_grids(cfg, &default_grids())
}

pub fn replay(case: &serde_json::Value) -> Result<CaseOutcome> {
    let ground = case_u64(case, "ground")? as u32;
    let k = case_shape(case, "k")?;
    let l = case_shape(case, "l")?;
    let family = parse_family(case_str(case, "family")?)?;
    let mutation = case.get("mutation").and_then(|v| v.as_str());
    check_family(ground, &k, &l, &family, mutation)
}
