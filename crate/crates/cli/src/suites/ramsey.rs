//! Exact threshold computations by brute force, with witness
//! re-verification on seeded colorings.

use std::collections::BTreeMap;

use finfam_core::ground::KSubset;
use finfam_core::ramsey::{find_monochromatic_grid, ramsey_exact, GridColoring, RamseyExact};
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::config::CampaignConfig;
use crate::error::Result;
use crate::report::{finalize_failures, FailureRecord, ReportRecord};
use crate::suites::{case_str, case_u64, CaseOutcome};

pub const NAME: &str = "ramsey";

fn check_exact(j: &[u32], c: u32, r: u32, limit: u32, expected: u32) -> CaseOutcome {
    match ramsey_exact(j, c, r, limit) {
        Ok(RamseyExact::Exact(n)) if n == expected => CaseOutcome::pass(),
        Ok(RamseyExact::Exact(n)) => {
            CaseOutcome::fail(format!("exact threshold {n}, expected {expected}"))
        }
        Ok(RamseyExact::Unknown { at_least }) => {
            CaseOutcome::fail(format!("search gave up at {at_least}, expected {expected}"))
        }
        Err(e) => CaseOutcome::fail(format!("search refused: {e}")),
    }
}

/// Independent verification of a witness: re-scan its whole product grid.
fn verify_witness(coloring: &GridColoring, parts: &[KSubset], color: u32) -> CaseOutcome {
    let inner: Vec<Vec<KSubset>> = parts
        .iter()
        .zip(coloring.subset_sizes())
        .map(|(t, &j)| {
            t.iter()
                .combinations(j as usize)
                .map(KSubset::from_atoms)
                .collect()
        })
        .collect();
    for point in inner.iter().multi_cartesian_product() {
        let point: Vec<KSubset> = point.into_iter().cloned().collect();
        match coloring.color_of(&point) {
            Ok(d) if d == color => {}
            Ok(d) => {
                return CaseOutcome::fail(format!(
                    "witness grid point has color {d}, witness claims {color}"
                ))
            }
            Err(e) => return CaseOutcome::fail(format!("witness scan error: {e}")),
        }
    }
    CaseOutcome::pass()
}

/// Builds the seeded coloring, searches a witness, and re-verifies it.
/// At the exact threshold a witness must exist.
fn check_seeded_witness(j: &[u32], c: u32, r: u32, ground: u32, seed: u64) -> CaseOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coloring = match GridColoring::from_fn(
        vec![(0..ground).collect(); j.len()],
        j.to_vec(),
        c,
        |_| rng.gen_range(1..=c),
    ) {
        Ok(col) => col,
        Err(e) => return CaseOutcome::fail(format!("cannot build coloring: {e}")),
    };
    match find_monochromatic_grid(&coloring, r) {
        Ok(Some(witness)) => verify_witness(&coloring, &witness.parts, witness.color),
        Ok(None) => CaseOutcome::fail(
            "no witness found at the exact threshold, where every coloring must have one",
        ),
        Err(e) => CaseOutcome::fail(format!("witness search error: {e}")),
    }
}

pub fn run(cfg: &CampaignConfig) -> ReportRecord {
    let mut cases = 0u64;
    let mut failures: Vec<FailureRecord> = Vec::new();

    // pigeonhole thresholds c(r-1)+1 for c, r <= 4, by brute force
    let pigeonhole: Vec<(u32, u32)> = (1..=4u32).cartesian_product(1..=4u32).collect();
    let results: Vec<(u32, u32, CaseOutcome)> = pigeonhole
        .par_iter()
        .map(|&(c, r)| (c, r, check_exact(&[1], c, r, 20, c * (r - 1) + 1)))
        .collect();
    let mut values = BTreeMap::new();
    for (c, r, outcome) in results {
        cases += 1;
        values.insert((c, r), c * (r - 1) + 1);
        if !outcome.pass {
            failures.push(FailureRecord {
                case: json!({
                    "suite": NAME, "part": "exact",
                    "j": [1], "c": c, "r": r, "limit": 20,
                    "expected": c * (r - 1) + 1,
                }),
                message: outcome.message,
            });
        }
    }

    // monotonicity in colors and radius over the computed grid
    for (&(c, r), &v) in &values {
        for (&(c2, r2), &v2) in &values {
            if c2 >= c && r2 >= r {
                cases += 1;
                if v2 < v {
                    failures.push(FailureRecord {
                        case: json!({
                            "suite": NAME, "part": "monotonicity",
                            "lower": [c, r], "upper": [c2, r2],
                        }),
                        message: format!("threshold {v2} below {v}"),
                    });
                }
            }
        }
    }

    // the two-coloring triangle threshold over pairs
    cases += 1;
    let outcome = check_exact(&[2], 2, 3, 10, 6);
    if !outcome.pass {
        failures.push(FailureRecord {
            case: json!({
                "suite": NAME, "part": "exact",
                "j": [2], "c": 2, "r": 3, "limit": 10, "expected": 6,
            }),
            message: outcome.message,
        });
    }

    // witness extraction and independent re-verification on seeded
    // colorings at each exact threshold
    let witness_jobs: Vec<(Vec<u32>, u32, u32, u32)> = values
        .iter()
        .map(|(&(c, r), &n)| (vec![1u32], c, r, n))
        .chain(std::iter::once((vec![2u32], 2, 3, 6)))
        .collect();
    let witness_samples = 20u64;
    let witness_results: Vec<(Vec<u32>, u32, u32, u32, u64, CaseOutcome)> = witness_jobs
        .par_iter()
        .flat_map(|(j, c, r, n)| {
            (0..witness_samples)
                .into_par_iter()
                .map(move |s| {
                    let seed = cfg.seed.wrapping_add(s);
                    (
                        j.clone(),
                        *c,
                        *r,
                        *n,
                        seed,
                        check_seeded_witness(j, *c, *r, *n, seed),
                    )
                })
        })
        .collect();
    for (j, c, r, n, seed, outcome) in witness_results {
        cases += 1;
        if !outcome.pass {
            failures.push(FailureRecord {
                case: json!({
                    "suite": NAME, "part": "witness",
                    "j": j, "c": c, "r": r, "ground": n, "seed": seed,
                }),
                message: outcome.message,
            });
        }
    }

    let mut params = BTreeMap::new();
    params.insert("seed".into(), cfg.seed.to_string());
    params.insert("witness_samples".into(), witness_samples.to_string());
    ReportRecord {
        suite: NAME.into(),
        params,
        cases,
        failures: finalize_failures(failures, 16),
        millis: 0,
    }
}

pub fn replay(case: &serde_json::Value) -> Result<CaseOutcome> {
    let part = case_str(case, "part")?;
    let shape = |key: &str| -> Vec<u32> {
        case.get(key)
            .and_then(|v| v.as_array())
            .map(|arr| {
                arr.iter()
                    .filter_map(|x| x.as_u64().map(|v| v as u32))
                    .collect()
            })
            .unwrap_or_default()
    };
    match part {
        "exact" => Ok(check_exact(
            &shape("j"),
            case_u64(case, "c")? as u32,
            case_u64(case, "r")? as u32,
            case_u64(case, "limit")? as u32,
            case_u64(case, "expected")? as u32,
        )),
        "witness" => Ok(check_seeded_witness(
            &shape("j"),
            case_u64(case, "c")? as u32,
            case_u64(case, "r")? as u32,
            case_u64(case, "ground")? as u32,
            case_u64(case, "seed")?,
        )),
        "monotonicity" => {
            let lower = shape("lower");
            let upper = shape("upper");
            let value = |c: u32, r: u32| match ramsey_exact(&[1], c, r, 20) {
                Ok(RamseyExact::Exact(n)) => Some(n),
                _ => None,
            };
            match (value(lower[0], lower[1]), value(upper[0], upper[1])) {
                (Some(a), Some(b)) if b >= a => Ok(CaseOutcome::pass()),
                (Some(a), Some(b)) => {
                    Ok(CaseOutcome::fail(format!("threshold {b} below {a}")))
                }
                _ => Ok(CaseOutcome::fail("threshold computation gave up")),
            }
        }
        other => Ok(CaseOutcome::fail(format!("unknown part '{other}'"))),
    }
}
