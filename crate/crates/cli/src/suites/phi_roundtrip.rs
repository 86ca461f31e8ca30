//! Codec verification: schedule contracts and prime-table fidelity,
//! exhaustive encode/decode round-trips with injectivity over all mixed
//! families on two small cells, and seeded higher-arity round-trips
//! through the slice form.

use std::collections::{BTreeMap, HashMap};

use finfam_core::ground::{GroundSet, KSubset, SubsetTuple};
use finfam_core::phi::{
    check_schedule_contract, phi_decode, phi_decode_slices, phi_encode, phi_encode_slices,
    schedule_compact, schedule_paper, MixedFamily, SizeSchedule,
};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{CampaignConfig, ScheduleChoice};
use crate::error::Result;
use crate::report::{finalize_failures, FailureRecord, ReportRecord};
use crate::suites::{case_str, case_u64, CaseOutcome};
use crate::textform::{parse_mixed, serialize_mixed, MixedFamilyFile};

pub const NAME: &str = "phi-roundtrip";

fn roundtrip_explicit(mixed: &MixedFamily, schedule: &dyn SizeSchedule) -> CaseOutcome {
    match phi_encode(mixed, schedule).and_then(|coded| phi_decode(&coded, schedule)) {
        Ok(back) if &back == mixed => CaseOutcome::pass(),
        Ok(_) => CaseOutcome::fail("decode(encode(X)) differs from X"),
        Err(e) => CaseOutcome::fail(format!("codec error: {e}")),
    }
}

fn roundtrip_slices(mixed: &MixedFamily, schedule: &dyn SizeSchedule) -> CaseOutcome {
    match phi_encode_slices(mixed, schedule).and_then(|s| phi_decode_slices(&s, schedule)) {
        Ok(back) if &back == mixed => CaseOutcome::pass(),
        Ok(_) => CaseOutcome::fail("slice decode(encode(X)) differs from X"),
        Err(e) => CaseOutcome::fail(format!("codec error: {e}")),
    }
}

fn mixed_case(part: &str, file: &MixedFamilyFile, extra: serde_json::Value) -> serde_json::Value {
    let mut case = json!({
        "suite": NAME,
        "part": part,
        "mixed": serialize_mixed(file),
    });
    if let Some(map) = extra.as_object() {
        for (k, v) in map {
            case[k] = v.clone();
        }
    }
    case
}

/// All 512 mixed families over the empty-shape cell and the singleton cell
/// with atoms below eight, embedded in the configured ground.
fn exhaustive_families(ground: GroundSet) -> Vec<MixedFamily> {
    (0..512u32)
        .map(|mask| {
            let mut x = MixedFamily::new(ground, 1).unwrap();
            if mask & 256 != 0 {
                x.insert_tuple(&SubsetTuple::new(vec![KSubset::empty()]).unwrap())
                    .unwrap();
            }
            for a in 0..8 {
                if mask >> a & 1 == 1 {
                    x.insert_tuple(
                        &SubsetTuple::new(vec![KSubset::from_atoms([a])]).unwrap(),
                    )
                    .unwrap();
                }
            }
            x
        })
        .collect()
}

fn random_mixed_family(
    seed: u64,
    ground: GroundSet,
    support: u32,
    density_pct: u32,
) -> MixedFamily {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut x = MixedFamily::new(ground, 2).unwrap();
    let mut parts: Vec<Vec<u32>> = vec![vec![]];
    parts.extend((0..support).map(|a| vec![a]));
    for left in &parts {
        for right in &parts {
            if rng.gen_range(0..100) < density_pct {
                let t = SubsetTuple::new(vec![
                    KSubset::from_atoms(left.iter().copied()),
                    KSubset::from_atoms(right.iter().copied()),
                ])
                .unwrap();
                x.insert_tuple(&t).unwrap();
            }
        }
    }
    x
}

pub fn run(cfg: &CampaignConfig) -> ReportRecord {
    let mut cases = 0u64;
    let mut failures: Vec<FailureRecord> = Vec::new();

    // schedule contracts for both built-in schedules at small parameters
    for arity in 1..=2usize {
        for max_cell in 0..=2u32 {
            for (id, result) in [
                ("paper", schedule_paper(arity, max_cell).map(|s| {
                    check_schedule_contract(&s)
                })),
                ("compact", schedule_compact(arity, max_cell).map(|s| {
                    check_schedule_contract(&s)
                })),
            ] {
                cases += 1;
                if let Err(e) | Ok(Err(e)) = result {
                    failures.push(FailureRecord {
                        case: json!({
                            "suite": NAME,
                            "part": "schedule-contract",
                            "schedule": id,
                            "arity": arity,
                            "max_cell": max_cell,
                        }),
                        message: format!("schedule contract violated: {e}"),
                    });
                }
            }
        }
    }

    // prime-table fidelity of the paper schedule at arity 2
    let primes: [u64; 4] = [2, 3, 5, 7];
    let paper = schedule_paper(2, 2).expect("paper schedule at (2,2)");
    for k1 in 0..=2u32 {
        for k2 in 0..=2u32 {
            let cell = finfam_core::CellShape::new(vec![k1, k2]).unwrap();
            for m in 0..=4u32 {
                for i in 1..=2u32 {
                    cases += 1;
                    let expected =
                        primes[0].pow(k1) * primes[1].pow(k2) * primes[2].pow(m) * primes[3].pow(i);
                    let got = paper.size(&cell, m, i);
                    if got != expected {
                        failures.push(FailureRecord {
                            case: json!({
                                "suite": NAME,
                                "part": "schedule-fidelity",
                                "k": [k1, k2],
                                "m": m,
                                "i": i,
                                "expected": expected,
                            }),
                            message: format!("size gave {got}, prime table gives {expected}"),
                        });
                    }
                }
            }
        }
    }

    // exhaustive round-trips and injectivity at arity 1, max cell 1
    let ground = GroundSet::new(cfg.ground_size).expect("validated ground");
    let explicit_roundtrips = cfg.schedule == ScheduleChoice::Compact;
    if explicit_roundtrips {
        let schedule = schedule_compact(1, 1).expect("compact schedule");
        let families = exhaustive_families(ground);
        let results: Vec<(usize, CaseOutcome, Option<String>)> = families
            .par_iter()
            .enumerate()
            .map(|(idx, x)| {
                let outcome = roundtrip_explicit(x, &schedule);
                let code = phi_encode(x, &schedule)
                    .ok()
                    .map(|c| crate::textform::serialize_coded(&c));
                (idx, outcome, code)
            })
            .collect();
        let mut seen: HashMap<String, usize> = HashMap::new();
        for (idx, outcome, code) in results {
            cases += 1;
            let file = MixedFamilyFile {
                family: families[idx].clone(),
                max_cell: 1,
                schedule: "compact".into(),
            };
            if !outcome.pass {
                failures.push(FailureRecord {
                    case: mixed_case("exhaustive", &file, json!({"path": "explicit"})),
                    message: outcome.message,
                });
            }
            if let Some(code) = code {
                cases += 1;
                if let Some(&other) = seen.get(&code) {
                    let other_file = MixedFamilyFile {
                        family: families[other].clone(),
                        max_cell: 1,
                        schedule: "compact".into(),
                    };
                    failures.push(FailureRecord {
                        case: json!({
                            "suite": NAME,
                            "part": "injectivity",
                            "x": serialize_mixed(&file),
                            "y": serialize_mixed(&other_file),
                        }),
                        message: "two distinct mixed families encode identically".into(),
                    });
                } else {
                    seen.insert(code, idx);
                }
            }
        }
    }

    // seeded higher-arity round-trips through the slice form
    let n2_schedule = schedule_compact(2, 1).expect("compact schedule at (2,1)");
    let n2_required = finfam_core::phi::required_ground_size(&n2_schedule);
    let n2_ground = GroundSet::new(n2_required as u32).expect("positive required ground");
    let trips: Vec<(u64, CaseOutcome, MixedFamily)> = (0..cfg.samples)
        .into_par_iter()
        .map(|trip| {
            let support = if trip % 2 == 0 { 6 } else { 12 };
            let x = random_mixed_family(
                cfg.seed.wrapping_add(trip),
                n2_ground,
                support,
                35,
            );
            let outcome = roundtrip_slices(&x, &n2_schedule);
            (trip, outcome, x)
        })
        .collect();
    for (trip, outcome, x) in trips {
        cases += 1;
        if !outcome.pass {
            let file = MixedFamilyFile {
                family: x,
                max_cell: 1,
                schedule: "compact".into(),
            };
            failures.push(FailureRecord {
                case: mixed_case(
                    "random-n2",
                    &file,
                    json!({"path": "slices", "trip": trip}),
                ),
                message: outcome.message,
            });
        }
    }

    let mut params = BTreeMap::new();
    params.insert("ground".into(), cfg.ground_size.to_string());
    params.insert("schedule".into(), cfg.schedule.to_string());
    params.insert("samples".into(), cfg.samples.to_string());
    params.insert("seed".into(), cfg.seed.to_string());
    if !explicit_roundtrips {
        params.insert(
            "note".into(),
            "explicit round-trips run under the compact schedule only".into(),
        );
    }
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
    match part {
        "exhaustive" | "random-n2" => {
            let file = parse_mixed(case_str(case, "mixed")?)?;
            let arity = file.family.arity();
            let schedule: Box<dyn SizeSchedule> = match file.schedule.as_str() {
                "paper" => Box::new(schedule_paper(arity, file.max_cell)?),
                _ => Box::new(schedule_compact(arity, file.max_cell)?),
            };
            let path = case_str(case, "path")?;
            Ok(if path == "slices" {
                roundtrip_slices(&file.family, schedule.as_ref())
            } else {
                roundtrip_explicit(&file.family, schedule.as_ref())
            })
        }
        "injectivity" => {
            let x = parse_mixed(case_str(case, "x")?)?;
            let y = parse_mixed(case_str(case, "y")?)?;
            let schedule = schedule_compact(x.family.arity(), x.max_cell)?;
            let cx = phi_encode(&x.family, &schedule)?;
            let cy = phi_encode(&y.family, &schedule)?;
            Ok(if x.family != y.family && cx == cy {
                CaseOutcome::fail("two distinct mixed families encode identically")
            } else {
                CaseOutcome::pass()
            })
        }
        "schedule-fidelity" => {
            let k = crate::suites::case_shape(case, "k")?;
            let m = case_u64(case, "m")? as u32;
            let i = case_u64(case, "i")? as u32;
            let expected = case_u64(case, "expected")?;
            let paper = schedule_paper(k.len(), 2)?;
            let cell = finfam_core::CellShape::new(k)?;
            Ok(if paper.size(&cell, m, i) == expected {
                CaseOutcome::pass()
            } else {
                CaseOutcome::fail("paper schedule size differs from prime table")
            })
        }
        "schedule-contract" => {
            let arity = case_u64(case, "arity")? as usize;
            let max_cell = case_u64(case, "max_cell")? as u32;
            let result = match case_str(case, "schedule")? {
                "paper" => check_schedule_contract(&schedule_paper(arity, max_cell)?),
                _ => check_schedule_contract(&schedule_compact(arity, max_cell)?),
            };
            Ok(match result {
                Ok(()) => CaseOutcome::pass(),
                Err(e) => CaseOutcome::fail(format!("schedule contract violated: {e}")),
            })
        }
        other => Ok(CaseOutcome::fail(format!("unknown part '{other}'"))),
    }
}
