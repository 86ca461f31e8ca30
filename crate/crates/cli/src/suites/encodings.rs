//! Sweeps for the sequence/subset encodings: the chain map's injectivity,
//! the pairing's bijectivity and bound, split preimages, and the powerset
//! injection round-trips.

use std::collections::{BTreeMap, HashMap};

use finfam_core::encodings::{
    pair, pow_inject, pow_inject_inverse, seqi_split, seqi_to_finfin, unpair,
    InjectiveSequence, PowersetInjection,
};
use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::CampaignConfig;
use crate::error::Result;
use crate::report::{finalize_failures, FailureRecord, ReportRecord};
use crate::suites::{case_str, case_u64, CaseOutcome};

pub const NAME: &str = "encodings";

const POW_RANDOM_CASES: u64 = 10_000;

fn check_pow_roundtrip(n: u32, assignment: &[u32]) -> CaseOutcome {
    let t = match PowersetInjection::new(n, assignment.to_vec()) {
        Ok(t) => t,
        Err(e) => return CaseOutcome::fail(format!("invalid injection: {e}")),
    };
    match pow_inject_inverse(&pow_inject(&t), n) {
        Ok(back) if back == t => CaseOutcome::pass(),
        Ok(_) => CaseOutcome::fail("inverse returned a different injection"),
        Err(e) => CaseOutcome::fail(format!("inverse failed: {e}")),
    }
}

fn check_pairing(m: u64, n: u64) -> CaseOutcome {
    let d = pair(m, n);
    if n > d {
        return CaseOutcome::fail(format!("bound fails: pair({m},{n}) = {d} < {n}"));
    }
    if unpair(d) != (m, n) {
        return CaseOutcome::fail(format!("unpair(pair({m},{n})) != ({m},{n})"));
    }
    CaseOutcome::pass()
}

fn check_split_preimage(m: u64, entries: &[u32], ground: u32) -> CaseOutcome {
    let total = pair(m, entries.len() as u64);
    let mut extended = entries.to_vec();
    for a in 0..ground {
        if extended.len() as u64 == total {
            break;
        }
        if !extended.contains(&a) {
            extended.push(a);
        }
    }
    if extended.len() as u64 != total {
        return CaseOutcome::fail("ground too small to build a preimage");
    }
    let t = InjectiveSequence::new(extended).expect("extension stays injective");
    let (got_m, got_s) = seqi_split(&t);
    if got_m == m && got_s.entries() == entries {
        CaseOutcome::pass()
    } else {
        CaseOutcome::fail(format!(
            "split of the extension gave ({got_m}, {got_s}) instead of ({m}, <len {}>)",
            entries.len()
        ))
    }
}

pub fn run(cfg: &CampaignConfig) -> ReportRecord {
    let mut cases = 0u64;
    let mut failures: Vec<FailureRecord> = Vec::new();

    // chain-map injectivity: all injective sequences of length <= 4 over 5
    // atoms give pairwise distinct chains
    let mut images = HashMap::new();
    let mut sequences = vec![InjectiveSequence::default()];
    for len in 1..=4usize {
        for entries in (0..5u32).permutations(len) {
            sequences.push(InjectiveSequence::new(entries).unwrap());
        }
    }
    for s in &sequences {
        cases += 1;
        if let Some(other) = images.insert(seqi_to_finfin(s), s.clone()) {
            failures.push(FailureRecord {
                case: json!({
                    "suite": NAME,
                    "part": "chain-collision",
                    "x": format!("{s}"),
                    "y": format!("{other}"),
                }),
                message: "two sequences share a chain image".into(),
            });
        }
    }

    // pairing bijection with bound over {0..200}^2
    let mut seen_codes = vec![false; 401 * 401];
    for m in 0..=200u64 {
        for n in 0..=200u64 {
            cases += 1;
            let outcome = check_pairing(m, n);
            let d = pair(m, n);
            let collision = (d as usize) < seen_codes.len() && seen_codes[d as usize];
            if (d as usize) < seen_codes.len() {
                seen_codes[d as usize] = true;
            }
            if !outcome.pass || collision {
                failures.push(FailureRecord {
                    case: json!({ "suite": NAME, "part": "pairing", "m": m, "n": n }),
                    message: if collision {
                        "pairing collision".into()
                    } else {
                        outcome.message
                    },
                });
            }
        }
    }

    // split preimages for all reachable (m, s) with paired length <= 8
    for m in 0..=8u64 {
        for len in 0..=8usize {
            if pair(m, len as u64) > 8 {
                continue;
            }
            for entries in (0..10u32).permutations(len) {
                cases += 1;
                let outcome = check_split_preimage(m, &entries, 10);
                if !outcome.pass {
                    failures.push(FailureRecord {
                        case: json!({
                            "suite": NAME,
                            "part": "split-preimage",
                            "m": m,
                            "entries": entries,
                            "ground": 10,
                        }),
                        message: outcome.message,
                    });
                }
            }
        }
    }

    // powerset-injection round-trips: exhaustive at n <= 2 over six atoms
    for n in [1u32, 2] {
        let domain = 1usize << n;
        for assignment in (0..6u32).permutations(domain) {
            cases += 1;
            let outcome = check_pow_roundtrip(n, &assignment);
            if !outcome.pass {
                failures.push(FailureRecord {
                    case: json!({
                        "suite": NAME,
                        "part": "pow-roundtrip",
                        "n": n,
                        "assignment": assignment,
                    }),
                    message: outcome.message,
                });
            }
        }
    }
    // and seeded random cases at n = 3 over twenty atoms
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let atoms: Vec<u32> = (0..20).collect();
    for _ in 0..POW_RANDOM_CASES {
        let assignment: Vec<u32> = atoms.choose_multiple(&mut rng, 8).copied().collect();
        cases += 1;
        let outcome = check_pow_roundtrip(3, &assignment);
        if !outcome.pass {
            failures.push(FailureRecord {
                case: json!({
                    "suite": NAME,
                    "part": "pow-roundtrip",
                    "n": 3,
                    "assignment": assignment,
                }),
                message: outcome.message,
            });
        }
    }

    let mut params = BTreeMap::new();
    params.insert("seed".into(), cfg.seed.to_string());
    params.insert("pow_random_cases".into(), POW_RANDOM_CASES.to_string());
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
        "pairing" => Ok(check_pairing(case_u64(case, "m")?, case_u64(case, "n")?)),
        "split-preimage" => {
            let m = case_u64(case, "m")?;
            let entries: Vec<u32> = case
                .get("entries")
                .and_then(|v| v.as_array())
                .map(|arr| {
                    arr.iter()
                        .filter_map(|x| x.as_u64().map(|v| v as u32))
                        .collect()
                })
                .unwrap_or_default();
            let ground = case_u64(case, "ground")? as u32;
            Ok(check_split_preimage(m, &entries, ground))
        }
        "pow-roundtrip" => {
            let n = case_u64(case, "n")? as u32;
            let assignment: Vec<u32> = case
                .get("assignment")
                .and_then(|v| v.as_array())
                .map(|arr| {
                    arr.iter()
                        .filter_map(|x| x.as_u64().map(|v| v as u32))
                        .collect()
                })
                .unwrap_or_default();
            Ok(check_pow_roundtrip(n, &assignment))
        }
        "chain-collision" => {
            // re-derive both images and compare
            let parse = |text: &str| -> Result<InjectiveSequence> {
                let inner = text.trim_start_matches('<').trim_end_matches('>');
                let entries: Vec<u32> = if inner.is_empty() {
                    vec![]
                } else {
                    inner
                        .split(',')
                        .map(|s| {
                            s.parse::<u32>().map_err(|_| {
                                crate::error::CliError::Replay(format!("bad atom '{s}'"))
                            })
                        })
                        .collect::<Result<Vec<u32>>>()?
                };
                Ok(InjectiveSequence::new(entries)?)
            };
            let x = parse(case_str(case, "x")?)?;
            let y = parse(case_str(case, "y")?)?;
            Ok(if x != y && seqi_to_finfin(&x) == seqi_to_finfin(&y) {
                CaseOutcome::fail("two sequences share a chain image")
            } else {
                CaseOutcome::pass()
            })
        }
        other => Ok(CaseOutcome::fail(format!("unknown part '{other}'"))),
    }
}
