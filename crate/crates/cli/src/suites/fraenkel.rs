//! Permutation-kernel sweeps: orbit partition and swap laws over full
//! symmetric groups, pigeonhole totality at the threshold pool size, the
//! chain and counting bounds, and the worked support checks.

use std::collections::{BTreeMap, BTreeSet};

use finfam_core::encodings::InjectiveSequence;
use finfam_core::fraenkel::{
    chain_length_bound, longest_chain, parity, parity_orbits, partition_fiber_check,
    pigeonhole_pair, support_check, FiniteMap, NestedValue, Parity, PermutationOfAtoms,
};
use finfam_core::ground::{Atom, GroundSet, KSubset};
use itertools::Itertools;
use num_bigint::BigUint;
use rayon::prelude::*;
use serde_json::json;

use crate::config::CampaignConfig;
use crate::error::Result;
use crate::report::{finalize_failures, FailureRecord, ReportRecord};
use crate::suites::{case_str, case_u64, CaseOutcome};

pub const NAME: &str = "fraenkel";

/// Partition and swap laws for one (|C|, |u|) configuration, over the full
/// symmetric group. Lengths below |C| - 1 are degenerate (an odd
/// transposition of two unused atoms fixes u) and are expected to collapse.
fn check_orbits(domain_size: u32, tuple_len: usize) -> CaseOutcome {
    let atoms: Vec<Atom> = (0..domain_size).collect();
    let domain = KSubset::from_atoms(atoms.iter().copied());
    let u = InjectiveSequence::new((0..tuple_len as u32).collect()).expect("canonical tuple");
    let pair = match parity_orbits(&u, &domain) {
        Ok(p) => p,
        Err(e) => return CaseOutcome::fail(format!("orbit computation failed: {e}")),
    };
    let all: BTreeSet<InjectiveSequence> = atoms
        .iter()
        .copied()
        .permutations(tuple_len)
        .map(|entries| InjectiveSequence::new(entries).unwrap())
        .collect();
    let union: BTreeSet<InjectiveSequence> = pair.even.union(&pair.odd).cloned().collect();
    if union != all {
        return CaseOutcome::fail("orbits do not cover all injective tuples");
    }
    if tuple_len + 1 < domain_size as usize {
        return if pair.even == all && pair.odd == all {
            CaseOutcome::pass()
        } else {
            CaseOutcome::fail("short tuples should have coinciding orbits")
        };
    }
    if !pair.even.is_disjoint(&pair.odd) {
        return CaseOutcome::fail("even and odd orbits overlap");
    }
    for image in atoms.iter().copied().permutations(atoms.len()) {
        let perm = PermutationOfAtoms::from_images(&atoms, &image).expect("bijection");
        let moved_even: BTreeSet<InjectiveSequence> =
            pair.even.iter().map(|s| perm.apply_sequence(s)).collect();
        let moved_odd: BTreeSet<InjectiveSequence> =
            pair.odd.iter().map(|s| perm.apply_sequence(s)).collect();
        let ok = match parity(&perm, &domain).expect("moves inside domain") {
            Parity::Even => moved_even == pair.even && moved_odd == pair.odd,
            Parity::Odd => moved_even == pair.odd && moved_odd == pair.even,
        };
        if !ok {
            return CaseOutcome::fail(format!("orbit law fails under {perm:?}"));
        }
    }
    CaseOutcome::pass()
}

fn check_pigeonhole(parts_masks: &[u64], atoms_per_part: u32, pool: &[Atom]) -> CaseOutcome {
    let t: Vec<KSubset> = parts_masks
        .iter()
        .map(|&mask| KSubset::from_atoms((0..atoms_per_part).filter(|a| mask >> a & 1 == 1)))
        .collect();
    let pool_set = KSubset::from_atoms(pool.iter().copied());
    match pigeonhole_pair(&t, &pool_set) {
        Ok((a, b)) => {
            if a >= b {
                return CaseOutcome::fail("pair is not ordered");
            }
            let tau = PermutationOfAtoms::transposition(a, b);
            for part in &t {
                if &tau.apply_set(part) != part {
                    return CaseOutcome::fail(format!(
                        "transposition ({a} {b}) moves component {part}"
                    ));
                }
            }
            CaseOutcome::pass()
        }
        Err(e) => CaseOutcome::fail(format!("no pair found: {e}")),
    }
}

fn check_chain_bound(ground_size: u32, n: u32) -> CaseOutcome {
    let ground = GroundSet::new(ground_size).expect("positive ground");
    match longest_chain(&ground, &KSubset::empty(), n) {
        Ok(longest) => {
            let bound = chain_length_bound(0, n);
            if BigUint::from(longest) < bound {
                CaseOutcome::pass()
            } else {
                CaseOutcome::fail(format!("chain of length {longest} reaches bound {bound}"))
            }
        }
        Err(e) => CaseOutcome::fail(format!("chain search failed: {e}")),
    }
}

fn check_fiber_bound(ground_size: u32, n: u32) -> CaseOutcome {
    let ground = GroundSet::new(ground_size).expect("positive ground");
    match partition_fiber_check(&ground, &KSubset::empty(), n) {
        Ok(report) if report.holds => CaseOutcome::pass(),
        Ok(report) => CaseOutcome::fail(format!(
            "fiber of size {} exceeds bound {}",
            report.max_fiber, report.bound
        )),
        Err(e) => CaseOutcome::fail(format!("fiber check failed: {e}")),
    }
}

fn subset_map(ground: &GroundSet, f: impl Fn(&KSubset) -> KSubset) -> FiniteMap {
    let n = ground.size();
    FiniteMap::from_pairs((0..1u32 << n).map(|mask| {
        let set = KSubset::from_atoms((0..n).filter(|a| mask >> a & 1 == 1));
        (
            NestedValue::from_atom_set(&set),
            NestedValue::from_atom_set(&f(&set)),
        )
    }))
}

fn check_support(which: &str) -> CaseOutcome {
    let ground = GroundSet::new(5).expect("positive ground");
    let verdict = match which {
        "identity-empty" => {
            support_check(&subset_map(&ground, |s| s.clone()), &KSubset::empty(), &ground)
        }
        "insert-supported" => support_check(
            &subset_map(&ground, |s| s.union(&KSubset::from_atoms([3]))),
            &KSubset::from_atoms([3]),
            &ground,
        ),
        "insert-unsupported" => support_check(
            &subset_map(&ground, |s| s.union(&KSubset::from_atoms([3]))),
            &KSubset::empty(),
            &ground,
        )
        .map(|ok| !ok),
        "constant-value-support" => support_check(
            &subset_map(&ground, |_| KSubset::from_atoms([1, 2])),
            &KSubset::from_atoms([1, 2]),
            &ground,
        ),
        other => return CaseOutcome::fail(format!("unknown support case '{other}'")),
    };
    match verdict {
        Ok(true) => CaseOutcome::pass(),
        Ok(false) => CaseOutcome::fail(format!("support check '{which}' gave the wrong verdict")),
        Err(e) => CaseOutcome::fail(format!("support check '{which}' errored: {e}")),
    }
}

pub fn run(cfg: &CampaignConfig) -> ReportRecord {
    let _ = cfg;
    let mut cases = 0u64;
    let mut failures: Vec<FailureRecord> = Vec::new();

    // orbit partition and swap laws, |C| <= 5, all tuple lengths
    let orbit_jobs: Vec<(u32, usize)> = (2..=5u32)
        .flat_map(|c| (1..=c as usize).map(move |len| (c, len)))
        .collect();
    let orbit_results: Vec<((u32, usize), CaseOutcome)> = orbit_jobs
        .par_iter()
        .map(|&(c, len)| ((c, len), check_orbits(c, len)))
        .collect();
    for ((c, len), outcome) in orbit_results {
        cases += 1;
        if !outcome.pass {
            failures.push(FailureRecord {
                case: json!({ "suite": NAME, "part": "orbits", "domain": c, "len": len }),
                message: outcome.message,
            });
        }
    }

    // pigeonhole totality at pool size 2^n + 1
    // n = 1: parts over seven atoms, every 3-atom pool
    let pools_n1: Vec<Vec<Atom>> = (0..7u32).combinations(3).collect();
    let n1_results: Vec<(u64, Vec<Atom>, CaseOutcome)> = (0..128u64)
        .into_par_iter()
        .flat_map_iter(|mask| {
            pools_n1.iter().map(move |pool| {
                (
                    mask,
                    pool.clone(),
                    check_pigeonhole(&[mask], 7, pool),
                )
            })
        })
        .collect();
    for (mask, pool, outcome) in n1_results {
        cases += 1;
        if !outcome.pass {
            failures.push(FailureRecord {
                case: json!({
                    "suite": NAME, "part": "pigeonhole",
                    "parts": [mask], "atoms": 7, "pool": pool,
                }),
                message: outcome.message,
            });
        }
    }
    // n = 2: parts over six atoms, pool {0..4}
    let pool_n2: Vec<Atom> = (0..5).collect();
    let n2_results: Vec<(u64, u64, CaseOutcome)> = (0..64u64)
        .into_par_iter()
        .flat_map_iter(|m1| {
            let pool = pool_n2.clone();
            (0..64u64).map(move |m2| (m1, m2, check_pigeonhole(&[m1, m2], 6, &pool)))
        })
        .collect();
    for (m1, m2, outcome) in n2_results {
        cases += 1;
        if !outcome.pass {
            failures.push(FailureRecord {
                case: json!({
                    "suite": NAME, "part": "pigeonhole",
                    "parts": [m1, m2], "atoms": 6, "pool": pool_n2,
                }),
                message: outcome.message,
            });
        }
    }

    // chain bound at n=1 over four atoms, plus smaller companions
    for (ground, n) in [(4u32, 1u32), (3, 1), (3, 2)] {
        cases += 1;
        let outcome = check_chain_bound(ground, n);
        if !outcome.pass {
            failures.push(FailureRecord {
                case: json!({ "suite": NAME, "part": "chain", "ground": ground, "n": n }),
                message: outcome.message,
            });
        }
    }

    // counting bound, exhaustively at n=1 over grounds up to four
    for ground in 1..=4u32 {
        cases += 1;
        let outcome = check_fiber_bound(ground, 1);
        if !outcome.pass {
            failures.push(FailureRecord {
                case: json!({ "suite": NAME, "part": "fiber", "ground": ground, "n": 1 }),
                message: outcome.message,
            });
        }
    }

    // support checks for the worked maps
    for which in [
        "identity-empty",
        "insert-supported",
        "insert-unsupported",
        "constant-value-support",
    ] {
        cases += 1;
        let outcome = check_support(which);
        if !outcome.pass {
            failures.push(FailureRecord {
                case: json!({ "suite": NAME, "part": "support", "which": which }),
                message: outcome.message,
            });
        }
    }

    ReportRecord {
        suite: NAME.into(),
        params: BTreeMap::new(),
        cases,
        failures: finalize_failures(failures, 16),
        millis: 0,
    }
}

pub fn replay(case: &serde_json::Value) -> Result<CaseOutcome> {
    let part = case_str(case, "part")?;
    match part {
        "orbits" => Ok(check_orbits(
            case_u64(case, "domain")? as u32,
            case_u64(case, "len")? as usize,
        )),
        "pigeonhole" => {
            let parts: Vec<u64> = case
                .get("parts")
                .and_then(|v| v.as_array())
                .map(|arr| arr.iter().filter_map(|x| x.as_u64()).collect())
                .unwrap_or_default();
            let atoms = case_u64(case, "atoms")? as u32;
            let pool: Vec<Atom> = case
                .get("pool")
                .and_then(|v| v.as_array())
                .map(|arr| {
                    arr.iter()
                        .filter_map(|x| x.as_u64().map(|v| v as u32))
                        .collect()
                })
                .unwrap_or_default();
            Ok(check_pigeonhole(&parts, atoms, &pool))
        }
        "chain" => Ok(check_chain_bound(
            case_u64(case, "ground")? as u32,
            case_u64(case, "n")? as u32,
        )),
        "fiber" => Ok(check_fiber_bound(
            case_u64(case, "ground")? as u32,
            case_u64(case, "n")? as u32,
        )),
        "support" => Ok(check_support(case_str(case, "which")?)),
        other => Ok(CaseOutcome::fail(format!("unknown part '{other}'"))),
    }
}
