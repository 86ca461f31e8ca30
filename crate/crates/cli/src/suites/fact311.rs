//! The eight operator laws, swept exhaustively over every family (and
//! every ordered pair for the relational laws) of a grid of small unary
//! contexts.

use std::collections::{BTreeMap, HashMap};

use finfam_core::grid::{big_f, big_g, iterate_h, OperatorContext};
use finfam_core::ground::{CellShape, Family, GroundSet};
use rayon::prelude::*;
use serde_json::json;

use crate::config::CampaignConfig;
use crate::error::Result;
use crate::report::{finalize_failures, FailureRecord, ReportRecord};
use crate::suites::{case_shape, case_str, case_u64, CaseOutcome};
use crate::textform::{parse_family, serialize_family};

pub const NAME: &str = "fact-311";

/// Planted failing invariant for the mutation hook: extensivity reversed.
pub const MUTATION_EXTENSIVITY: &str = "fact311-extensivity";

#[derive(Debug, Clone)]
struct GridSpec {
    ground: u32,
    k: Vec<u32>,
    l: Vec<u32>,
    l2: Option<Vec<u32>>,
}

/// Unary contexts: k <= 2, l <= 3, ground in {max(1, l), l + 1}; pair
/// contexts additionally carry every l2 with l <= l2 <= 3.
fn grid_specs() -> Vec<GridSpec> {
    let mut specs = Vec::new();
    for k in 0..=2u32 {
        for l in k..=3u32 {
            for ground in [l.max(1), l + 1] {
                specs.push(GridSpec {
                    ground,
                    k: vec![k],
                    l: vec![l],
                    l2: None,
                });
            }
            for l2 in l..=3u32 {
                for ground in [l2.max(1), l2 + 1] {
                    specs.push(GridSpec {
                        ground,
                        k: vec![k],
                        l: vec![l],
                        l2: Some(vec![l2]),
                    });
                }
            }
        }
    }
    specs
}

fn context(ground: u32, k: &[u32], l: &[u32]) -> Result<OperatorContext> {
    Ok(OperatorContext::new(
        GroundSet::new(ground)?,
        CellShape::new(k.to_vec())?,
        CellShape::new(l.to_vec())?,
    )?)
}

fn all_families(ctx: &OperatorContext) -> Result<Vec<Family>> {
    let size = ctx.lower_shape().cell_size(ctx.ground())?;
    assert!(size <= 20, "suite grids keep cells tiny");
    Ok((0..1u64 << size)
        .map(|mask| {
            Family::from_rank_mask(*ctx.ground(), ctx.lower_shape().clone(), mask)
                .expect("mask within cell")
        })
        .collect())
}

struct CaseCheck {
    item: &'static str,
    spec: GridSpec,
    x: Family,
    y: Option<Family>,
    message: String,
}

fn make_case(check: &CaseCheck, mutation: Option<&str>) -> serde_json::Value {
    json!({
        "suite": NAME,
        "item": check.item,
        "ground": check.spec.ground,
        "k": check.spec.k,
        "l": check.spec.l,
        "l2": check.spec.l2,
        "x": serialize_family(&check.x),
        "y": check.y.as_ref().map(serialize_family),
        "mutation": mutation,
    })
}

/// Evaluates one law instance. This single function backs both the sweep
/// and counterexample replay.
fn check_item(
    item: &str,
    spec: &GridSpec,
    x: &Family,
    y: Option<&Family>,
    mutation: Option<&str>,
) -> Result<CaseOutcome> {
    let ctx = context(spec.ground, &spec.k, &spec.l)?;
    let outcome = match item {
        "i" => {
            let y = y.expect("law i is relational");
            if big_f(x, &ctx)?.is_subset_of(&big_f(y, &ctx)?) {
                CaseOutcome::pass()
            } else {
                CaseOutcome::fail("F is not monotone on this pair")
            }
        }
        "ii" => {
            let gx = big_g(x, &ctx)?;
            let holds = if mutation == Some(MUTATION_EXTENSIVITY) {
                gx.is_subset_of(x)
            } else {
                x.is_subset_of(&gx)
            };
            if holds {
                CaseOutcome::pass()
            } else {
                CaseOutcome::fail("extensivity fails: X is not inside G(X)")
            }
        }
        "iii" => {
            let y = y.expect("law iii is relational");
            if big_g(x, &ctx)?.is_subset_of(&big_g(y, &ctx)?) {
                CaseOutcome::pass()
            } else {
                CaseOutcome::fail("G is not monotone on this pair")
            }
        }
        "iv" => {
            let gx = big_g(x, &ctx)?;
            if big_g(&gx, &ctx)? == gx {
                CaseOutcome::pass()
            } else {
                CaseOutcome::fail("G is not idempotent here")
            }
        }
        "v" => {
            let gx = big_g(x, &ctx)?;
            if big_f(&gx, &ctx)? == big_f(x, &ctx)? {
                CaseOutcome::pass()
            } else {
                CaseOutcome::fail("F(G(X)) differs from F(X)")
            }
        }
        "vi" => {
            let y = y.expect("law vi compares two families");
            let x_fixed = big_g(x, &ctx)? == *x;
            let y_fixed = big_g(y, &ctx)? == *y;
            let same_image = big_f(x, &ctx)? == big_f(y, &ctx)?;
            if x_fixed && y_fixed && same_image && x != y {
                CaseOutcome::fail("two distinct G-fixed families share an F-image")
            } else {
                CaseOutcome::pass()
            }
        }
        "vii" => {
            let bound = spec.k.iter().sum::<u32>() as usize + 1;
            let mut ok = true;
            for m in 0..=bound {
                let hm = iterate_h(x, &ctx, m)?;
                let rhs = big_g(&hm, &ctx)?.difference(&iterate_h(x, &ctx, m + 1)?);
                if hm != rhs {
                    ok = false;
                    break;
                }
            }
            if ok {
                CaseOutcome::pass()
            } else {
                CaseOutcome::fail("H-iteration identity fails")
            }
        }
        "viii" => {
            let l2 = spec.l2.as_ref().expect("law viii needs the larger shape");
            let ctx_big = context(spec.ground, &spec.k, l2)?;
            let g_small = big_g(x, &ctx)?;
            let g_big = big_g(x, &ctx_big)?;
            let inclusion = g_small.is_subset_of(&g_big);
            let transfer = g_big != *x || g_small == *x;
            if inclusion && transfer {
                CaseOutcome::pass()
            } else {
                CaseOutcome::fail("upper-shape comparison law fails")
            }
        }
        other => CaseOutcome::fail(format!("unknown law '{other}'")),
    };
    Ok(outcome)
}

struct Sweep<'a> {
    spec: &'a GridSpec,
    mutation: Option<&'a str>,
    cases: u64,
    failures: Vec<CaseCheck>,
}

impl Sweep<'_> {
    fn record(&mut self, item: &'static str, x: &Family, y: Option<&Family>) -> Result<()> {
        self.cases += 1;
        let outcome = check_item(item, self.spec, x, y, self.mutation)?;
        if !outcome.pass {
            self.failures.push(CaseCheck {
                item,
                spec: self.spec.clone(),
                x: x.clone(),
                y: y.cloned(),
                message: outcome.message,
            });
        }
        Ok(())
    }
}

fn sweep_spec(spec: &GridSpec, mutation: Option<&str>) -> Result<(u64, Vec<CaseCheck>)> {
    let ctx = context(spec.ground, &spec.k, &spec.l)?;
    let families = all_families(&ctx)?;
    let mut sweep = Sweep {
        spec,
        mutation,
        cases: 0,
        failures: Vec::new(),
    };

    if spec.l2.is_some() {
        for x in &families {
            sweep.record("viii", x, None)?;
        }
        return Ok((sweep.cases, sweep.failures));
    }

    let mut g_fixed_images: HashMap<Family, Family> = HashMap::new();
    for x in &families {
        sweep.record("ii", x, None)?;
        sweep.record("iv", x, None)?;
        sweep.record("v", x, None)?;
        sweep.record("vii", x, None)?;
        // law vi by collision detection over the G-fixed families
        if big_g(x, &ctx)? == *x {
            sweep.cases += 1;
            let image = big_f(x, &ctx)?;
            if let Some(other) = g_fixed_images.insert(image, x.clone()) {
                if other != *x {
                    sweep.failures.push(CaseCheck {
                        item: "vi",
                        spec: spec.clone(),
                        x: x.clone(),
                        y: Some(other),
                        message: "two distinct G-fixed families share an F-image".into(),
                    });
                }
            }
        }
    }
    // monotonicity over all ordered subset pairs, via submask enumeration
    let cell = ctx.lower_shape().cell_size(ctx.ground())?;
    for y_mask in 0..1u64 << cell {
        let y = &families[y_mask as usize];
        let mut x_mask = y_mask;
        loop {
            let x = &families[x_mask as usize];
            sweep.record("i", x, Some(y))?;
            sweep.record("iii", x, Some(y))?;
            if x_mask == 0 {
                break;
            }
            x_mask = (x_mask - 1) & y_mask;
        }
    }
    Ok((sweep.cases, sweep.failures))
}

pub fn run(cfg: &CampaignConfig) -> ReportRecord {
    let mutation = cfg
        .mutate
        .as_deref()
        .filter(|m| m.starts_with("fact311"));
    let results: Vec<Result<(u64, Vec<CaseCheck>)>> = grid_specs()
        .par_iter()
        .map(|spec| sweep_spec(spec, mutation))
        .collect();
    let mut cases = 0u64;
    let mut failures = Vec::new();
    for result in results {
        match result {
            Ok((n, fails)) => {
                cases += n;
                for check in fails {
                    failures.push(FailureRecord {
                        case: make_case(&check, mutation),
                        message: check.message.clone(),
                    });
                }
            }
            Err(e) => failures.push(FailureRecord {
                case: json!({ "suite": NAME, "error": e.to_string() }),
                message: format!("sweep error: {e}"),
            }),
        }
    }
    let mut params = BTreeMap::new();
    params.insert("grids".into(), grid_specs().len().to_string());
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

pub fn replay(case: &serde_json::Value) -> Result<CaseOutcome> {
    let item = case_str(case, "item")?.to_string();
    let spec = GridSpec {
        ground: case_u64(case, "ground")? as u32,
        k: case_shape(case, "k")?,
        l: case_shape(case, "l")?,
        l2: case.get("l2").and_then(|v| {
            v.as_array().map(|arr| {
                arr.iter()
                    .filter_map(|x| x.as_u64().map(|v| v as u32))
                    .collect()
            })
        }),
    };
    let x = parse_family(case_str(case, "x")?)?;
    let y = match case.get("y").and_then(|v| v.as_str()) {
        Some(text) => Some(parse_family(text)?),
        None => None,
    };
    let mutation = case.get("mutation").and_then(|v| v.as_str());
    check_item(&item, &spec, &x, y.as_ref(), mutation)
}
