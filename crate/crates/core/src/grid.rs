//! The extension operator F, the induced closure-like operator G, and the
//! difference operator H on families, together with the descent machinery
//! built on them.
//!
//! For a context with lower shape `k` and upper shape `l` (componentwise
//! `k_i <= l_i`, ground at least `l_1 + .. + l_n` atoms):
//!
//! * `F(X)` is the set of `l`-cell tuples extending some member of `X`;
//! * `G(X)` is the set of `k`-cell tuples all of whose `l`-cell extensions
//!   lie in `F(X)`;
//! * `H(X) = G(X) \ X`.
//!
//! G is computed by one of three interchangeable strategies: precomputed
//! cover/extension tables when the upper cell is small, direct extension
//! scanning at moderate sizes, and a per-candidate exclusion-set search when
//! the upper cell is too large to touch at all. The last decides whether a
//! candidate has an extension avoiding `X` by looking for per-coordinate
//! sets of excluded atoms that meet every member of `X`, subject to the
//! capacity `|A| - l_i` on each coordinate.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::ground::{Atom, CellShape, Family, GroundSet, KSubset, SubsetTuple};

/// Upper bound on cell sizes for which cover/extension tables are built.
const DENSE_CELL_LIMIT: u64 = 1 << 20;
/// Upper bound on total table entries.
const DENSE_ADJ_LIMIT: u64 = 1 << 24;
/// Upper bound on per-candidate extension counts for the scanning strategy.
const SCAN_EXT_LIMIT: u64 = 1 << 16;
/// Node budget for one exclusion-set search call.
const SEARCH_NODE_BUDGET: u64 = 1 << 26;
/// Upper bound on enumeration work for materializing an F-image.
const F_ENUMERATION_LIMIT: u64 = 1 << 24;

/// Fixed data of the operators: ground set, arity, and the two shapes.
#[derive(Debug)]
pub struct OperatorContext {
    ground: GroundSet,
    k: CellShape,
    l: CellShape,
    tables: OnceLock<Option<Arc<DenseTables>>>,
}

impl Clone for OperatorContext {
    fn clone(&self) -> Self {
        let tables = OnceLock::new();
        if let Some(t) = self.tables.get() {
            let _ = tables.set(t.clone());
        }
        OperatorContext {
            ground: self.ground,
            k: self.k.clone(),
            l: self.l.clone(),
            tables,
        }
    }
}

impl PartialEq for OperatorContext {
    fn eq(&self, other: &Self) -> bool {
        self.ground == other.ground && self.k == other.k && self.l == other.l
    }
}
impl Eq for OperatorContext {}

impl OperatorContext {
    /// Requires `k_i <= l_i` per coordinate and `|A| >= l_1 + .. + l_n`.
    /// The ground bound guarantees every candidate has at least one
    /// extension, which is what keeps `G(empty) = empty` and the
    /// injectivity of F on G-fixed families true at finite scale.
    pub fn new(ground: GroundSet, k: CellShape, l: CellShape) -> Result<Self> {
        if k.arity() != l.arity() {
            return Err(Error::ArityMismatch {
                left: k.arity(),
                right: l.arity(),
            });
        }
        for (i, (&ki, &li)) in k.sizes().iter().zip(l.sizes()).enumerate() {
            if ki > li {
                return Err(Error::ShapeNotDominated { coord: i });
            }
        }
        let needed = l.size_sum();
        if (ground.size() as u64) < needed {
            return Err(Error::GroundTooSmall {
                required: needed,
                actual: ground.size() as u64,
            });
        }
        Ok(OperatorContext {
            ground,
            k,
            l,
            tables: OnceLock::new(),
        })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn arity(&self) -> usize {
        self.k.arity()
    }

    pub fn lower_shape(&self) -> &CellShape {
        &self.k
    }

    pub fn upper_shape(&self) -> &CellShape {
        &self.l
    }

    fn check_lower(&self, x: &Family) -> Result<()> {
        if x.ground() != &self.ground || x.shape() != &self.k {
            return Err(Error::ShapeMismatch {
                shape: self.k.clone(),
            });
        }
        Ok(())
    }

    fn check_upper(&self, z: &Family) -> Result<()> {
        if z.ground() != &self.ground || z.shape() != &self.l {
            return Err(Error::ShapeMismatch {
                shape: self.l.clone(),
            });
        }
        Ok(())
    }

    /// Extensions of one lower-cell tuple per candidate.
    fn extensions_per_candidate(&self) -> u64 {
        let a = self.ground.size() as u64;
        self.k
            .sizes()
            .iter()
            .zip(self.l.sizes())
            .map(|(&ki, &li)| {
                crate::ground::binomial(a - ki as u64, (li - ki) as u64).unwrap_or(u64::MAX)
            })
            .fold(1u64, |acc, c| acc.saturating_mul(c))
    }

    fn tables(&self) -> Option<Arc<DenseTables>> {
        self.tables
            .get_or_init(|| DenseTables::build(self).map(Arc::new))
            .clone()
    }
}

/// Precomputed cover and extension adjacency between the two cells.
#[derive(Debug)]
struct DenseTables {
    /// For each upper-cell rank, the lower-cell ranks of tuples below it.
    covers: Vec<Vec<u32>>,
    /// For each lower-cell rank, the upper-cell ranks of tuples above it.
    exts: Vec<Vec<u32>>,
}

impl DenseTables {
    fn build(ctx: &OperatorContext) -> Option<DenseTables> {
        let k_cell = ctx.k.cell_size(&ctx.ground).ok()?;
        let l_cell = ctx.l.cell_size(&ctx.ground).ok()?;
        if k_cell > DENSE_CELL_LIMIT || l_cell > DENSE_CELL_LIMIT {
            return None;
        }
        let proj_per_y: u64 = ctx
            .k
            .sizes()
            .iter()
            .zip(ctx.l.sizes())
            .map(|(&ki, &li)| crate::ground::binomial(li as u64, ki as u64).unwrap_or(u64::MAX))
            .fold(1u64, |acc, c| acc.saturating_mul(c));
        if l_cell.saturating_mul(proj_per_y) > DENSE_ADJ_LIMIT {
            return None;
        }
        let mut covers = vec![Vec::new(); l_cell as usize];
        let mut exts = vec![Vec::new(); k_cell as usize];
        for (y_rank, y) in crate::ground::enumerate_cell(&ctx.ground, &ctx.l).enumerate() {
            let per_coord: Vec<Vec<KSubset>> = y
                .parts()
                .iter()
                .zip(ctx.k.sizes())
                .map(|(part, &ki)| {
                    part.elements()
                        .iter()
                        .copied()
                        .combinations(ki as usize)
                        .map(KSubset::from_atoms)
                        .collect()
                })
                .collect();
            for combo in per_coord.into_iter().multi_cartesian_product() {
                let x = SubsetTuple::new(combo).expect("arity preserved");
                let x_rank =
                    crate::ground::rank(&x, &ctx.ground, &ctx.k).expect("projection is in cell");
                covers[y_rank].push(x_rank as u32);
                exts[x_rank as usize].push(y_rank as u32);
            }
        }
        for list in covers.iter_mut().chain(exts.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        Some(DenseTables { covers, exts })
    }
}

fn bitvec_from(fam: &Family, cell: u64) -> Vec<u64> {
    let mut words = vec![0u64; cell.div_ceil(64) as usize];
    for r in fam.ranks() {
        words[(r / 64) as usize] |= 1 << (r % 64);
    }
    words
}

fn bit(words: &[u64], r: u64) -> bool {
    words[(r / 64) as usize] >> (r % 64) & 1 == 1
}

/// All upper-cell extensions of `t`, one coordinate option list per axis.
fn extension_options(
    t: &SubsetTuple,
    ground: &GroundSet,
    l: &CellShape,
) -> Vec<Vec<KSubset>> {
    t.parts()
        .iter()
        .zip(l.sizes())
        .map(|(part, &li)| {
            let free: Vec<Atom> = ground.atoms().filter(|a| !part.contains(*a)).collect();
            let need = li as usize - part.k();
            free.into_iter()
                .combinations(need)
                .map(|extra| part.union(&KSubset::from_atoms(extra)))
                .collect()
        })
        .collect()
}

/// `F(X)`: every upper-cell tuple extending some member of `X`.
/// Monotone in `X`; empty input gives an empty image.
pub fn big_f(x: &Family, ctx: &OperatorContext) -> Result<Family> {
    ctx.check_lower(x)?;
    let mut out = Family::empty(ctx.ground, ctx.l.clone());
    if x.is_empty() {
        return Ok(out);
    }
    if let Some(tables) = ctx.tables() {
        let x_bits = bitvec_from(x, ctx.k.cell_size(&ctx.ground)?);
        for (y_rank, below) in tables.covers.iter().enumerate() {
            if below.iter().any(|&xr| bit(&x_bits, xr as u64)) {
                out.insert_rank(y_rank as u64)?;
            }
        }
        return Ok(out);
    }
    let per = ctx.extensions_per_candidate();
    let cost = per.saturating_mul(x.len() as u64);
    if cost > F_ENUMERATION_LIMIT {
        return Err(Error::SearchSpaceExceeded {
            cost: cost.to_string(),
            limit: F_ENUMERATION_LIMIT.to_string(),
        });
    }
    for member in x.members() {
        for combo in extension_options(&member, &ctx.ground, &ctx.l)
            .into_iter()
            .multi_cartesian_product()
        {
            out.insert(&SubsetTuple::new(combo).expect("arity preserved"))?;
        }
    }
    Ok(out)
}

/// One member of an exclusion-search problem: per coordinate, the atoms of
/// an `X`-member that lie outside the candidate.
type ReducedMember = Vec<Vec<Atom>>;

struct ExclusionSearch<'a> {
    members: &'a [ReducedMember],
    caps: &'a [u32],
    chosen: Vec<Vec<Atom>>,
    nodes: u64,
}

impl ExclusionSearch<'_> {
    fn member_hit(&self, member: &ReducedMember) -> bool {
        member
            .iter()
            .zip(self.chosen.iter())
            .any(|(opts, w)| opts.iter().any(|a| w.contains(a)))
    }

    /// Is there a choice of per-coordinate exclusion sets, within capacity,
    /// meeting every member? Branches on an unhit member with the fewest
    /// options; constraints are monotone, so this is complete.
    fn run(&mut self) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > SEARCH_NODE_BUDGET {
            return Err(Error::SearchSpaceExceeded {
                cost: self.nodes.to_string(),
                limit: SEARCH_NODE_BUDGET.to_string(),
            });
        }
        let mut target: Option<(usize, usize)> = None;
        for (idx, member) in self.members.iter().enumerate() {
            if self.member_hit(member) {
                continue;
            }
            let options: usize = member
                .iter()
                .enumerate()
                .map(|(i, opts)| {
                    if (self.chosen[i].len() as u32) < self.caps[i] {
                        opts.len()
                    } else {
                        0
                    }
                })
                .sum();
            if options == 0 {
                return Ok(false);
            }
            if target.is_none_or(|(_, best)| options < best) {
                target = Some((idx, options));
            }
        }
        let Some((idx, _)) = target else {
            return Ok(true);
        };
        let member = self.members[idx].clone();
        for (i, opts) in member.iter().enumerate() {
            if (self.chosen[i].len() as u32) >= self.caps[i] {
                continue;
            }
            for &w in opts {
                self.chosen[i].push(w);
                let found = self.run()?;
                self.chosen[i].pop();
                if found {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

/// Decides whether some extension of the candidate avoids every member of
/// `X`, without touching the upper cell. Equivalent formulation: per
/// coordinate, pick at most `|A| - l_i` atoms (disjoint from the candidate)
/// to exclude, such that every `X`-member loses an atom on some coordinate.
fn avoiding_extension_exists(
    members: &[SubsetTuple],
    candidate: &SubsetTuple,
    ctx: &OperatorContext,
    memo: &mut HashMap<Vec<ReducedMember>, bool>,
) -> Result<bool> {
    let n = ctx.arity();
    let mut reduced: Vec<ReducedMember> = Vec::with_capacity(members.len());
    for m in members {
        let r: ReducedMember = (0..n)
            .map(|i| m.part(i).difference(candidate.part(i)).elements().to_vec())
            .collect();
        if r.iter().all(|p| p.is_empty()) {
            // the member sits below the candidate: no extension avoids it
            return Ok(false);
        }
        reduced.push(r);
    }
    // drop componentwise supersets; meeting the smaller member meets them too
    reduced.sort();
    reduced.dedup();
    let minimal: Vec<ReducedMember> = reduced
        .iter()
        .filter(|r| {
            !reduced.iter().any(|s| {
                s != *r
                    && s.iter()
                        .zip(r.iter())
                        .all(|(sp, rp)| sp.iter().all(|a| rp.contains(a)))
            })
        })
        .cloned()
        .collect();
    if let Some(&known) = memo.get(&minimal) {
        return Ok(known);
    }
    let caps: Vec<u32> = ctx
        .l
        .sizes()
        .iter()
        .map(|&li| ctx.ground.size() - li)
        .collect();
    let mut search = ExclusionSearch {
        members: &minimal,
        caps: &caps,
        chosen: vec![Vec::new(); n],
        nodes: 0,
    };
    let found = search.run()?;
    memo.insert(minimal, found);
    Ok(found)
}

/// Which G implementation to run. `Auto` picks tables when the upper cell
/// is small, extension scanning at moderate extension counts, and the
/// exclusion search otherwise. The three are interchangeable; fixing one is
/// for cross-checking them against each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GStrategy {
    #[default]
    Auto,
    DenseTables,
    ExtensionScan,
    ExclusionSearch,
}

fn g_dense(x: &Family, ctx: &OperatorContext, tables: &DenseTables) -> Result<Family> {
    let k_cell = ctx.k.cell_size(&ctx.ground)?;
    let l_cell = ctx.l.cell_size(&ctx.ground)?;
    let mut out = Family::empty(ctx.ground, ctx.k.clone());
    let x_bits = bitvec_from(x, k_cell);
    let mut f_bits = vec![0u64; l_cell.div_ceil(64) as usize];
    for (y_rank, below) in tables.covers.iter().enumerate() {
        if below.iter().any(|&xr| bit(&x_bits, xr as u64)) {
            f_bits[y_rank / 64] |= 1 << (y_rank % 64);
        }
    }
    for (x_rank, above) in tables.exts.iter().enumerate() {
        if above.iter().all(|&yr| bit(&f_bits, yr as u64)) {
            out.insert_rank(x_rank as u64)?;
        }
    }
    Ok(out)
}

fn g_scan(x: &Family, ctx: &OperatorContext) -> Result<Family> {
    let members: Vec<SubsetTuple> = x.members().collect();
    let mut out = Family::empty(ctx.ground, ctx.k.clone());
    for candidate in crate::ground::enumerate_cell(&ctx.ground, &ctx.k) {
        let all_covered = extension_options(&candidate, &ctx.ground, &ctx.l)
            .into_iter()
            .multi_cartesian_product()
            .all(|combo| {
                let y = SubsetTuple::new(combo).expect("arity preserved");
                members.iter().any(|a| a.leq(&y).expect("same arity"))
            });
        if all_covered {
            out.insert(&candidate)?;
        }
    }
    Ok(out)
}

fn g_search(x: &Family, ctx: &OperatorContext) -> Result<Family> {
    let members: Vec<SubsetTuple> = x.members().collect();
    let mut out = Family::empty(ctx.ground, ctx.k.clone());
    let mut memo = HashMap::new();
    for candidate in crate::ground::enumerate_cell(&ctx.ground, &ctx.k) {
        if !avoiding_extension_exists(&members, &candidate, ctx, &mut memo)? {
            out.insert(&candidate)?;
        }
    }
    Ok(out)
}

/// `G(X)` under an explicit strategy choice.
pub fn big_g_with(x: &Family, ctx: &OperatorContext, strategy: GStrategy) -> Result<Family> {
    ctx.check_lower(x)?;
    match strategy {
        GStrategy::DenseTables => match ctx.tables() {
            Some(tables) => g_dense(x, ctx, &tables),
            None => Err(Error::SearchSpaceExceeded {
                cost: "cell too large for cover tables".into(),
                limit: DENSE_CELL_LIMIT.to_string(),
            }),
        },
        GStrategy::ExtensionScan => {
            let per = ctx.extensions_per_candidate();
            let k_cell = ctx.k.cell_size(&ctx.ground)?;
            let cost = per.saturating_mul(k_cell);
            if cost > F_ENUMERATION_LIMIT {
                return Err(Error::SearchSpaceExceeded {
                    cost: cost.to_string(),
                    limit: F_ENUMERATION_LIMIT.to_string(),
                });
            }
            g_scan(x, ctx)
        }
        GStrategy::ExclusionSearch => {
            let k_cell = ctx.k.cell_size(&ctx.ground)?;
            if k_cell > DENSE_CELL_LIMIT.saturating_mul(4) {
                return Err(Error::SearchSpaceExceeded {
                    cost: k_cell.to_string(),
                    limit: (DENSE_CELL_LIMIT * 4).to_string(),
                });
            }
            g_search(x, ctx)
        }
        GStrategy::Auto => {
            if let Some(tables) = ctx.tables() {
                return g_dense(x, ctx, &tables);
            }
            let k_cell = ctx.k.cell_size(&ctx.ground)?;
            if k_cell > DENSE_CELL_LIMIT.saturating_mul(4) {
                return Err(Error::SearchSpaceExceeded {
                    cost: k_cell.to_string(),
                    limit: (DENSE_CELL_LIMIT * 4).to_string(),
                });
            }
            if ctx.extensions_per_candidate() <= SCAN_EXT_LIMIT {
                g_scan(x, ctx)
            } else {
                g_search(x, ctx)
            }
        }
    }
}

/// `G(X)`: the lower-cell tuples whose every upper-cell extension lies in
/// `F(X)`. Contains `X` and is idempotent.
pub fn big_g(x: &Family, ctx: &OperatorContext) -> Result<Family> {
    big_g_with(x, ctx, GStrategy::Auto)
}

/// `H(X) = G(X) \ X`.
pub fn big_h(x: &Family, ctx: &OperatorContext) -> Result<Family> {
    Ok(big_g(x, ctx)?.difference(x))
}

/// Applies H `m` times.
pub fn iterate_h(x: &Family, ctx: &OperatorContext, m: usize) -> Result<Family> {
    let mut cur = x.clone();
    for _ in 0..m {
        cur = big_h(&cur, ctx)?;
    }
    Ok(cur)
}

/// The H-iteration record: `H^0(X), H^1(X), ..` until empty, together with
/// the step at which emptiness was reached and the descent bound
/// `k_1 + .. + k_n + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentTrace {
    steps: Vec<Family>,
    bound: usize,
    emptied_at: Option<usize>,
}

impl DescentTrace {
    pub fn steps(&self) -> &[Family] {
        &self.steps
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// Step index of the first empty iterate, if reached within the bound.
    pub fn emptied_at(&self) -> Option<usize> {
        self.emptied_at
    }

    /// True when the descent failed to empty within the bound. Cannot occur
    /// for contexts satisfying the ground precondition.
    pub fn is_counterexample(&self) -> bool {
        self.emptied_at.is_none()
    }
}

/// Iterates H until the empty family, asserting emptiness within
/// `k_1 + .. + k_n + 1` steps. A trace that exceeds the bound is returned
/// flagged as a counterexample rather than silently truncated.
pub fn nilpotency_check(x: &Family, ctx: &OperatorContext) -> Result<DescentTrace> {
    ctx.check_lower(x)?;
    let bound = ctx.k.size_sum() as usize + 1;
    let mut steps = vec![x.clone()];
    let mut emptied_at = None;
    for step in 0..=bound {
        if steps[step].is_empty() {
            emptied_at = Some(step);
            break;
        }
        if step == bound {
            break;
        }
        let next = big_h(&steps[step], ctx)?;
        steps.push(next);
    }
    Ok(DescentTrace {
        steps,
        bound,
        emptied_at,
    })
}

/// Recovers the unique G-fixed family `Y` with `F(Y) = Z`, as the set of
/// lower-cell tuples all of whose extensions lie in `Z`. The result is
/// validated by re-encoding; inputs that are not F-images of G-fixed
/// families are rejected.
pub fn recover_from_image(z: &Family, ctx: &OperatorContext) -> Result<Family> {
    ctx.check_upper(z)?;
    let mut y = Family::empty(ctx.ground, ctx.k.clone());
    if let Some(tables) = ctx.tables() {
        let z_bits = bitvec_from(z, ctx.l.cell_size(&ctx.ground)?);
        for (x_rank, above) in tables.exts.iter().enumerate() {
            if above.iter().all(|&yr| bit(&z_bits, yr as u64)) {
                y.insert_rank(x_rank as u64)?;
            }
        }
    } else {
        let per = ctx.extensions_per_candidate();
        let k_cell = ctx.k.cell_size(&ctx.ground)?;
        let cost = per.saturating_mul(k_cell);
        if cost > F_ENUMERATION_LIMIT {
            return Err(Error::SearchSpaceExceeded {
                cost: cost.to_string(),
                limit: F_ENUMERATION_LIMIT.to_string(),
            });
        }
        for candidate in crate::ground::enumerate_cell(&ctx.ground, &ctx.k) {
            let all_in_z = extension_options(&candidate, &ctx.ground, &ctx.l)
                .into_iter()
                .multi_cartesian_product()
                .all(|combo| z.contains(&SubsetTuple::new(combo).expect("arity preserved")));
            if all_in_z {
                y.insert(&candidate)?;
            }
        }
    }
    if &big_f(&y, ctx)? != z {
        return Err(Error::NotAnFImage);
    }
    Ok(y)
}

/// The formula behind the descent argument: true iff `|x_i| <= k_i` on every
/// coordinate, the two tuples are componentwise disjoint, and every way of
/// topping `x` up to the lower shape using atoms of `y` lands in `X`.
/// An empty completion grid is vacuously true.
pub fn phi_formula_holds(
    x_fam: &Family,
    x: &SubsetTuple,
    y: &SubsetTuple,
    ctx: &OperatorContext,
) -> Result<bool> {
    ctx.check_lower(x_fam)?;
    if x.arity() != ctx.arity() {
        return Err(Error::ArityMismatch {
            left: x.arity(),
            right: ctx.arity(),
        });
    }
    if y.arity() != ctx.arity() {
        return Err(Error::ArityMismatch {
            left: y.arity(),
            right: ctx.arity(),
        });
    }
    for (xi, &ki) in x.parts().iter().zip(ctx.k.sizes()) {
        if xi.k() > ki as usize {
            return Ok(false);
        }
    }
    if !x.meet(y)?.is_all_empty() {
        return Ok(false);
    }
    let options: Vec<Vec<KSubset>> = x
        .parts()
        .iter()
        .zip(y.parts())
        .zip(ctx.k.sizes())
        .map(|((xi, yi), &ki)| {
            yi.elements()
                .iter()
                .copied()
                .combinations(ki as usize - xi.k())
                .map(KSubset::from_atoms)
                .collect()
        })
        .collect();
    for combo in options.into_iter().multi_cartesian_product() {
        let z = SubsetTuple::new(combo).expect("arity preserved");
        let joined = x.join(&z)?;
        if !x_fam.contains(&joined) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(sizes: &[u32]) -> CellShape {
        CellShape::new(sizes.to_vec()).unwrap()
    }

    fn tuple(parts: &[&[Atom]]) -> SubsetTuple {
        SubsetTuple::new(
            parts
                .iter()
                .map(|p| KSubset::new(p.to_vec()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn family(ground: GroundSet, sh: &CellShape, tuples: &[&[&[Atom]]]) -> Family {
        Family::from_tuples(ground, sh.clone(), tuples.iter().map(|t| tuple(t))).unwrap()
    }

    fn ctx_131() -> OperatorContext {
        OperatorContext::new(GroundSet::new(3).unwrap(), shape(&[1]), shape(&[2])).unwrap()
    }

    #[test]
    fn context_validates_shapes_and_ground() {
        let a = GroundSet::new(3).unwrap();
        assert!(matches!(
            OperatorContext::new(a, shape(&[2]), shape(&[1])),
            Err(Error::ShapeNotDominated { coord: 0 })
        ));
        assert!(matches!(
            OperatorContext::new(a, shape(&[1]), shape(&[4])),
            Err(Error::GroundTooSmall {
                required: 4,
                actual: 3
            })
        ));
    }

    #[test]
    fn f_of_empty_is_empty() {
        let ctx = ctx_131();
        let x = Family::empty(*ctx.ground(), shape(&[1]));
        assert!(big_f(&x, &ctx).unwrap().is_empty());
    }

    #[test]
    fn f_extends_singletons() {
        let ctx = ctx_131();
        let x = family(*ctx.ground(), &shape(&[1]), &[&[&[0]]]);
        let fx = big_f(&x, &ctx).unwrap();
        assert_eq!(
            fx,
            family(*ctx.ground(), &shape(&[2]), &[&[&[0, 1]], &[&[0, 2]]])
        );

        let x2 = family(*ctx.ground(), &shape(&[1]), &[&[&[0]], &[&[1]]]);
        let fx2 = big_f(&x2, &ctx).unwrap();
        assert_eq!(fx2.len(), 3);
    }

    #[test]
    fn g_of_empty_is_empty() {
        let ctx = ctx_131();
        let x = Family::empty(*ctx.ground(), shape(&[1]));
        assert!(big_g(&x, &ctx).unwrap().is_empty());
    }

    #[test]
    fn g_closes_two_singletons_over_three_atoms() {
        let ctx = ctx_131();
        let x = family(*ctx.ground(), &shape(&[1]), &[&[&[0]], &[&[1]]]);
        let gx = big_g(&x, &ctx).unwrap();
        assert_eq!(
            gx,
            family(*ctx.ground(), &shape(&[1]), &[&[&[0]], &[&[1]], &[&[2]]])
        );
    }

    #[test]
    fn g_of_full_cell_is_full_cell() {
        let ctx = ctx_131();
        let full = Family::full_cell(*ctx.ground(), shape(&[1])).unwrap();
        assert_eq!(big_g(&full, &ctx).unwrap(), full);
    }

    #[test]
    fn h_chain_from_worked_example() {
        let ctx = ctx_131();
        let full = Family::full_cell(*ctx.ground(), shape(&[1])).unwrap();
        assert!(big_h(&full, &ctx).unwrap().is_empty());

        let x = family(*ctx.ground(), &shape(&[1]), &[&[&[0]], &[&[1]]]);
        let h1 = big_h(&x, &ctx).unwrap();
        assert_eq!(h1, family(*ctx.ground(), &shape(&[1]), &[&[&[2]]]));
        let h2 = big_h(&h1, &ctx).unwrap();
        assert!(h2.is_empty());
    }

    #[test]
    fn descent_trace_of_worked_example() {
        let ctx = ctx_131();
        let x = family(*ctx.ground(), &shape(&[1]), &[&[&[0]], &[&[1]]]);
        let trace = nilpotency_check(&x, &ctx).unwrap();
        assert_eq!(trace.emptied_at(), Some(2));
        assert!(!trace.is_counterexample());
        assert_eq!(trace.steps().len(), 3);
        assert_eq!(trace.bound(), 2);
    }

    #[test]
    fn descent_trace_of_empty_family() {
        let ctx = ctx_131();
        let x = Family::empty(*ctx.ground(), shape(&[1]));
        let trace = nilpotency_check(&x, &ctx).unwrap();
        assert_eq!(trace.emptied_at(), Some(0));
    }

    #[test]
    fn recover_round_trips_the_worked_example() {
        let ctx = ctx_131();
        let z = family(*ctx.ground(), &shape(&[2]), &[&[&[0, 2]], &[&[1, 2]]]);
        let y = recover_from_image(&z, &ctx).unwrap();
        assert_eq!(y, family(*ctx.ground(), &shape(&[1]), &[&[&[2]]]));
        assert_eq!(big_f(&y, &ctx).unwrap(), z);
    }

    #[test]
    fn recover_rejects_non_image() {
        let ctx = ctx_131();
        let z = family(*ctx.ground(), &shape(&[2]), &[&[&[0, 1]]]);
        assert!(matches!(
            recover_from_image(&z, &ctx),
            Err(Error::NotAnFImage)
        ));
    }

    #[test]
    fn recover_of_empty_is_empty() {
        let ctx = ctx_131();
        let z = Family::empty(*ctx.ground(), shape(&[2]));
        assert!(recover_from_image(&z, &ctx).unwrap().is_empty());
    }

    #[test]
    fn phi_formula_examples() {
        let a = GroundSet::new(4).unwrap();
        let ctx = OperatorContext::new(a, shape(&[1]), shape(&[2])).unwrap();
        let x_fam = family(a, &shape(&[1]), &[&[&[0]], &[&[1]]]);
        let bottom = SubsetTuple::empty(1);
        assert!(phi_formula_holds(&x_fam, &bottom, &tuple(&[&[0, 1]]), &ctx).unwrap());
        assert!(!phi_formula_holds(&x_fam, &bottom, &tuple(&[&[0, 2]]), &ctx).unwrap());

        let full = Family::full_cell(a, shape(&[1])).unwrap();
        assert!(phi_formula_holds(&full, &bottom, &tuple(&[&[2, 3]]), &ctx).unwrap());

        let empty = Family::empty(a, shape(&[1]));
        assert!(!phi_formula_holds(&empty, &bottom, &tuple(&[&[2, 3]]), &ctx).unwrap());
    }

    #[test]
    fn phi_formula_requires_disjointness_and_small_parts() {
        let a = GroundSet::new(4).unwrap();
        let ctx = OperatorContext::new(a, shape(&[1]), shape(&[2])).unwrap();
        let x_fam = Family::full_cell(a, shape(&[1])).unwrap();
        // overlapping tuples
        assert!(!phi_formula_holds(&x_fam, &tuple(&[&[0]]), &tuple(&[&[0, 1]]), &ctx).unwrap());
        // |x_1| > k_1
        assert!(!phi_formula_holds(&x_fam, &tuple(&[&[0, 1]]), &tuple(&[&[2]]), &ctx).unwrap());
    }
}
