//! Product Ramsey search: monochromatic-subgrid witness extraction for a
//! given coloring, and brute-force exact threshold computation at tiny
//! parameters.
//!
//! A grid coloring assigns one of `c` colors to every point of
//! `[S_1]^{j_1} x .. x [S_n]^{j_n}`. A witness for radius `r` is a tuple of
//! r-subsets `T_i` of the `S_i` whose product grid is monochromatic.
//!
//! The exact threshold for `(j, c, r)` is the least ground size `N` such
//! that every c-coloring of the grid over `S_i = {0..N-1}` admits a
//! witness. It is found by escalating `N` and searching for an escaping
//! coloring with a depth-first enumeration that prunes every prefix already
//! containing a fully-colored monochromatic subgrid; the search is
//! exhaustive over colorings and returns the counter-least escaping one.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::ground::{binomial, Atom, KSubset};

/// A total coloring of a product subset grid.
#[derive(Debug, Clone)]
pub struct GridColoring {
    domains: Vec<Vec<Atom>>,
    subset_sizes: Vec<u32>,
    color_count: u32,
    colors: Vec<u8>,
}

/// Colex rank of sorted positions.
fn colex_rank_positions(positions: &[usize]) -> u64 {
    positions
        .iter()
        .enumerate()
        .map(|(t, &p)| binomial(p as u64, t as u64 + 1).expect("desk-scale binomial"))
        .sum()
}

/// Rank of a grid point: per-coordinate colex over domain positions,
/// combined mixed-radix with the first coordinate most significant.
fn grid_rank(domains: &[Vec<Atom>], subset_sizes: &[u32], point: &[KSubset]) -> Result<u64> {
    let mut rank: u64 = 0;
    for ((part, domain), &j) in point.iter().zip(domains).zip(subset_sizes) {
        if part.k() != j as usize {
            return Err(Error::Parameter(format!(
                "grid point part {part} does not have size {j}"
            )));
        }
        let positions = part
            .iter()
            .map(|a| {
                domain
                    .binary_search(&a)
                    .map_err(|_| Error::Parameter(format!("atom {a} not in domain")))
            })
            .collect::<Result<Vec<usize>>>()?;
        let radix = binomial(domain.len() as u64, j as u64).expect("desk-scale binomial");
        rank = rank * radix + colex_rank_positions(&positions);
    }
    Ok(rank)
}

impl GridColoring {
    fn grid_size(domains: &[Vec<Atom>], subset_sizes: &[u32]) -> u64 {
        domains
            .iter()
            .zip(subset_sizes)
            .map(|(s, &j)| binomial(s.len() as u64, j as u64).expect("desk-scale binomial"))
            .product()
    }

    /// Builds a coloring by evaluating `f` on every grid point, in rank
    /// order. `f` must return a color in `1..=color_count`.
    pub fn from_fn(
        domains: Vec<Vec<Atom>>,
        subset_sizes: Vec<u32>,
        color_count: u32,
        mut f: impl FnMut(&[KSubset]) -> u32,
    ) -> Result<Self> {
        if color_count == 0 || color_count > 255 {
            return Err(Error::Parameter("color count must be in 1..=255".into()));
        }
        if domains.len() != subset_sizes.len() || domains.is_empty() {
            return Err(Error::Parameter(
                "domains and subset sizes must have equal nonzero arity".into(),
            ));
        }
        let mut domains = domains;
        for d in &mut domains {
            d.sort_unstable();
            d.dedup();
        }
        let size = Self::grid_size(&domains, &subset_sizes);
        let per_coord: Vec<Vec<KSubset>> = domains
            .iter()
            .zip(&subset_sizes)
            .map(|(d, &j)| {
                d.iter()
                    .copied()
                    .combinations(j as usize)
                    .map(KSubset::from_atoms)
                    .collect()
            })
            .collect();
        let mut colors = vec![0u8; size as usize];
        if per_coord.iter().all(|c| !c.is_empty()) {
            for point in per_coord.iter().multi_cartesian_product() {
                let point: Vec<KSubset> = point.into_iter().cloned().collect();
                let color = f(&point);
                if color == 0 || color > color_count {
                    return Err(Error::Parameter(format!(
                        "color {color} outside 1..={color_count}"
                    )));
                }
                let rank = grid_rank(&domains, &subset_sizes, &point)?;
                colors[rank as usize] = (color - 1) as u8;
            }
        }
        Ok(GridColoring {
            domains,
            subset_sizes,
            color_count,
            colors,
        })
    }

    /// Normalizes a cover `Y_1 u .. u Y_c` of the grid into a coloring by
    /// least containing index. Errors if some grid point is uncovered.
    pub fn from_cover(
        domains: Vec<Vec<Atom>>,
        subset_sizes: Vec<u32>,
        classes: &[Vec<Vec<KSubset>>],
    ) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::Parameter("cover needs at least one class".into()));
        }
        let mut missing = None;
        let coloring = Self::from_fn(
            domains,
            subset_sizes,
            classes.len() as u32,
            |point: &[KSubset]| {
                for (d, class) in classes.iter().enumerate() {
                    if class.iter().any(|member| member.as_slice() == point) {
                        return d as u32 + 1;
                    }
                }
                missing = Some(point.to_vec());
                1
            },
        )?;
        if let Some(point) = missing {
            return Err(Error::Parameter(format!(
                "cover misses grid point {point:?}"
            )));
        }
        Ok(coloring)
    }

    pub fn arity(&self) -> usize {
        self.domains.len()
    }

    pub fn domains(&self) -> &[Vec<Atom>] {
        &self.domains
    }

    pub fn subset_sizes(&self) -> &[u32] {
        &self.subset_sizes
    }

    pub fn color_count(&self) -> u32 {
        self.color_count
    }

    /// Color of a grid point given as per-coordinate subsets of the domains.
    pub fn color_of(&self, point: &[KSubset]) -> Result<u32> {
        if point.len() != self.arity() {
            return Err(Error::ArityMismatch {
                left: point.len(),
                right: self.arity(),
            });
        }
        let rank = grid_rank(&self.domains, &self.subset_sizes, point)?;
        Ok(self.colors[rank as usize] as u32 + 1)
    }
}

/// A monochromatic subgrid: per-coordinate r-subsets and the color.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridWitness {
    pub parts: Vec<KSubset>,
    pub color: u32,
}

/// Finds the lexicographically least `(T, d)` such that the product grid
/// over the `T_i` is monochromatic in color `d`, or `None`. Requires
/// `r >= j_i` on every coordinate so subgrids are nonempty.
pub fn find_monochromatic_grid(coloring: &GridColoring, r: u32) -> Result<Option<GridWitness>> {
    for &j in coloring.subset_sizes() {
        if r < j {
            return Err(Error::Parameter(format!(
                "radius {r} is below subset size {j}; subgrids would be empty"
            )));
        }
    }
    let t_options: Vec<Vec<Vec<Atom>>> = coloring
        .domains
        .iter()
        .map(|d| d.iter().copied().combinations(r as usize).collect())
        .collect();
    if t_options.iter().any(|o| o.is_empty()) {
        return Ok(None);
    }
    for t_combo in t_options.iter().multi_cartesian_product() {
        let inner: Vec<Vec<KSubset>> = t_combo
            .iter()
            .zip(coloring.subset_sizes())
            .map(|(t, &j)| {
                t.iter()
                    .copied()
                    .combinations(j as usize)
                    .map(KSubset::from_atoms)
                    .collect()
            })
            .collect();
        let mut mono: Option<u32> = None;
        let mut uniform = true;
        for point in inner.iter().multi_cartesian_product() {
            let point: Vec<KSubset> = point.into_iter().cloned().collect();
            let d = coloring.color_of(&point)?;
            match mono {
                None => mono = Some(d),
                Some(prev) if prev != d => {
                    uniform = false;
                    break;
                }
                _ => {}
            }
        }
        if uniform {
            if let Some(d) = mono {
                return Ok(Some(GridWitness {
                    parts: t_combo
                        .into_iter()
                        .map(|t| KSubset::from_atoms(t.iter().copied()))
                        .collect(),
                    color: d,
                }));
            }
        }
    }
    Ok(None)
}

/// Result of the exact threshold computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RamseyExact {
    Exact(u32),
    /// Every ground size below `at_least` was verified insufficient; the
    /// next one exceeded the search budget.
    Unknown { at_least: u32 },
}

/// Precomputed subgrid structure over `{0..ground-1}`: every witness
/// candidate's grid-point ranks, and an inverted index from points to the
/// candidates containing them.
struct EscapeMeta {
    grid_size: usize,
    t_grids: Vec<Vec<u32>>,
    by_point: Vec<Vec<u32>>,
}

impl EscapeMeta {
    fn build(ground: u32, j: &[u32], r: u32) -> EscapeMeta {
        let n = j.len();
        let radices: Vec<u64> = j
            .iter()
            .map(|&ji| binomial(ground as u64, ji as u64).expect("desk-scale binomial"))
            .collect();
        let grid_size = radices.iter().product::<u64>() as usize;
        let mut t_grids = Vec::new();
        let t_options: Vec<Vec<Vec<usize>>> = (0..n)
            .map(|_| (0..ground as usize).combinations(r as usize).collect())
            .collect();
        if t_options.iter().all(|o| !o.is_empty()) {
            for t_combo in t_options.iter().multi_cartesian_product() {
                let inner: Vec<Vec<Vec<usize>>> = t_combo
                    .iter()
                    .zip(j)
                    .map(|(t, &ji)| t.iter().copied().combinations(ji as usize).collect())
                    .collect();
                let mut ranks = Vec::new();
                for point in inner.iter().multi_cartesian_product() {
                    let mut rank = 0u64;
                    for (coord, positions) in point.iter().enumerate() {
                        rank = rank * radices[coord] + colex_rank_positions(positions);
                    }
                    ranks.push(rank as u32);
                }
                ranks.sort_unstable();
                ranks.dedup();
                t_grids.push(ranks);
            }
        }
        let mut by_point = vec![Vec::new(); grid_size];
        for (t_idx, ranks) in t_grids.iter().enumerate() {
            for &p in ranks {
                by_point[p as usize].push(t_idx as u32);
            }
        }
        EscapeMeta {
            grid_size,
            t_grids,
            by_point,
        }
    }

    /// True when assigning `point` completed some monochromatic subgrid
    /// within the prefix `colors[0..=point]`.
    fn completes_witness(&self, colors: &[u8], point: usize) -> bool {
        let d = colors[point];
        'outer: for &t_idx in &self.by_point[point] {
            for &p in &self.t_grids[t_idx as usize] {
                if p as usize > point || colors[p as usize] != d {
                    continue 'outer;
                }
            }
            return true;
        }
        false
    }
}

/// Finds the counter-least escaping coloring (no witness) of the grid over
/// `{0..ground-1}`, or `None` if every coloring has a witness. Exhaustive:
/// subtrees whose prefix already contains a monochromatic subgrid are
/// pruned because every completion keeps the witness.
fn find_escaping_coloring(ground: u32, j: &[u32], c: u32, r: u32) -> Option<Vec<u8>> {
    let meta = EscapeMeta::build(ground, j, r);
    if meta.t_grids.is_empty() {
        // no witness candidates exist at all: any coloring escapes
        return Some(vec![0; meta.grid_size]);
    }
    fn dfs(meta: &EscapeMeta, colors: &mut Vec<u8>, depth: usize, c: u32) -> bool {
        if depth == meta.grid_size {
            return true;
        }
        for color in 0..c as u8 {
            colors[depth] = color;
            if !meta.completes_witness(colors, depth) && dfs(meta, colors, depth + 1, c) {
                return true;
            }
        }
        false
    }
    let mut colors = vec![0u8; meta.grid_size];
    if dfs(&meta, &mut colors, 0, c) {
        Some(colors)
    } else {
        None
    }
}

/// Default log2 cap on the per-ground-size coloring space.
const DEFAULT_MAX_COLORINGS_LOG2: f64 = 28.0;

/// Least ground size `N <= search_limit` such that every c-coloring of the
/// `j`-grid over `{0..N-1}` admits an r-witness, by brute force. Ground
/// sizes are checked in increasing order; when the limit is reached the
/// verified lower knowledge is reported instead.
pub fn ramsey_exact(j: &[u32], c: u32, r: u32, search_limit: u32) -> Result<RamseyExact> {
    ramsey_exact_with(j, c, r, search_limit, DEFAULT_MAX_COLORINGS_LOG2)
}

/// As [`ramsey_exact`] with an explicit log2 cap on the coloring space per
/// candidate ground size.
pub fn ramsey_exact_with(
    j: &[u32],
    c: u32,
    r: u32,
    search_limit: u32,
    max_colorings_log2: f64,
) -> Result<RamseyExact> {
    if j.is_empty() {
        return Err(Error::Parameter("subset sizes must be nonempty".into()));
    }
    if c == 0 || c > 255 {
        return Err(Error::Parameter("color count must be in 1..=255".into()));
    }
    for &ji in j {
        if r < ji {
            return Err(Error::Parameter(format!(
                "radius {r} is below subset size {ji}; subgrids would be empty"
            )));
        }
    }
    for ground in 0..=search_limit {
        let grid: u64 = j
            .iter()
            .map(|&ji| binomial(ground as u64, ji as u64).ok_or(Error::CellTooLarge))
            .product::<Result<u64>>()?;
        let cost_log2 = grid as f64 * (c as f64).log2();
        if cost_log2 > max_colorings_log2 {
            return Err(Error::SearchSpaceExceeded {
                cost: format!("2^{cost_log2:.1} colorings at ground size {ground}"),
                limit: format!("2^{max_colorings_log2:.0} colorings"),
            });
        }
        if find_escaping_coloring(ground, j, c, r).is_none() {
            return Ok(RamseyExact::Exact(ground));
        }
    }
    Ok(RamseyExact::Unknown {
        at_least: search_limit + 1,
    })
}
