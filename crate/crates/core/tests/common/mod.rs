#![allow(dead_code)]

//! Naive reference implementations used as oracles. These recompute the
//! operators directly from their definitions with plain set manipulation,
//! independently of the library's ranking, tables, and search strategies.

use std::collections::BTreeSet;

use finfam_core::ground::{Atom, CellShape, Family, GroundSet, KSubset, SubsetTuple};
use itertools::Itertools;

pub type TupleSet = BTreeSet<SubsetTuple>;

/// Every tuple of the cell, by direct nested combination enumeration.
pub fn oracle_cell(ground_size: u32, shape: &[u32]) -> Vec<SubsetTuple> {
    shape
        .iter()
        .map(|&k| {
            (0..ground_size)
                .combinations(k as usize)
                .map(KSubset::from_atoms)
                .collect::<Vec<_>>()
        })
        .multi_cartesian_product()
        .map(|parts| SubsetTuple::new(parts).unwrap())
        .collect()
}

fn leq(x: &SubsetTuple, y: &SubsetTuple) -> bool {
    x.parts()
        .iter()
        .zip(y.parts())
        .all(|(a, b)| a.iter().all(|atom| b.contains(atom)))
}

pub fn oracle_f(x: &TupleSet, ground_size: u32, l: &[u32]) -> TupleSet {
    oracle_cell(ground_size, l)
        .into_iter()
        .filter(|y| x.iter().any(|a| leq(a, y)))
        .collect()
}

pub fn oracle_g(x: &TupleSet, ground_size: u32, k: &[u32], l: &[u32]) -> TupleSet {
    let f = oracle_f(x, ground_size, l);
    oracle_cell(ground_size, k)
        .into_iter()
        .filter(|cand| {
            oracle_cell(ground_size, l)
                .into_iter()
                .filter(|y| leq(cand, y))
                .all(|y| f.contains(&y))
        })
        .collect()
}

pub fn oracle_h(x: &TupleSet, ground_size: u32, k: &[u32], l: &[u32]) -> TupleSet {
    oracle_g(x, ground_size, k, l)
        .difference(x)
        .cloned()
        .collect()
}

pub fn family_to_set(family: &Family) -> TupleSet {
    family.members().collect()
}

pub fn set_to_family(set: &TupleSet, ground: GroundSet, shape: &[u32]) -> Family {
    Family::from_tuples(
        ground,
        CellShape::new(shape.to_vec()).unwrap(),
        set.iter().cloned(),
    )
    .unwrap()
}

/// All families over a cell of at most 64 tuples, as rank masks.
pub fn all_families(ground: GroundSet, shape: &[u32]) -> impl Iterator<Item = Family> {
    let cell_shape = CellShape::new(shape.to_vec()).unwrap();
    let size = cell_shape.cell_size(&ground).unwrap();
    assert!(size <= 63, "mask sweep needs a cell of at most 63 tuples");
    (0..1u64 << size).map(move |mask| Family::from_rank_mask(ground, cell_shape.clone(), mask).unwrap())
}

pub fn tuple(parts: &[&[Atom]]) -> SubsetTuple {
    SubsetTuple::new(parts.iter().map(|p| KSubset::from_atoms(p.iter().copied())).collect())
        .unwrap()
}
