//! Order-theoretic laws for the tuple ordering and enumeration/ranking
//! invariants.

mod common;

use std::collections::HashSet;

use common::*;
use finfam_core::ground::{
    enumerate_cell, rank, unrank, CellShape, GroundSet, SubsetTuple,
};
use proptest::prelude::*;

fn all_tuples(ground: u32, n: usize) -> Vec<SubsetTuple> {
    let subsets: Vec<Vec<u32>> = (0..1u32 << ground)
        .map(|mask| (0..ground).filter(|a| mask >> a & 1 == 1).collect())
        .collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; n];
    loop {
        let parts: Vec<&[u32]> = pick.iter().map(|&i| subsets[i].as_slice()).collect();
        out.push(tuple(&parts));
        let mut pos = n;
        let mut advanced = false;
        while pos > 0 {
            pos -= 1;
            pick[pos] += 1;
            if pick[pos] < subsets.len() {
                advanced = true;
                break;
            }
            pick[pos] = 0;
        }
        if !advanced {
            return out;
        }
    }
}

#[test]
fn ordering_is_a_partial_order_with_lattice_bounds() {
    for (ground, n) in [(4u32, 1usize), (3, 2)] {
        let tuples = all_tuples(ground, n);
        for x in &tuples {
            assert!(x.leq(x).unwrap());
        }
        for x in &tuples {
            for y in &tuples {
                let xy = x.leq(y).unwrap();
                let yx = y.leq(x).unwrap();
                if xy && yx {
                    assert_eq!(x, y);
                }
                let join = x.join(y).unwrap();
                let meet = x.meet(y).unwrap();
                assert!(x.leq(&join).unwrap() && y.leq(&join).unwrap());
                assert!(meet.leq(x).unwrap() && meet.leq(y).unwrap());
                for z in &tuples {
                    if x.leq(z).unwrap() && y.leq(z).unwrap() {
                        assert!(join.leq(z).unwrap(), "join not least: {x} {y} {z}");
                    }
                    if z.leq(x).unwrap() && z.leq(y).unwrap() {
                        assert!(z.leq(&meet).unwrap(), "meet not greatest: {x} {y} {z}");
                    }
                    if x.leq(y).unwrap() && y.leq(z).unwrap() {
                        assert!(x.leq(z).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn lattice_pairwise_laws_at_four_atoms_n2() {
    let tuples = all_tuples(4, 2);
    for x in &tuples {
        for y in &tuples {
            let join = x.join(y).unwrap();
            let meet = x.meet(y).unwrap();
            assert!(meet.leq(&join).unwrap());
            assert_eq!(x.join(x).unwrap(), *x);
            assert_eq!(x.meet(x).unwrap(), *x);
            assert_eq!(join.meet(x).unwrap(), *x);
            assert_eq!(meet.join(x).unwrap(), *x);
        }
    }
}

#[test]
fn lattice_bounds_at_four_atoms_n2() {
    // join is least and meet is greatest over all 256^3 triples, with the
    // quantified part done on bitmask pairs for speed
    let tuples = all_tuples(4, 2);
    let masks: Vec<(u32, u32)> = tuples
        .iter()
        .map(|t| {
            let m = |p: usize| {
                t.part(p)
                    .iter()
                    .fold(0u32, |acc, a| acc | 1 << a)
            };
            (m(0), m(1))
        })
        .collect();
    for (i, x) in masks.iter().enumerate() {
        for (j, y) in masks.iter().enumerate() {
            let join = (x.0 | y.0, x.1 | y.1);
            let meet = (x.0 & y.0, x.1 & y.1);
            for z in &masks {
                let le = |a: &(u32, u32), b: &(u32, u32)| a.0 & !b.0 == 0 && a.1 & !b.1 == 0;
                if le(x, z) && le(y, z) {
                    assert!(le(&join, z), "join not least at {i},{j}");
                }
                if le(z, x) && le(z, y) {
                    assert!(le(z, &meet), "meet not greatest at {i},{j}");
                }
            }
            // the bitmask join/meet agree with the tuple operations
            let t_join = tuples[i].join(&tuples[j]).unwrap();
            let tm = |p: usize| {
                t_join
                    .part(p)
                    .iter()
                    .fold(0u32, |acc, a| acc | 1 << a)
            };
            assert_eq!((tm(0), tm(1)), join);
        }
    }
}

#[test]
fn enumeration_counts_match_cell_sizes() {
    let cases: &[(u32, &[u32])] = &[
        (12, &[3, 2]),
        (16, &[3]),
        (10, &[5]),
        (14, &[4, 2]),
        (6, &[1, 1, 2]),
        (9, &[0, 2]),
    ];
    for &(ground_size, shape) in cases {
        let ground = GroundSet::new(ground_size).unwrap();
        let cell = CellShape::new(shape.to_vec()).unwrap();
        let expected = cell.cell_size(&ground).unwrap();
        let mut seen = HashSet::new();
        let mut count = 0u64;
        for t in enumerate_cell(&ground, &cell) {
            assert!(t.in_cell(&ground, &cell));
            assert!(seen.insert(t), "duplicate tuple");
            count += 1;
        }
        assert_eq!(count, expected, "at |A|={ground_size} shape {shape:?}");
    }
}

proptest! {
    #[test]
    fn rank_unrank_inverse(
        ground_size in 1u32..12,
        shape in proptest::collection::vec(0u32..5, 1..4),
        seed in any::<u64>(),
    ) {
        let ground = GroundSet::new(ground_size).unwrap();
        let cell = CellShape::new(shape).unwrap();
        let size = cell.cell_size(&ground).unwrap();
        prop_assume!(size > 0);
        let r = seed % size;
        let t = unrank(r, &ground, &cell).unwrap();
        prop_assert!(t.in_cell(&ground, &cell));
        prop_assert_eq!(rank(&t, &ground, &cell).unwrap(), r);
    }

    #[test]
    fn rank_order_is_enumeration_order(
        ground_size in 1u32..8,
        shape in proptest::collection::vec(0u32..4, 1..3),
    ) {
        let ground = GroundSet::new(ground_size).unwrap();
        let cell = CellShape::new(shape).unwrap();
        for (position, t) in enumerate_cell(&ground, &cell).enumerate().take(200) {
            prop_assert_eq!(rank(&t, &ground, &cell).unwrap(), position as u64);
        }
    }
}
