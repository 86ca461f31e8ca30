//! Exhaustive sweeps for the permutation-model kernels: orbit partition
//! laws over full symmetric groups, parity consistency, pigeonhole
//! totality, preorder laws with chain and counting bounds, and the support
//! contrapositive.

use std::collections::BTreeSet;

use finfam_core::encodings::InjectiveSequence;
use finfam_core::fraenkel::{
    chain_length_bound, class_count, longest_chain, parity, parity_orbits,
    partition_fiber_check, pigeonhole_pair, preorder_leq, support_check, FiniteMap, NestedValue,
    Parity, PermutationOfAtoms,
};
use finfam_core::ground::{Atom, GroundSet, KSubset};
use itertools::Itertools;
use num_bigint::BigUint;

fn ksub(atoms: &[Atom]) -> KSubset {
    KSubset::from_atoms(atoms.iter().copied())
}

fn symmetric_group(atoms: &[Atom]) -> Vec<PermutationOfAtoms> {
    atoms
        .iter()
        .copied()
        .permutations(atoms.len())
        .map(|img| PermutationOfAtoms::from_images(atoms, &img).unwrap())
        .collect()
}

/// Parity by inversion counting, an independent oracle for the
/// cycle-decomposition implementation.
fn parity_by_inversions(atoms: &[Atom], perm: &PermutationOfAtoms) -> Parity {
    let image: Vec<usize> = atoms
        .iter()
        .map(|&a| atoms.iter().position(|&b| b == perm.apply(a)).unwrap())
        .collect();
    let mut inversions = 0u64;
    for i in 0..image.len() {
        for j in i + 1..image.len() {
            if image[i] > image[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        Parity::Even
    } else {
        Parity::Odd
    }
}

#[test]
fn parity_matches_inversion_oracle_up_to_five() {
    for size in 1..=5u32 {
        let atoms: Vec<Atom> = (0..size).collect();
        let domain = ksub(&atoms);
        for perm in symmetric_group(&atoms) {
            assert_eq!(
                parity(&perm, &domain).unwrap(),
                parity_by_inversions(&atoms, &perm),
                "{perm:?}"
            );
        }
    }
}

#[test]
fn orbit_partition_laws_exhaustive() {
    // the partition and swap laws hold exactly when the tuple leaves at
    // most one atom of the domain unused; shorter tuples are fixed by an
    // odd transposition of two unused atoms, collapsing the orbits
    for size in 3..=5u32 {
        let atoms: Vec<Atom> = (0..size).collect();
        let domain = ksub(&atoms);
        let group = symmetric_group(&atoms);
        for len in 1..=size as usize {
            let u = InjectiveSequence::new((0..len as u32).collect()).unwrap();
            let pair = parity_orbits(&u, &domain).unwrap();
            let all: BTreeSet<InjectiveSequence> = atoms
                .iter()
                .copied()
                .permutations(len)
                .map(|entries| InjectiveSequence::new(entries).unwrap())
                .collect();
            let union: BTreeSet<InjectiveSequence> =
                pair.even.union(&pair.odd).cloned().collect();
            assert_eq!(union, all, "size {size} len {len}");

            if len + 1 >= size as usize {
                assert!(pair.even.is_disjoint(&pair.odd), "size {size} len {len}");
                // even permutations fix both sides, odd ones swap them
                for perm in &group {
                    let moved_even: BTreeSet<InjectiveSequence> =
                        pair.even.iter().map(|s| perm.apply_sequence(s)).collect();
                    let moved_odd: BTreeSet<InjectiveSequence> =
                        pair.odd.iter().map(|s| perm.apply_sequence(s)).collect();
                    match parity(perm, &domain).unwrap() {
                        Parity::Even => {
                            assert_eq!(moved_even, pair.even);
                            assert_eq!(moved_odd, pair.odd);
                        }
                        Parity::Odd => {
                            assert_eq!(moved_even, pair.odd);
                            assert_eq!(moved_odd, pair.even);
                        }
                    }
                }
            } else {
                assert_eq!(pair.even, all, "size {size} len {len}");
                assert_eq!(pair.odd, all, "size {size} len {len}");
            }
        }
    }
}

#[test]
fn pigeonhole_total_n1_over_seven_atoms() {
    // every 1-tuple with part over {0..6} and every 3-atom pool
    for mask in 0..128u32 {
        let t = vec![KSubset::from_atoms((0..7).filter(|a| mask >> a & 1 == 1))];
        for pool_atoms in (0..7u32).combinations(3) {
            let pool = ksub(&pool_atoms);
            let (a, b) = pigeonhole_pair(&t, &pool).unwrap();
            assert!(a < b);
            let tau = PermutationOfAtoms::transposition(a, b);
            assert_eq!(tau.apply_set(&t[0]), t[0]);
        }
    }
}

#[test]
fn pigeonhole_total_n2_at_threshold() {
    // pairs of subsets of {0..5}, pool = {0..4} (2^n + 1 = 5 atoms)
    let pool = ksub(&[0, 1, 2, 3, 4]);
    for m1 in 0..64u32 {
        for m2 in 0..64u32 {
            let t = vec![
                KSubset::from_atoms((0..6).filter(|a| m1 >> a & 1 == 1)),
                KSubset::from_atoms((0..6).filter(|a| m2 >> a & 1 == 1)),
            ];
            let (a, b) = pigeonhole_pair(&t, &pool).unwrap();
            let tau = PermutationOfAtoms::transposition(a, b);
            for part in &t {
                assert_eq!(&tau.apply_set(part), part);
            }
        }
    }
}

fn all_tuples(ground: u32, n: u32) -> Vec<Vec<KSubset>> {
    (0..n)
        .map(|_| {
            (0..1u32 << ground)
                .map(|mask| KSubset::from_atoms((0..ground).filter(|a| mask >> a & 1 == 1)))
                .collect::<Vec<_>>()
        })
        .multi_cartesian_product()
        .collect()
}

#[test]
fn preorder_is_reflexive_and_transitive() {
    let cases = [(4u32, 1u32), (3, 2)];
    for (a, n) in cases {
        let ground = GroundSet::new(a).unwrap();
        let none = ksub(&[]);
        let tuples = all_tuples(a, n);
        for t in &tuples {
            assert!(preorder_leq(t, t, &ground, &none).unwrap());
            let classes = class_count(t, &ground, &none);
            assert!(classes >= 1 && classes <= 1 << n);
        }
        for t in &tuples {
            for u in &tuples {
                if !preorder_leq(t, u, &ground, &none).unwrap() {
                    continue;
                }
                for v in &tuples {
                    if preorder_leq(u, v, &ground, &none).unwrap() {
                        assert!(preorder_leq(t, v, &ground, &none).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn chains_stay_under_the_bound() {
    let cases = [(4u32, 1u32, 0u64), (3, 1, 0), (3, 2, 0), (2, 2, 0)];
    for (a, n, b) in cases {
        let ground = GroundSet::new(a).unwrap();
        let longest = longest_chain(&ground, &ksub(&[]), n).unwrap();
        assert!(
            BigUint::from(longest) < chain_length_bound(b, n),
            "|A|={a} n={n}: chain {longest} vs bound {}",
            chain_length_bound(b, n)
        );
    }
}

#[test]
fn chain_search_with_nonempty_support() {
    let ground = GroundSet::new(4).unwrap();
    let excluded = ksub(&[0]);
    let longest = longest_chain(&ground, &excluded, 1).unwrap();
    assert!(BigUint::from(longest) < chain_length_bound(1, 1));
}

#[test]
fn fiber_bound_holds_exhaustively() {
    let cases = [(2u32, 1u32), (3, 1), (4, 1), (2, 2), (3, 2)];
    for (a, n) in cases {
        let ground = GroundSet::new(a).unwrap();
        let report = partition_fiber_check(&ground, &ksub(&[]), n).unwrap();
        assert!(report.holds, "|A|={a} n={n}: {report:?}");
    }
    // with a nonempty excluded support
    let ground = GroundSet::new(4).unwrap();
    let report = partition_fiber_check(&ground, &ksub(&[1]), 1).unwrap();
    assert!(report.holds);
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

#[test]
fn supported_maps_satisfy_the_claim_consequence() {
    // for f supported by B: whenever a ~ b under u (a, b outside B), the
    // transposition (a b) fixes u and therefore fixes f(u)
    let ground = GroundSet::new(5).unwrap();
    let support = ksub(&[3]);
    let f = subset_map(&ground, |s| s.union(&ksub(&[3])));
    assert!(support_check(&f, &support, &ground).unwrap());

    for mask in 0..32u32 {
        let u = KSubset::from_atoms((0..5).filter(|a| mask >> a & 1 == 1));
        let u_t = [u.clone()];
        let pool: Vec<Atom> = (0..5).filter(|a| !support.contains(*a)).collect();
        for (i, &a) in pool.iter().enumerate() {
            for &b in &pool[i + 1..] {
                let same_class = u.contains(a) == u.contains(b);
                if !same_class {
                    continue;
                }
                let tau = PermutationOfAtoms::transposition(a, b);
                // the transposition fixes u
                assert_eq!(tau.apply_set(&u_t[0]), u_t[0]);
                // and fixes f(u)
                let fu = f.get(&NestedValue::from_atom_set(&u)).unwrap();
                assert_eq!(&fu.apply(&tau), fu);
            }
        }
    }
}

#[test]
fn unsupported_map_is_detected_through_a_moved_image() {
    // the contrapositive: u = {} has 3 ~ 4 in every component (there are
    // none), the transposition fixes u, but moves f(u) = {3}; the support
    // check at the empty support must therefore fail
    let ground = GroundSet::new(5).unwrap();
    let f = subset_map(&ground, |s| s.union(&ksub(&[3])));
    let tau = PermutationOfAtoms::transposition(3, 4);
    let fu = f.get(&NestedValue::from_atom_set(&ksub(&[]))).unwrap();
    assert_ne!(&fu.apply(&tau), fu);
    assert!(!support_check(&f, &ksub(&[]), &ground).unwrap());
}

#[test]
fn equivariant_map_has_empty_support() {
    let ground = GroundSet::new(4).unwrap();
    let f = subset_map(&ground, |s| s.clone());
    assert!(support_check(&f, &ksub(&[]), &ground).unwrap());
    // complementation is also equivariant
    let full: Vec<Atom> = (0..4).collect();
    let g = subset_map(&ground, |s| ksub(&full).difference(s));
    assert!(support_check(&g, &ksub(&[]), &ground).unwrap());
}
