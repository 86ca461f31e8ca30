//! Codec sweeps: exhaustive agreement of the encoder with a definitional
//! oracle, round-trips and injectivity over all small mixed families, and
//! seeded higher-arity round-trips through the slice form.

mod common;

use std::collections::BTreeSet;

use common::*;
use finfam_core::ground::{GroundSet, KSubset, SubsetTuple};
use finfam_core::phi::{
    phi_decode, phi_decode_slices, phi_encode, phi_encode_slices, schedule_compact,
    schedule_paper, MixedFamily, SizeSchedule,
};
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Direct evaluation of the encoder's definition for n=1, max cell 1,
/// compact sizes (cell [0]: stage size 2; cell [1]: stage sizes 3, 4;
/// completion shapes [2] and [4]), using only the naive oracles.
fn oracle_members(x0: &TupleSet, x1: &TupleSet, ground: u32) -> BTreeSet<Vec<KSubset>> {
    let mut out = BTreeSet::new();
    let mut emit = |z: &TupleSet| {
        for t in z {
            out.insert(t.parts().to_vec());
        }
    };
    // cell [0], single stage m=0
    let y = oracle_g(x0, ground, &[0], &[2]);
    emit(&oracle_f(&y, ground, &[2]));
    // cell [1], stages m=0 (extend to 3) and m=1 (extend to 4)
    let y0 = oracle_g(x1, ground, &[1], &[4]);
    emit(&oracle_f(&y0, ground, &[3]));
    let h1: TupleSet = y0.difference(x1).cloned().collect();
    let y1 = oracle_g(&h1, ground, &[1], &[4]);
    emit(&oracle_f(&y1, ground, &[4]));
    out
}

#[test]
fn encoder_matches_oracle_and_round_trips_exhaustively() {
    // all 2^9 mixed families over cells [0] and [1] at |A| = 8
    let schedule = schedule_compact(1, 1).unwrap();
    let ground = GroundSet::new(8).unwrap();
    let mut seen_codes: BTreeSet<BTreeSet<Vec<KSubset>>> = BTreeSet::new();
    for mask in 0..512u32 {
        let mut x = MixedFamily::new(ground, 1).unwrap();
        if mask & 256 != 0 {
            x.insert_tuple(&tuple(&[&[]])).unwrap();
        }
        let mut x1: TupleSet = BTreeSet::new();
        for a in 0..8 {
            if mask >> a & 1 == 1 {
                let t = tuple(&[&[a]]);
                x.insert_tuple(&t).unwrap();
                x1.insert(t);
            }
        }
        let x0: TupleSet = if mask & 256 != 0 {
            [tuple(&[&[]])].into_iter().collect()
        } else {
            BTreeSet::new()
        };

        let coded = phi_encode(&x, &schedule).unwrap();
        let got: BTreeSet<Vec<KSubset>> = coded
            .members()
            .map(|m| m.parts().to_vec())
            .collect();
        assert_eq!(got, oracle_members(&x0, &x1, 8), "mask {mask}");

        assert_eq!(phi_decode(&coded, &schedule).unwrap(), x, "mask {mask}");
        assert!(seen_codes.insert(got), "coded sets collide at mask {mask}");
    }
    assert_eq!(seen_codes.len(), 512);
}

fn random_mixed_family(
    rng: &mut ChaCha8Rng,
    ground: GroundSet,
    support: u32,
    density: f64,
) -> MixedFamily {
    let mut x = MixedFamily::new(ground, 2).unwrap();
    let singles: Vec<Vec<u32>> = (0..support).map(|a| vec![a]).collect();
    let mut parts_pool: Vec<Vec<u32>> = vec![vec![]];
    parts_pool.extend(singles);
    for left in &parts_pool {
        for right in &parts_pool {
            if rng.gen_bool(density) {
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

#[test]
fn random_n2_round_trips_through_slices() {
    let schedule = schedule_compact(2, 1).unwrap();
    let required = finfam_core::phi::required_ground_size(&schedule);
    assert_eq!(required, 33);
    let ground = GroundSet::new(33).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for trip in 0..40 {
        let support = if trip % 2 == 0 { 6 } else { 12 };
        let x = random_mixed_family(&mut rng, ground, support, 0.35);
        let slices = phi_encode_slices(&x, &schedule).unwrap();
        let back = phi_decode_slices(&slices, &schedule).unwrap();
        assert_eq!(back, x, "trip {trip}");
    }
}

#[test]
fn slice_decode_detects_tampering() {
    let schedule = schedule_compact(1, 1).unwrap();
    let ground = GroundSet::new(8).unwrap();
    let mut x = MixedFamily::new(ground, 1).unwrap();
    for a in 0..5 {
        x.insert_tuple(&tuple(&[&[a]])).unwrap();
    }
    let slices = phi_encode_slices(&x, &schedule).unwrap();
    // decoding with a mismatched schedule is refused
    let other = schedule_compact(1, 2).unwrap();
    assert!(phi_decode_slices(&slices, &other).is_err());
}

#[test]
fn paper_schedule_n2_matches_independent_prime_table() {
    // 2^k1 3^k2 5^m 7^i recomputed from a hardcoded prime table
    let schedule = schedule_paper(2, 2).unwrap();
    let primes: [u64; 4] = [2, 3, 5, 7];
    for k1 in 0..=2u32 {
        for k2 in 0..=2u32 {
            let cell = finfam_core::CellShape::new(vec![k1, k2]).unwrap();
            for m in 0..=k1 + k2 {
                for i in 1..=2u32 {
                    let expected = primes[0].pow(k1)
                        * primes[1].pow(k2)
                        * primes[2].pow(m)
                        * primes[3].pow(i);
                    assert_eq!(schedule.size(&cell, m, i), expected);
                }
            }
        }
    }
}

#[test]
fn coded_members_have_strictly_increasing_decodable_sizes() {
    let schedule = schedule_compact(1, 1).unwrap();
    let ground = GroundSet::new(8).unwrap();
    let mut x = MixedFamily::new(ground, 1).unwrap();
    for a in [0, 2, 4, 5, 6, 7] {
        x.insert_tuple(&tuple(&[&[a]])).unwrap();
    }
    x.insert_tuple(&tuple(&[&[]])).unwrap();
    let coded = phi_encode(&x, &schedule).unwrap();
    for member in coded.members() {
        let sizes: Vec<usize> = member.parts().iter().map(|p| p.k()).collect();
        assert!(sizes.windows(2).all(|w| w[0] < w[1] || sizes.len() == 1));
        for part in member.parts() {
            assert!(schedule.decode(part.k() as u64).is_some());
        }
    }
}

#[test]
fn range_map_is_a_surjection_onto_distinct_pairs() {
    // the reverse direction's witness: mapping a tuple of pairwise
    // distinct finite sets to its range covers every 2-element set of
    // finite sets over a tiny ground
    let subsets: Vec<KSubset> = (0..4u32)
        .map(|mask| KSubset::from_atoms((0..2).filter(|a| mask >> a & 1 == 1)))
        .collect();
    let mut targets: BTreeSet<BTreeSet<KSubset>> = BTreeSet::new();
    for pair in subsets.iter().combinations(2) {
        targets.insert(pair.into_iter().cloned().collect());
    }
    let mut covered: BTreeSet<BTreeSet<KSubset>> = BTreeSet::new();
    for a in &subsets {
        for b in &subsets {
            if a != b {
                covered.insert([a.clone(), b.clone()].into_iter().collect());
            }
        }
    }
    assert_eq!(covered, targets);
}

#[test]
fn hand_checked_n2_slices() {
    // X = {(<>, {0})} under the compact arity-2 schedule: the only
    // nonempty stage is (cell [0,1], m=0) and its G-fixed family is X's
    // cell itself; later stages vanish because H is empty
    let schedule = schedule_compact(2, 1).unwrap();
    let ground = GroundSet::new(33).unwrap();
    let mut x = MixedFamily::new(ground, 2).unwrap();
    x.insert_tuple(&tuple(&[&[], &[0]])).unwrap();
    let slices = phi_encode_slices(&x, &schedule).unwrap();
    let keys: Vec<_> = slices.slices().map(|(k, _)| k.clone()).collect();
    let cell01 = finfam_core::CellShape::new(vec![0, 1]).unwrap();
    assert_eq!(keys, vec![(cell01.clone(), 0)]);
    let y = slices.slice(&cell01, 0).unwrap();
    assert_eq!(y.len(), 1);
    assert!(y.contains(&tuple(&[&[], &[0]])));
    assert_eq!(phi_decode_slices(&slices, &schedule).unwrap(), x);
}
