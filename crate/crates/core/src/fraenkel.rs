//! Finite kernels of permutation-model arguments: finitely supported
//! permutations of atoms, the even/odd orbit partition of injective tuples,
//! the per-tuple equivalence on an atom pool with its pigeonhole, the
//! induced preorder on tuples of finite sets with counting and chain
//! bounds, and support checking for explicit finite functions on nested
//! atom structures.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_bigint::BigUint;

use crate::encodings::InjectiveSequence;
use crate::error::{Error, Result};
use crate::ground::{Atom, GroundSet, KSubset};

/// A permutation of atoms that is the identity outside a finite set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct PermutationOfAtoms {
    // moved atoms only
    mapping: BTreeMap<Atom, Atom>,
}

impl PermutationOfAtoms {
    pub fn identity() -> Self {
        PermutationOfAtoms::default()
    }

    /// Builds from an explicit mapping of the moved atoms. The values must
    /// be a permutation of the keys.
    pub fn from_mapping(mapping: BTreeMap<Atom, Atom>) -> Result<Self> {
        let keys: BTreeSet<Atom> = mapping.keys().copied().collect();
        let values: BTreeSet<Atom> = mapping.values().copied().collect();
        if keys != values {
            return Err(Error::NotInjective);
        }
        Ok(PermutationOfAtoms {
            mapping: mapping.into_iter().filter(|(k, v)| k != v).collect(),
        })
    }

    pub fn transposition(a: Atom, b: Atom) -> Self {
        if a == b {
            return PermutationOfAtoms::identity();
        }
        PermutationOfAtoms {
            mapping: [(a, b), (b, a)].into_iter().collect(),
        }
    }

    /// Builds the permutation sending `domain[i]` to `image[i]`.
    pub fn from_images(domain: &[Atom], image: &[Atom]) -> Result<Self> {
        if domain.len() != image.len() {
            return Err(Error::ArityMismatch {
                left: domain.len(),
                right: image.len(),
            });
        }
        Self::from_mapping(domain.iter().copied().zip(image.iter().copied()).collect())
    }

    pub fn apply(&self, atom: Atom) -> Atom {
        self.mapping.get(&atom).copied().unwrap_or(atom)
    }

    /// Atoms actually moved.
    pub fn support(&self) -> impl Iterator<Item = Atom> + '_ {
        self.mapping.keys().copied()
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.is_empty()
    }

    /// `self` after `other`: applies `other` first.
    pub fn compose(&self, other: &PermutationOfAtoms) -> PermutationOfAtoms {
        let domain: BTreeSet<Atom> = self
            .mapping
            .keys()
            .chain(other.mapping.keys())
            .copied()
            .collect();
        PermutationOfAtoms {
            mapping: domain
                .into_iter()
                .map(|a| (a, self.apply(other.apply(a))))
                .filter(|(k, v)| k != v)
                .collect(),
        }
    }

    pub fn inverse(&self) -> PermutationOfAtoms {
        PermutationOfAtoms {
            mapping: self.mapping.iter().map(|(&k, &v)| (v, k)).collect(),
        }
    }

    pub fn apply_sequence(&self, seq: &InjectiveSequence) -> InjectiveSequence {
        InjectiveSequence::new(seq.entries().iter().map(|&a| self.apply(a)).collect())
            .expect("permutations preserve injectivity")
    }

    pub fn apply_set(&self, set: &KSubset) -> KSubset {
        KSubset::from_atoms(set.iter().map(|a| self.apply(a)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn combine(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Parity of a permutation that moves only elements of `domain`, from its
/// cycle decomposition. Moving an atom outside `domain` is an error.
pub fn parity(perm: &PermutationOfAtoms, domain: &KSubset) -> Result<Parity> {
    for a in perm.support() {
        if !domain.contains(a) {
            return Err(Error::MovesOutsideDomain { atom: a });
        }
    }
    let mut seen = BTreeSet::new();
    let mut transpositions = 0u64;
    for a in perm.support() {
        if seen.contains(&a) {
            continue;
        }
        let mut len = 0u64;
        let mut cur = a;
        loop {
            seen.insert(cur);
            len += 1;
            cur = perm.apply(cur);
            if cur == a {
                break;
            }
        }
        transpositions += len - 1;
    }
    Ok(if transpositions.is_multiple_of(2) {
        Parity::Even
    } else {
        Parity::Odd
    })
}

/// The even/odd orbit partition of all injective tuples of length `|u|`
/// over `domain`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityOrbitPair {
    pub even: BTreeSet<InjectiveSequence>,
    pub odd: BTreeSet<InjectiveSequence>,
}

/// Orbits of `u` under the even and odd permutations of `domain`. Requires
/// a nonempty injective tuple with entries in `domain`; the empty tuple is
/// degenerate (both orbits would coincide) and is rejected.
pub fn parity_orbits(u: &InjectiveSequence, domain: &KSubset) -> Result<ParityOrbitPair> {
    if u.is_empty() {
        return Err(Error::Parameter(
            "parity orbits need a tuple of length at least 1".into(),
        ));
    }
    for &a in u.entries() {
        if !domain.contains(a) {
            return Err(Error::AtomOutOfRange {
                atom: a,
                ground: domain.k() as u32,
            });
        }
    }
    let atoms: Vec<Atom> = domain.iter().collect();
    let mut even = BTreeSet::new();
    let mut odd = BTreeSet::new();
    for image in atoms.iter().copied().permutations(atoms.len()) {
        let perm = PermutationOfAtoms::from_images(&atoms, &image)?;
        let moved = perm.apply_sequence(u);
        match parity(&perm, domain)? {
            Parity::Even => even.insert(moved),
            Parity::Odd => odd.insert(moved),
        };
    }
    Ok(ParityOrbitPair { even, odd })
}

/// Membership signature of an atom across the tuple's components.
fn signature(t: &[KSubset], atom: Atom) -> u64 {
    t.iter()
        .enumerate()
        .fold(0u64, |acc, (k, part)| acc | (part.contains(atom) as u64) << k)
}

/// Least pair of distinct pool atoms agreeing on membership in every
/// component of `t`. Always exists when the pool has more than `2^n` atoms.
pub fn pigeonhole_pair(t: &[KSubset], pool: &KSubset) -> Result<(Atom, Atom)> {
    let atoms: Vec<Atom> = pool.iter().collect();
    for (i, &a) in atoms.iter().enumerate() {
        for &b in &atoms[i + 1..] {
            if signature(t, a) == signature(t, b) {
                return Ok((a, b));
            }
        }
    }
    Err(Error::NoPair)
}

fn pool_atoms(ground: &GroundSet, excluded: &KSubset) -> Vec<Atom> {
    ground.atoms().filter(|&a| !excluded.contains(a)).collect()
}

/// The preorder induced by equivalence refinement on the pool
/// `ground \ excluded`: `t <= u` iff atoms equivalent under `u` are
/// equivalent under `t`.
pub fn preorder_leq(
    t: &[KSubset],
    u: &[KSubset],
    ground: &GroundSet,
    excluded: &KSubset,
) -> Result<bool> {
    if t.len() != u.len() {
        return Err(Error::ArityMismatch {
            left: t.len(),
            right: u.len(),
        });
    }
    let mut seen: BTreeMap<u64, u64> = BTreeMap::new();
    for a in pool_atoms(ground, excluded) {
        let su = signature(u, a);
        let st = signature(t, a);
        match seen.get(&su) {
            Some(&prev) if prev != st => return Ok(false),
            Some(_) => {}
            None => {
                seen.insert(su, st);
            }
        }
    }
    Ok(true)
}

/// Number of equivalence classes the tuple induces on the pool; at most
/// `2^n` for an n-tuple, and 0 only for an empty pool.
pub fn class_count(t: &[KSubset], ground: &GroundSet, excluded: &KSubset) -> usize {
    pool_atoms(ground, excluded)
        .into_iter()
        .map(|a| signature(t, a))
        .collect::<BTreeSet<u64>>()
        .len()
}

fn power_of_two(exp: u128) -> BigUint {
    BigUint::from(1u8) << usize::try_from(exp).expect("exponent fits in memory")
}

/// Upper bound on strict preorder chains without repetition:
/// `2^((|B| + 2^n + 1) * n) + 1`.
pub fn chain_length_bound(support_size: u64, n: u32) -> BigUint {
    let exp = (support_size as u128 + (1u128 << n) + 1) * n as u128;
    power_of_two(exp) + 1u8
}

/// Upper bound on the number of tuples inducing one fixed equivalence:
/// `2^((|B| + 2^n) * n)`.
pub fn partition_fiber_bound(support_size: u64, n: u32) -> BigUint {
    let exp = (support_size as u128 + (1u128 << n)) * n as u128;
    power_of_two(exp)
}

/// Canonical form of the equivalence a tuple induces on the pool: class
/// index of each pool atom by first occurrence.
fn canonical_partition(t: &[KSubset], pool: &[Atom]) -> Vec<u32> {
    let mut first_seen: BTreeMap<u64, u32> = BTreeMap::new();
    pool.iter()
        .map(|&a| {
            let sig = signature(t, a);
            let next = first_seen.len() as u32;
            *first_seen.entry(sig).or_insert(next)
        })
        .collect()
}

/// `fine` refines `coarse`: atoms in one `fine`-class share a
/// `coarse`-class.
fn refines(fine: &[u32], coarse: &[u32]) -> bool {
    let mut class_map: BTreeMap<u32, u32> = BTreeMap::new();
    for (&f, &c) in fine.iter().zip(coarse) {
        match class_map.get(&f) {
            Some(&prev) if prev != c => return false,
            Some(_) => {}
            None => {
                class_map.insert(f, c);
            }
        }
    }
    true
}

/// Report of the exhaustive fiber-counting check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberCheckReport {
    pub tuple_count: u64,
    pub max_fiber: u64,
    pub bound: BigUint,
    pub holds: bool,
}

/// Enumerates every n-tuple of ground subsets, groups them by the induced
/// equivalence on the pool, and compares the largest group against the
/// counting bound.
pub fn partition_fiber_check(
    ground: &GroundSet,
    excluded: &KSubset,
    n: u32,
) -> Result<FiberCheckReport> {
    let (fibers, total) = partition_fibers(ground, excluded, n)?;
    let max_fiber = fibers.values().map(|&f| f as u64).max().unwrap_or(0);
    let bound = partition_fiber_bound(excluded.k() as u64, n);
    Ok(FiberCheckReport {
        tuple_count: total,
        max_fiber,
        holds: BigUint::from(max_fiber) <= bound,
        bound,
    })
}

/// Groups all n-tuples over the ground set by canonical pool partition.
fn partition_fibers(
    ground: &GroundSet,
    excluded: &KSubset,
    n: u32,
) -> Result<(BTreeMap<Vec<u32>, u32>, u64)> {
    let bits = ground.size() as u64 * n as u64;
    if bits > 24 {
        return Err(Error::SearchSpaceExceeded {
            cost: format!("2^{bits} tuples"),
            limit: "2^24 tuples".into(),
        });
    }
    let pool = pool_atoms(ground, excluded);
    let mut fibers: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
    let total = 1u64 << bits;
    for code in 0..total {
        let t: Vec<KSubset> = (0..n)
            .map(|k| {
                let mask = code >> (k as u64 * ground.size() as u64);
                KSubset::from_atoms(ground.atoms().filter(|&a| mask >> a & 1 == 1))
            })
            .collect();
        *fibers.entry(canonical_partition(&t, &pool)).or_insert(0) += 1;
    }
    Ok((fibers, total))
}

/// Length of the longest strict preorder chain without repetition over all
/// n-tuples of ground subsets, by exhaustive search: tuples inducing the
/// same pool partition are mutually comparable, so the answer is the
/// heaviest path in the refinement order on partitions, weighted by fiber
/// sizes.
pub fn longest_chain(ground: &GroundSet, excluded: &KSubset, n: u32) -> Result<u64> {
    let (fibers, _) = partition_fibers(ground, excluded, n)?;
    let parts: Vec<(&Vec<u32>, u64)> = fibers.iter().map(|(p, &f)| (p, f as u64)).collect();
    // longest path ending at each partition, walking coarse -> fine
    let mut best: Vec<u64> = vec![0; parts.len()];
    // order by class count so predecessors (coarser) are computed first
    let mut order: Vec<usize> = (0..parts.len()).collect();
    let classes = |p: &Vec<u32>| p.iter().copied().max().map_or(0, |m| m + 1);
    order.sort_by_key(|&i| classes(parts[i].0));
    for &i in &order {
        let mut incoming = 0;
        for &j in &order {
            if j != i && refines(parts[i].0, parts[j].0) && !refines(parts[j].0, parts[i].0) {
                incoming = incoming.max(best[j]);
            }
        }
        best[i] = incoming + parts[i].1;
    }
    Ok(best.into_iter().max().unwrap_or(0))
}

/// A hereditarily finite value over atoms, with the structural permutation
/// action: atoms map to images, sets elementwise, tuples componentwise.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum NestedValue {
    Atom(Atom),
    Set(BTreeSet<NestedValue>),
    Tuple(Vec<NestedValue>),
}

impl NestedValue {
    pub fn from_atom_set(set: &KSubset) -> NestedValue {
        NestedValue::Set(set.iter().map(NestedValue::Atom).collect())
    }

    pub fn apply(&self, perm: &PermutationOfAtoms) -> NestedValue {
        match self {
            NestedValue::Atom(a) => NestedValue::Atom(perm.apply(*a)),
            NestedValue::Set(s) => NestedValue::Set(s.iter().map(|v| v.apply(perm)).collect()),
            NestedValue::Tuple(t) => NestedValue::Tuple(t.iter().map(|v| v.apply(perm)).collect()),
        }
    }
}

/// An explicit finite function between nested values.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FiniteMap {
    entries: BTreeMap<NestedValue, NestedValue>,
}

impl FiniteMap {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (NestedValue, NestedValue)>) -> Self {
        FiniteMap {
            entries: pairs.into_iter().collect(),
        }
    }

    pub fn get(&self, key: &NestedValue) -> Option<&NestedValue> {
        self.entries.get(key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&NestedValue, &NestedValue)> {
        self.entries.iter()
    }
}

/// True iff every transposition of two atoms outside `support` fixes the
/// function under the structural action. Transpositions generate all
/// permutations fixing `support` pointwise on a finite ground set, so this
/// decides whether `support` supports `f`. The function's domain must be
/// closed under those transpositions.
pub fn support_check(f: &FiniteMap, support: &KSubset, ground: &GroundSet) -> Result<bool> {
    let free: Vec<Atom> = pool_atoms(ground, support);
    for (i, &a) in free.iter().enumerate() {
        for &b in &free[i + 1..] {
            let tau = PermutationOfAtoms::transposition(a, b);
            for (key, value) in f.entries() {
                let moved_key = key.apply(&tau);
                let Some(image) = f.get(&moved_key) else {
                    return Err(Error::ActionUndefined(format!(
                        "domain is not closed under the transposition ({a} {b})"
                    )));
                };
                if image != &value.apply(&tau) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
