//! Explicit injections and surjections between sequence and subset spaces:
//! injective sequences into chains of finite sets, the diagonal pairing on
//! naturals, and the powerset-indexed injection into tuples of finite sets
//! together with its exact inverse.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::ground::{Atom, KSubset};

/// A finite sequence of pairwise-distinct atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct InjectiveSequence {
    entries: Vec<Atom>,
}

impl InjectiveSequence {
    pub fn new(entries: Vec<Atom>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &a in &entries {
            if !seen.insert(a) {
                return Err(Error::NotInjective);
            }
        }
        Ok(InjectiveSequence { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Atom] {
        &self.entries
    }

    pub fn prefix(&self, len: usize) -> InjectiveSequence {
        InjectiveSequence {
            entries: self.entries[..len].to_vec(),
        }
    }
}

impl fmt::Display for InjectiveSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, a) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ">")
    }
}

/// Maps an injective sequence to the chain of its initial-segment images:
/// `{{}, {t(0)}, {t(0),t(1)}, ..}`. Distinct sequences give distinct chains.
pub fn seqi_to_finfin(t: &InjectiveSequence) -> BTreeSet<KSubset> {
    let mut out = BTreeSet::new();
    for n in 0..=t.len() {
        out.insert(KSubset::from_atoms(t.entries[..n].iter().copied()));
    }
    out
}

/// Diagonal pairing `p(m,n) = (m+n)(m+n+1)/2 + n`, a bijection from pairs of
/// naturals onto naturals with `n <= p(m,n)`.
pub fn pair(m: u64, n: u64) -> u64 {
    let d = m + n;
    d * (d + 1) / 2 + n
}

/// Inverse of [`pair`].
pub fn unpair(value: u64) -> (u64, u64) {
    let w = ((8u128 * value as u128 + 1).isqrt() as u64 - 1) / 2;
    let n = value - w * (w + 1) / 2;
    (w - n, n)
}

/// Splits a sequence into `(m, prefix)` where `pair(m, |prefix|)` equals the
/// input length. Since `n <= pair(m,n)`, the prefix never exceeds the input.
pub fn seqi_split(t: &InjectiveSequence) -> (u64, InjectiveSequence) {
    let (m, n) = unpair(t.len() as u64);
    (m, t.prefix(n as usize))
}

/// An injection from all subsets of `{0,..,n-1}` into atoms. Subsets are
/// encoded as bitmasks; `assignment[mask]` is the image of that subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowersetInjection {
    n: u32,
    assignment: Vec<Atom>,
}

impl PowersetInjection {
    pub fn new(n: u32, assignment: Vec<Atom>) -> Result<Self> {
        let expected = 1u64 << n;
        if assignment.len() as u64 != expected {
            return Err(Error::IncompletePowersetDomain {
                expected,
                actual: assignment.len() as u64,
            });
        }
        let distinct: BTreeSet<_> = assignment.iter().collect();
        if distinct.len() != assignment.len() {
            return Err(Error::NotInjective);
        }
        Ok(PowersetInjection { n, assignment })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn image_of(&self, mask: u32) -> Atom {
        self.assignment[mask as usize]
    }

    pub fn assignment(&self) -> &[Atom] {
        &self.assignment
    }
}

/// An (n+1)-tuple of finite atom sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinTuple {
    coords: Vec<KSubset>,
}

impl FinTuple {
    pub fn new(coords: Vec<KSubset>) -> Self {
        FinTuple { coords }
    }

    pub fn coords(&self) -> &[KSubset] {
        &self.coords
    }
}

/// Encodes a powerset injection as an (n+1)-tuple of finite sets:
/// coordinate `k < n` collects the images of all subsets containing `k`,
/// and coordinate `n` is the singleton image of the empty subset.
pub fn pow_inject(t: &PowersetInjection) -> FinTuple {
    let n = t.n;
    let mut coords = Vec::with_capacity(n as usize + 1);
    for k in 0..n {
        coords.push(KSubset::from_atoms(
            (0..1u32 << n)
                .filter(|mask| mask >> k & 1 == 1)
                .map(|mask| t.image_of(mask)),
        ));
    }
    coords.push(KSubset::from_atoms([t.image_of(0)]));
    FinTuple { coords }
}

fn the_unique(set: &BTreeSet<Atom>, what: &str) -> Result<Atom> {
    if set.len() != 1 {
        return Err(Error::NotInImage {
            reason: format!("{what} is not a singleton (has {} elements)", set.len()),
        });
    }
    Ok(*set.iter().next().unwrap())
}

/// Exact inverse of [`pow_inject`]: recovers the image of the empty subset
/// from the last coordinate and the image of each nonempty subset `a` as the
/// unique atom in the intersection of the coordinates indexed by `a` minus
/// the union of the remaining coordinates. The decoded assignment is checked
/// by re-encoding; any failure reports "not in image".
pub fn pow_inject_inverse(f: &FinTuple, n: u32) -> Result<PowersetInjection> {
    if f.coords.len() != n as usize + 1 {
        return Err(Error::NotInImage {
            reason: format!(
                "expected {} coordinates, got {}",
                n + 1,
                f.coords.len()
            ),
        });
    }
    let mut assignment = vec![0; 1 << n];
    let last: BTreeSet<Atom> = f.coords[n as usize].iter().collect();
    assignment[0] = the_unique(&last, "image of the empty subset")?;
    for mask in 1..1u32 << n {
        let mut candidates: Option<BTreeSet<Atom>> = None;
        for k in 0..n {
            if mask >> k & 1 == 1 {
                let coord: BTreeSet<Atom> = f.coords[k as usize].iter().collect();
                candidates = Some(match candidates {
                    None => coord,
                    Some(prev) => prev.intersection(&coord).copied().collect(),
                });
            }
        }
        let mut set = candidates.expect("nonzero mask has at least one bit");
        for k in 0..n {
            if mask >> k & 1 == 0 {
                for a in f.coords[k as usize].iter() {
                    set.remove(&a);
                }
            }
        }
        assignment[mask as usize] = the_unique(&set, &format!("image of subset mask {mask}"))?;
    }
    let decoded = PowersetInjection::new(n, assignment).map_err(|_| Error::NotInImage {
        reason: "decoded assignment is not injective".into(),
    })?;
    if &pow_inject(&decoded) != f {
        return Err(Error::NotInImage {
            reason: "re-encoding the decoded assignment does not reproduce the input".into(),
        });
    }
    Ok(decoded)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(entries: &[Atom]) -> InjectiveSequence {
        InjectiveSequence::new(entries.to_vec()).unwrap()
    }

    fn chain(sets: &[&[Atom]]) -> BTreeSet<KSubset> {
        sets.iter()
            .map(|s| KSubset::from_atoms(s.iter().copied()))
            .collect()
    }

    #[test]
    fn seqi_to_finfin_small_cases() {
        assert_eq!(seqi_to_finfin(&seq(&[])), chain(&[&[]]));
        assert_eq!(seqi_to_finfin(&seq(&[5])), chain(&[&[], &[5]]));
        assert_eq!(seqi_to_finfin(&seq(&[2, 0])), chain(&[&[], &[2], &[0, 2]]));
        assert_eq!(seqi_to_finfin(&seq(&[0, 2])), chain(&[&[], &[0], &[0, 2]]));
        assert_ne!(seqi_to_finfin(&seq(&[2, 0])), seqi_to_finfin(&seq(&[0, 2])));
    }

    #[test]
    fn seqi_to_finfin_output_is_a_chain_of_all_lengths() {
        let t = seq(&[4, 1, 3]);
        let out = seqi_to_finfin(&t);
        assert_eq!(out.len(), 4);
        let mut by_size: Vec<_> = out.into_iter().collect();
        by_size.sort_by_key(|s| s.k());
        for w in by_size.windows(2) {
            assert!(w[0].is_subset_of(&w[1]));
        }
        let sizes: Vec<_> = by_size.iter().map(|s| s.k()).collect();
        assert_eq!(sizes, vec![0, 1, 2, 3]);
    }

    #[test]
    fn non_injective_sequence_rejected() {
        assert!(matches!(
            InjectiveSequence::new(vec![1, 2, 1]),
            Err(Error::NotInjective)
        ));
    }

    #[test]
    fn pairing_basics() {
        assert_eq!(pair(0, 0), 0);
        assert_eq!(unpair(pair(7, 3)), (7, 3));
    }

    #[test]
    fn pairing_is_a_bijection_with_second_bound() {
        let mut seen = BTreeSet::new();
        for m in 0..=100u64 {
            for n in 0..=100u64 {
                let d = pair(m, n);
                assert!(n <= d, "n <= pair(m,n) failed at ({m},{n})");
                assert!(seen.insert(d));
                assert_eq!(unpair(d), (m, n));
            }
        }
        // surjectivity onto an initial segment
        for d in 0..1000u64 {
            let (m, n) = unpair(d);
            assert_eq!(pair(m, n), d);
        }
    }

    #[test]
    fn seqi_split_basics() {
        let (m, p) = seqi_split(&seq(&[]));
        assert_eq!((m, p.len()), (0, 0));
        // prefix never exceeds the input
        let t = seq(&[7, 2, 9, 4, 0]);
        let (_, p) = seqi_split(&t);
        assert!(p.len() <= t.len());
        assert_eq!(p.entries(), &t.entries()[..p.len()]);
    }

    #[test]
    fn pow_inject_examples() {
        // n=0: the empty subset maps to 4
        let t = PowersetInjection::new(0, vec![4]).unwrap();
        assert_eq!(pow_inject(&t).coords(), &[KSubset::from_atoms([4])]);

        // n=1: {} -> 1, {0} -> 2 gives ({2},{1})
        let t = PowersetInjection::new(1, vec![1, 2]).unwrap();
        assert_eq!(
            pow_inject(&t).coords(),
            &[KSubset::from_atoms([2]), KSubset::from_atoms([1])]
        );

        // n=2: {} -> 10, {0} -> 11, {1} -> 12, {0,1} -> 13
        let t = PowersetInjection::new(2, vec![10, 11, 12, 13]).unwrap();
        assert_eq!(
            pow_inject(&t).coords(),
            &[
                KSubset::from_atoms([11, 13]),
                KSubset::from_atoms([12, 13]),
                KSubset::from_atoms([10]),
            ]
        );
    }

    #[test]
    fn pow_inject_inverse_example() {
        let f = FinTuple::new(vec![KSubset::from_atoms([2]), KSubset::from_atoms([1])]);
        let t = pow_inject_inverse(&f, 1).unwrap();
        assert_eq!(t.assignment(), &[1, 2]);
    }

    #[test]
    fn pow_inject_inverse_rejects_non_image() {
        let f = FinTuple::new(vec![
            KSubset::from_atoms([1, 2]),
            KSubset::from_atoms([1]),
        ]);
        assert!(matches!(
            pow_inject_inverse(&f, 1),
            Err(Error::NotInImage { .. })
        ));
    }

    #[test]
    fn pow_inject_round_trip_n2_exhaustive() {
        // all injections from the 4 subsets of {0,1} into 6 atoms: 360 cases
        let atoms: Vec<Atom> = (0..6).collect();
        let mut cases = 0;
        for &a0 in &atoms {
            for &a1 in &atoms {
                for &a2 in &atoms {
                    for &a3 in &atoms {
                        let img = vec![a0, a1, a2, a3];
                        let Ok(t) = PowersetInjection::new(2, img) else {
                            continue;
                        };
                        let round = pow_inject_inverse(&pow_inject(&t), 2).unwrap();
                        assert_eq!(round, t);
                        cases += 1;
                    }
                }
            }
        }
        assert_eq!(cases, 360);
    }
}
