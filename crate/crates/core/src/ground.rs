//! Atoms, k-subsets, grid cells, and families of subset tuples.
//!
//! A ground set is `{0, 1, .., size-1}`. A cell is a product
//! `[A]^{k_1} x .. x [A]^{k_n}` of fixed-size subset spaces; a family is a
//! finite subset of one cell. Tuples are ranked colexicographically per
//! component and lexicographically across components (first component most
//! significant), which gives every cell a canonical enumeration order and
//! lets families be stored as sorted rank sets.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Atoms are natural numbers below the ground-set size.
pub type Atom = u32;

/// `C(n, k)` as `u64`, or `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc.checked_mul((n - k + i) as u128)?;
        acc /= i as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

fn bin(n: u64, k: u64) -> u64 {
    binomial(n, k).expect("binomial overflow in pre-validated context")
}

/// The finite ground set `{0, .., size-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundSet {
    size: u32,
}

impl GroundSet {
    pub fn new(size: u32) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyGround);
        }
        Ok(GroundSet { size })
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> {
        0..self.size
    }

    pub fn contains(&self, atom: Atom) -> bool {
        atom < self.size
    }
}

impl fmt::Display for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A({})", self.size)
    }
}

/// A finite set of atoms, stored strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct KSubset {
    elements: Vec<Atom>,
}

impl KSubset {
    pub fn empty() -> Self {
        KSubset::default()
    }

    /// Builds from a strictly increasing list of atoms.
    pub fn new(elements: Vec<Atom>) -> Result<Self> {
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NotStrictlyIncreasing);
        }
        Ok(KSubset { elements })
    }

    /// Builds from arbitrary atoms, sorting and deduplicating.
    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let mut elements: Vec<Atom> = atoms.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        KSubset { elements }
    }

    pub fn k(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Atom] {
        &self.elements
    }

    pub fn iter(&self) -> impl Iterator<Item = Atom> + '_ {
        self.elements.iter().copied()
    }

    pub fn contains(&self, atom: Atom) -> bool {
        self.elements.binary_search(&atom).is_ok()
    }

    pub fn max_atom(&self) -> Option<Atom> {
        self.elements.last().copied()
    }

    /// Subset test by sorted merge.
    pub fn is_subset_of(&self, other: &KSubset) -> bool {
        let mut it = other.elements.iter();
        'outer: for &a in &self.elements {
            for &b in it.by_ref() {
                match b.cmp(&a) {
                    std::cmp::Ordering::Less => continue,
                    std::cmp::Ordering::Equal => continue 'outer,
                    std::cmp::Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }

    pub fn union(&self, other: &KSubset) -> KSubset {
        let mut elements: Vec<Atom> = self
            .elements
            .iter()
            .chain(other.elements.iter())
            .copied()
            .collect();
        elements.sort_unstable();
        elements.dedup();
        KSubset { elements }
    }

    pub fn intersection(&self, other: &KSubset) -> KSubset {
        KSubset {
            elements: self
                .elements
                .iter()
                .copied()
                .filter(|a| other.contains(*a))
                .collect(),
        }
    }

    pub fn difference(&self, other: &KSubset) -> KSubset {
        KSubset {
            elements: self
                .elements
                .iter()
                .copied()
                .filter(|a| !other.contains(*a))
                .collect(),
        }
    }

    /// Colexicographic rank among k-subsets of the ground set.
    pub fn colex_rank(&self) -> u64 {
        self.elements
            .iter()
            .enumerate()
            .map(|(j, &s)| bin(s as u64, j as u64 + 1))
            .sum()
    }

    /// Inverse of [`colex_rank`](Self::colex_rank) for the given `k`.
    pub fn colex_unrank(mut rank: u64, k: usize) -> KSubset {
        let mut elements = vec![0; k];
        for j in (0..k).rev() {
            // largest c with C(c, j+1) <= rank
            let mut c = j as u64;
            while bin(c + 1, j as u64 + 1) <= rank {
                c += 1;
            }
            rank -= bin(c, j as u64 + 1);
            elements[j] = c as Atom;
        }
        KSubset { elements }
    }
}

impl fmt::Display for KSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// The index vector `<k_1, .., k_n>` of a grid cell.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellShape {
    sizes: Vec<u32>,
}

impl CellShape {
    pub fn new(sizes: Vec<u32>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::Parameter("cell shape must have arity >= 1".into()));
        }
        Ok(CellShape { sizes })
    }

    pub fn arity(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn size_sum(&self) -> u64 {
        self.sizes.iter().map(|&k| k as u64).sum()
    }

    /// Componentwise `<=`.
    pub fn dominated_by(&self, other: &CellShape) -> bool {
        self.arity() == other.arity()
            && self
                .sizes
                .iter()
                .zip(other.sizes.iter())
                .all(|(a, b)| a <= b)
    }

    /// Number of tuples in the cell over the given ground set.
    pub fn cell_size(&self, ground: &GroundSet) -> Result<u64> {
        let mut total: u64 = 1;
        for &k in &self.sizes {
            let c = binomial(ground.size() as u64, k as u64).ok_or(Error::CellTooLarge)?;
            total = total.checked_mul(c).ok_or(Error::CellTooLarge)?;
        }
        Ok(total)
    }
}

impl fmt::Display for CellShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, k) in self.sizes.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "]")
    }
}

/// An n-tuple of finite atom sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubsetTuple {
    parts: Vec<KSubset>,
}

impl SubsetTuple {
    pub fn new(parts: Vec<KSubset>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Parameter("tuple must have arity >= 1".into()));
        }
        Ok(SubsetTuple { parts })
    }

    pub fn arity(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[KSubset] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> &KSubset {
        &self.parts[i]
    }

    pub fn shape(&self) -> CellShape {
        CellShape {
            sizes: self.parts.iter().map(|p| p.k() as u32).collect(),
        }
    }

    /// Tuple of empty sets of the given arity.
    pub fn empty(arity: usize) -> Self {
        SubsetTuple {
            parts: vec![KSubset::empty(); arity],
        }
    }

    pub fn in_cell(&self, ground: &GroundSet, shape: &CellShape) -> bool {
        self.arity() == shape.arity()
            && self
                .parts
                .iter()
                .zip(shape.sizes())
                .all(|(p, &k)| p.k() == k as usize && p.max_atom().is_none_or(|a| a < ground.size()))
    }

    fn check_arity(&self, other: &SubsetTuple) -> Result<()> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch {
                left: self.arity(),
                right: other.arity(),
            });
        }
        Ok(())
    }

    /// Componentwise inclusion: the relation `x <= y` between tuples.
    pub fn leq(&self, other: &SubsetTuple) -> Result<bool> {
        self.check_arity(other)?;
        Ok(self
            .parts
            .iter()
            .zip(other.parts.iter())
            .all(|(x, y)| x.is_subset_of(y)))
    }

    /// Componentwise union (join, least upper bound).
    pub fn join(&self, other: &SubsetTuple) -> Result<SubsetTuple> {
        self.check_arity(other)?;
        Ok(SubsetTuple {
            parts: self
                .parts
                .iter()
                .zip(other.parts.iter())
                .map(|(x, y)| x.union(y))
                .collect(),
        })
    }

    /// Componentwise intersection (meet, greatest lower bound).
    pub fn meet(&self, other: &SubsetTuple) -> Result<SubsetTuple> {
        self.check_arity(other)?;
        Ok(SubsetTuple {
            parts: self
                .parts
                .iter()
                .zip(other.parts.iter())
                .map(|(x, y)| x.intersection(y))
                .collect(),
        })
    }

    pub fn is_all_empty(&self) -> bool {
        self.parts.iter().all(|p| p.is_empty())
    }
}

impl fmt::Display for SubsetTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Rank of a tuple within its cell: per-component colex ranks combined
/// mixed-radix, first component most significant.
pub fn rank(tuple: &SubsetTuple, ground: &GroundSet, shape: &CellShape) -> Result<u64> {
    if !tuple.in_cell(ground, shape) {
        return Err(Error::ShapeMismatch {
            shape: shape.clone(),
        });
    }
    let mut acc: u64 = 0;
    for (part, &k) in tuple.parts.iter().zip(shape.sizes()) {
        let radix = bin(ground.size() as u64, k as u64);
        acc = acc * radix + part.colex_rank();
    }
    Ok(acc)
}

/// Inverse of [`rank`].
pub fn unrank(mut r: u64, ground: &GroundSet, shape: &CellShape) -> Result<SubsetTuple> {
    let size = shape.cell_size(ground)?;
    if r >= size {
        return Err(Error::RankOutOfRange { rank: r, size });
    }
    let mut parts = vec![KSubset::empty(); shape.arity()];
    for (i, &k) in shape.sizes().iter().enumerate().rev() {
        let radix = bin(ground.size() as u64, k as u64);
        parts[i] = KSubset::colex_unrank(r % radix, k as usize);
        r /= radix;
    }
    Ok(SubsetTuple { parts })
}

/// Iterator over a cell in canonical (rank) order.
pub struct CellIter {
    ground: GroundSet,
    shape: CellShape,
    next_rank: u64,
    size: u64,
}

impl Iterator for CellIter {
    type Item = SubsetTuple;

    fn next(&mut self) -> Option<SubsetTuple> {
        if self.next_rank >= self.size {
            return None;
        }
        let t = unrank(self.next_rank, &self.ground, &self.shape)
            .expect("rank below validated cell size");
        self.next_rank += 1;
        Some(t)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.size - self.next_rank) as usize;
        (left, Some(left))
    }
}

/// Streams every tuple of the cell exactly once in canonical order.
/// The stream is empty when some `k_i` exceeds the ground size.
pub fn enumerate_cell(ground: &GroundSet, shape: &CellShape) -> CellIter {
    let size = shape.cell_size(ground).unwrap_or(0);
    CellIter {
        ground: *ground,
        shape: shape.clone(),
        next_rank: 0,
        size,
    }
}

/// A finite set of tuples inside one cell, stored as sorted ranks.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Family {
    ground: GroundSet,
    shape: CellShape,
    ranks: BTreeSet<u64>,
}

impl Family {
    pub fn empty(ground: GroundSet, shape: CellShape) -> Self {
        Family {
            ground,
            shape,
            ranks: BTreeSet::new(),
        }
    }

    pub fn from_tuples<I>(ground: GroundSet, shape: CellShape, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = SubsetTuple>,
    {
        let mut fam = Family::empty(ground, shape);
        for t in tuples {
            fam.insert(&t)?;
        }
        Ok(fam)
    }

    pub fn from_ranks<I>(ground: GroundSet, shape: CellShape, ranks: I) -> Result<Self>
    where
        I: IntoIterator<Item = u64>,
    {
        let size = shape.cell_size(&ground)?;
        let mut set = BTreeSet::new();
        for r in ranks {
            if r >= size {
                return Err(Error::RankOutOfRange { rank: r, size });
            }
            set.insert(r);
        }
        Ok(Family {
            ground,
            shape,
            ranks: set,
        })
    }

    /// The whole cell as a family.
    pub fn full_cell(ground: GroundSet, shape: CellShape) -> Result<Self> {
        let size = shape.cell_size(&ground)?;
        Ok(Family {
            ground,
            shape,
            ranks: (0..size).collect(),
        })
    }

    /// Dense mask over cell ranks, for cells of at most 64 tuples.
    pub fn from_rank_mask(ground: GroundSet, shape: CellShape, mask: u64) -> Result<Self> {
        let size = shape.cell_size(&ground)?;
        if size > 64 {
            return Err(Error::Parameter(format!(
                "cell has {size} tuples; rank masks cover at most 64"
            )));
        }
        if size < 64 && mask >> size != 0 {
            return Err(Error::RankOutOfRange {
                rank: 63 - mask.leading_zeros() as u64,
                size,
            });
        }
        Ok(Family {
            ground,
            shape,
            ranks: (0..size).filter(|r| mask >> r & 1 == 1).collect(),
        })
    }

    pub fn rank_mask(&self) -> Option<u64> {
        if self.cell_size().ok()? > 64 {
            return None;
        }
        Some(self.ranks.iter().fold(0u64, |m, &r| m | 1 << r))
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn shape(&self) -> &CellShape {
        &self.shape
    }

    pub fn cell_size(&self) -> Result<u64> {
        self.shape.cell_size(&self.ground)
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn ranks(&self) -> impl Iterator<Item = u64> + '_ {
        self.ranks.iter().copied()
    }

    pub fn contains_rank(&self, r: u64) -> bool {
        self.ranks.contains(&r)
    }

    pub fn contains(&self, tuple: &SubsetTuple) -> bool {
        rank(tuple, &self.ground, &self.shape)
            .map(|r| self.ranks.contains(&r))
            .unwrap_or(false)
    }

    pub fn insert(&mut self, tuple: &SubsetTuple) -> Result<bool> {
        let r = rank(tuple, &self.ground, &self.shape)?;
        Ok(self.ranks.insert(r))
    }

    pub fn insert_rank(&mut self, r: u64) -> Result<bool> {
        let size = self.cell_size()?;
        if r >= size {
            return Err(Error::RankOutOfRange { rank: r, size });
        }
        Ok(self.ranks.insert(r))
    }

    /// Members in canonical (rank) order.
    pub fn members(&self) -> impl Iterator<Item = SubsetTuple> + '_ {
        self.ranks.iter().map(move |&r| {
            unrank(r, &self.ground, &self.shape).expect("stored rank is within the cell")
        })
    }

    fn check_compatible(&self, other: &Family) {
        assert_eq!(self.ground, other.ground, "families over different grounds");
        assert_eq!(self.shape, other.shape, "families in different cells");
    }

    pub fn union(&self, other: &Family) -> Family {
        self.check_compatible(other);
        Family {
            ground: self.ground,
            shape: self.shape.clone(),
            ranks: self.ranks.union(&other.ranks).copied().collect(),
        }
    }

    pub fn difference(&self, other: &Family) -> Family {
        self.check_compatible(other);
        Family {
            ground: self.ground,
            shape: self.shape.clone(),
            ranks: self.ranks.difference(&other.ranks).copied().collect(),
        }
    }

    pub fn intersection(&self, other: &Family) -> Family {
        self.check_compatible(other);
        Family {
            ground: self.ground,
            shape: self.shape.clone(),
            ranks: self.ranks.intersection(&other.ranks).copied().collect(),
        }
    }

    pub fn is_subset_of(&self, other: &Family) -> bool {
        self.check_compatible(other);
        self.ranks.is_subset(&other.ranks)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, t) in self.members().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "}}")
    }
}
