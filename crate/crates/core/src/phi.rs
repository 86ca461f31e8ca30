//! Injection from mixed families into coded sets, driven by a size schedule.
//!
//! A mixed family assigns to each small cell shape a family in that cell.
//! The encoder processes every admissible `(cell, stage)` pair: it iterates
//! H under the completion context of the cell, closes with G, and extends
//! the result with F into a stage-specific upper shape whose coordinate
//! sizes encode the cell, the stage, and the coordinate index. Members of
//! the coded set are the ranges of those extended tuples; since coordinate
//! sizes strictly increase, each member is an n-element set of finite sets
//! whose sizes identify exactly where it came from.
//!
//! The decoder inverts this: members are grouped by decoded sizes, each
//! stage family is pulled back to the unique G-fixed family it extends, and
//! each cell is reassembled by the alternating difference of its stages.
//! The decoder validates by re-encoding.
//!
//! Two codec surfaces are provided. The explicit one ([`phi_encode`],
//! [`phi_decode`]) materializes coded members and is meant for cells whose
//! upper shapes are enumerable. The slice form ([`phi_encode_slices`],
//! [`phi_decode_slices`]) represents each stage by its G-fixed family
//! instead of materializing the F-image; since F is injective on G-fixed
//! families and stages have disjoint size signatures, slice equality
//! coincides with equality of the denoted coded sets, which is what makes
//! the slice form usable when upper cells are astronomically large.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::grid::{big_f, big_g, recover_from_image, OperatorContext};
use crate::ground::{CellShape, Family, GroundSet, KSubset, SubsetTuple};

/// Assigns a target set size to every admissible `(cell, stage, coordinate)`
/// triple, injectively and decodably.
///
/// Contract (checked by [`check_schedule_contract`]):
/// * strictly increasing in the coordinate for a fixed `(cell, stage)`;
/// * nondecreasing in the stage for a fixed `(cell, coordinate)`;
/// * at least `k_i` everywhere, so the extension operator is defined;
/// * `decode` inverts `size` on admissible triples and returns `None` on
///   every other value.
pub trait SizeSchedule {
    fn arity(&self) -> usize;

    /// Maximum per-coordinate cell size this schedule covers.
    fn max_cell(&self) -> u32;

    /// Stable identifier used in serialized headers.
    fn id(&self) -> &str;

    /// Target size for coordinate `i` (1-based) of stage `m` of `cell`.
    /// Only defined on admissible triples.
    fn size(&self, cell: &CellShape, stage: u32, coord: u32) -> u64;

    fn decode(&self, size: u64) -> Option<(CellShape, u32, u32)>;
}

/// All cell shapes with every coordinate at most `max_cell`, in
/// lexicographic order.
pub fn admissible_cells(arity: usize, max_cell: u32) -> Vec<CellShape> {
    let mut out = Vec::new();
    let mut current = vec![0u32; arity];
    loop {
        out.push(CellShape::new(current.clone()).expect("arity >= 1"));
        let mut pos = arity;
        let mut advanced = false;
        while pos > 0 {
            pos -= 1;
            if current[pos] < max_cell {
                current[pos] += 1;
                for c in current.iter_mut().skip(pos + 1) {
                    *c = 0;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            return out;
        }
    }
}

/// The upper shape of one stage: coordinate sizes for `i = 1..=n`.
pub fn stage_shape(schedule: &dyn SizeSchedule, cell: &CellShape, stage: u32) -> Result<CellShape> {
    let sizes = (1..=schedule.arity() as u32)
        .map(|i| u32::try_from(schedule.size(cell, stage, i)).map_err(|_| Error::CellTooLarge))
        .collect::<Result<Vec<u32>>>()?;
    CellShape::new(sizes)
}

/// The completion shape of a cell: its final stage `m = k_1 + .. + k_n`.
pub fn completion_shape(schedule: &dyn SizeSchedule, cell: &CellShape) -> Result<CellShape> {
    stage_shape(schedule, cell, cell.size_sum() as u32)
}

/// Minimum ground size under which every stage context is valid: the
/// largest coordinate-size sum over all admissible stages.
pub fn required_ground_size(schedule: &dyn SizeSchedule) -> u64 {
    let mut worst = 0u64;
    for cell in admissible_cells(schedule.arity(), schedule.max_cell()) {
        for stage in 0..=cell.size_sum() as u32 {
            let total: u64 = (1..=schedule.arity() as u32)
                .map(|i| schedule.size(&cell, stage, i))
                .fold(0u64, |a, s| a.saturating_add(s));
            worst = worst.max(total);
        }
    }
    worst
}

/// Verifies the four schedule invariants exhaustively over the admissible
/// triples, plus `decode = None` on a margin of values outside the image.
pub fn check_schedule_contract(schedule: &dyn SizeSchedule) -> Result<()> {
    let n = schedule.arity() as u32;
    let mut image = BTreeSet::new();
    let mut max_size = 0u64;
    for cell in admissible_cells(schedule.arity(), schedule.max_cell()) {
        let stages = cell.size_sum() as u32;
        for m in 0..=stages {
            let mut prev: Option<u64> = None;
            for i in 1..=n {
                let s = schedule.size(&cell, m, i);
                if let Some(p) = prev {
                    if s <= p {
                        return Err(Error::Parameter(format!(
                            "schedule not strictly increasing in coordinate at {cell} stage {m}"
                        )));
                    }
                }
                prev = Some(s);
                if s < cell.sizes()[i as usize - 1] as u64 {
                    return Err(Error::Parameter(format!(
                        "schedule size below cell size at {cell} stage {m} coord {i}"
                    )));
                }
                if m < stages && schedule.size(&cell, m + 1, i) < s {
                    return Err(Error::Parameter(format!(
                        "schedule decreasing in stage at {cell} stage {m} coord {i}"
                    )));
                }
                match schedule.decode(s) {
                    Some((ref c, mm, ii)) if c == &cell && mm == m && ii == i => {}
                    other => {
                        return Err(Error::Parameter(format!(
                            "decode(size({cell},{m},{i})={s}) gave {other:?}"
                        )));
                    }
                }
                image.insert(s);
                max_size = max_size.max(s);
            }
        }
    }
    for v in 0..=max_size + 5 {
        if !image.contains(&v) && schedule.decode(v).is_some() {
            return Err(Error::Parameter(format!(
                "decode accepts {v} which is not an admissible size"
            )));
        }
    }
    Ok(())
}

fn first_primes(count: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while primes.len() < count {
        if primes.iter().all(|p| !candidate.is_multiple_of(*p)) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

/// The prime-power schedule: coordinate `i` of stage `m` of cell
/// `<k_1,..,k_n>` has size `p_1^{k_1} .. p_n^{k_n} p_{n+1}^m p_{n+2}^i`
/// where `p_j` is the j-th prime.
#[derive(Debug, Clone)]
pub struct PaperSchedule {
    arity: usize,
    max_cell: u32,
    primes: Vec<u64>,
}

pub fn schedule_paper(arity: usize, max_cell: u32) -> Result<PaperSchedule> {
    if arity == 0 {
        return Err(Error::Parameter("arity must be at least 1".into()));
    }
    let primes = first_primes(arity + 2);
    let schedule = PaperSchedule {
        arity,
        max_cell,
        primes,
    };
    // largest admissible size must fit u64
    let top = CellShape::new(vec![max_cell; arity])?;
    schedule
        .checked_size(&top, arity as u32 * max_cell, arity as u32)
        .ok_or_else(|| Error::Parameter("prime-power sizes overflow u64".into()))?;
    Ok(schedule)
}

impl PaperSchedule {
    fn checked_size(&self, cell: &CellShape, stage: u32, coord: u32) -> Option<u64> {
        let mut acc: u64 = 1;
        for (j, &k) in cell.sizes().iter().enumerate() {
            acc = acc.checked_mul(self.primes[j].checked_pow(k)?)?;
        }
        acc = acc.checked_mul(self.primes[self.arity].checked_pow(stage)?)?;
        acc.checked_mul(self.primes[self.arity + 1].checked_pow(coord)?)
    }
}

impl SizeSchedule for PaperSchedule {
    fn arity(&self) -> usize {
        self.arity
    }

    fn max_cell(&self) -> u32 {
        self.max_cell
    }

    fn id(&self) -> &str {
        "paper"
    }

    fn size(&self, cell: &CellShape, stage: u32, coord: u32) -> u64 {
        assert_eq!(cell.arity(), self.arity, "cell arity mismatch");
        assert!(
            (1..=self.arity as u32).contains(&coord),
            "coordinate out of range"
        );
        self.checked_size(cell, stage, coord)
            .expect("constructor bounds admissible sizes")
    }

    fn decode(&self, size: u64) -> Option<(CellShape, u32, u32)> {
        if size == 0 {
            return None;
        }
        let mut rest = size;
        let mut exps = vec![0u32; self.arity + 2];
        for (j, &p) in self.primes.iter().enumerate() {
            while rest.is_multiple_of(p) {
                rest /= p;
                exps[j] += 1;
            }
        }
        if rest != 1 {
            return None;
        }
        let k = &exps[..self.arity];
        if k.iter().any(|&kj| kj > self.max_cell) {
            return None;
        }
        let stage = exps[self.arity];
        if stage as u64 > k.iter().map(|&kj| kj as u64).sum::<u64>() {
            return None;
        }
        let coord = exps[self.arity + 1];
        if !(1..=self.arity as u32).contains(&coord) {
            return None;
        }
        Some((
            CellShape::new(k.to_vec()).expect("arity >= 1"),
            stage,
            coord,
        ))
    }
}

/// A dense schedule for testing at small ground sizes: admissible triples
/// are enumerated (cell lexicographic, then stage, then coordinate) and the
/// triple of rank `r` gets size `max_cell + 1 + r`.
#[derive(Debug, Clone)]
pub struct CompactSchedule {
    arity: usize,
    max_cell: u32,
    triples: Vec<(CellShape, u32, u32)>,
    ranks: BTreeMap<(CellShape, u32, u32), u64>,
}

pub fn schedule_compact(arity: usize, max_cell: u32) -> Result<CompactSchedule> {
    if arity == 0 {
        return Err(Error::Parameter("arity must be at least 1".into()));
    }
    let cells = admissible_cells(arity, max_cell);
    let mut triples = Vec::new();
    for cell in cells {
        for stage in 0..=cell.size_sum() as u32 {
            for coord in 1..=arity as u32 {
                triples.push((cell.clone(), stage, coord));
                if triples.len() > 1 << 20 {
                    return Err(Error::Parameter(
                        "compact schedule has too many admissible triples".into(),
                    ));
                }
            }
        }
    }
    let ranks = triples
        .iter()
        .enumerate()
        .map(|(r, t)| (t.clone(), r as u64))
        .collect();
    Ok(CompactSchedule {
        arity,
        max_cell,
        triples,
        ranks,
    })
}

impl SizeSchedule for CompactSchedule {
    fn arity(&self) -> usize {
        self.arity
    }

    fn max_cell(&self) -> u32 {
        self.max_cell
    }

    fn id(&self) -> &str {
        "compact"
    }

    fn size(&self, cell: &CellShape, stage: u32, coord: u32) -> u64 {
        let rank = self
            .ranks
            .get(&(cell.clone(), stage, coord))
            .expect("admissible triple");
        self.max_cell as u64 + 1 + rank
    }

    fn decode(&self, size: u64) -> Option<(CellShape, u32, u32)> {
        let rank = size.checked_sub(self.max_cell as u64 + 1)?;
        self.triples.get(rank as usize).cloned()
    }
}

/// A family per cell shape; cells with empty families are not stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedFamily {
    ground: GroundSet,
    arity: usize,
    cells: BTreeMap<CellShape, Family>,
}

impl MixedFamily {
    pub fn new(ground: GroundSet, arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Parameter("arity must be at least 1".into()));
        }
        Ok(MixedFamily {
            ground,
            arity,
            cells: BTreeMap::new(),
        })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Replaces the family stored at its shape. Empty families clear the
    /// entry, keeping the representation canonical.
    pub fn set_cell(&mut self, family: Family) -> Result<()> {
        if family.shape().arity() != self.arity {
            return Err(Error::ArityMismatch {
                left: family.shape().arity(),
                right: self.arity,
            });
        }
        if family.ground() != &self.ground {
            return Err(Error::Parameter(
                "family ground does not match mixed family ground".into(),
            ));
        }
        if family.is_empty() {
            self.cells.remove(family.shape());
        } else {
            self.cells.insert(family.shape().clone(), family);
        }
        Ok(())
    }

    pub fn insert_tuple(&mut self, tuple: &SubsetTuple) -> Result<bool> {
        if tuple.arity() != self.arity {
            return Err(Error::ArityMismatch {
                left: tuple.arity(),
                right: self.arity,
            });
        }
        let shape = tuple.shape();
        let entry = self
            .cells
            .entry(shape.clone())
            .or_insert_with(|| Family::empty(self.ground, shape));
        entry.insert(tuple)
    }

    pub fn cell(&self, shape: &CellShape) -> Option<&Family> {
        self.cells.get(shape)
    }

    pub fn cells(&self) -> impl Iterator<Item = (&CellShape, &Family)> {
        self.cells.iter()
    }

    pub fn member_count(&self) -> usize {
        self.cells.values().map(|f| f.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// One coded member: n finite sets with pairwise distinct sizes, stored in
/// ascending size order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CodedMember {
    parts: Vec<KSubset>,
}

impl CodedMember {
    pub fn new(mut parts: Vec<KSubset>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Parameter("coded member must have arity >= 1".into()));
        }
        parts.sort_by_key(|p| p.k());
        if parts.windows(2).any(|w| w[0].k() == w[1].k()) {
            return Err(Error::Parameter(
                "coded member parts must have pairwise distinct sizes".into(),
            ));
        }
        Ok(CodedMember { parts })
    }

    pub fn parts(&self) -> &[KSubset] {
        &self.parts
    }

    pub fn arity(&self) -> usize {
        self.parts.len()
    }
}

/// The explicit coded set: a finite set of coded members plus the
/// parameters needed to interpret them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedSet {
    ground: GroundSet,
    arity: usize,
    max_cell: u32,
    schedule_id: String,
    members: BTreeSet<CodedMember>,
}

impl CodedSet {
    pub fn new(ground: GroundSet, arity: usize, max_cell: u32, schedule_id: &str) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Parameter("arity must be at least 1".into()));
        }
        Ok(CodedSet {
            ground,
            arity,
            max_cell,
            schedule_id: schedule_id.to_string(),
            members: BTreeSet::new(),
        })
    }

    pub fn insert(&mut self, member: CodedMember) -> Result<bool> {
        if member.arity() != self.arity {
            return Err(Error::ArityMismatch {
                left: member.arity(),
                right: self.arity,
            });
        }
        for part in member.parts() {
            if let Some(max) = part.max_atom() {
                if !self.ground.contains(max) {
                    return Err(Error::AtomOutOfRange {
                        atom: max,
                        ground: self.ground.size(),
                    });
                }
            }
        }
        Ok(self.members.insert(member))
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn max_cell(&self) -> u32 {
        self.max_cell
    }

    pub fn schedule_id(&self) -> &str {
        &self.schedule_id
    }

    pub fn members(&self) -> impl Iterator<Item = &CodedMember> {
        self.members.iter()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// The slice form of a coded set: stage `(cell, m)` maps to the G-fixed
/// family whose F-image the stage denotes. Empty slices are not stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiSlices {
    ground: GroundSet,
    arity: usize,
    max_cell: u32,
    schedule_id: String,
    slices: BTreeMap<(CellShape, u32), Family>,
}

impl PhiSlices {
    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn slices(&self) -> impl Iterator<Item = (&(CellShape, u32), &Family)> {
        self.slices.iter()
    }

    pub fn slice(&self, cell: &CellShape, stage: u32) -> Option<&Family> {
        self.slices.get(&(cell.clone(), stage))
    }

    /// Materializes the denoted coded set by extending every slice with F.
    /// Refuses when some stage's upper cell is too large to enumerate.
    pub fn materialize(&self, schedule: &dyn SizeSchedule) -> Result<CodedSet> {
        if schedule.id() != self.schedule_id || schedule.arity() != self.arity {
            return Err(Error::Parameter(
                "schedule does not match the one used to encode".into(),
            ));
        }
        let mut coded = CodedSet::new(self.ground, self.arity, self.max_cell, &self.schedule_id)?;
        for ((cell, stage), y) in &self.slices {
            let upper = stage_shape(schedule, cell, *stage)?;
            let ctx = OperatorContext::new(self.ground, cell.clone(), upper)?;
            let z = big_f(y, &ctx)?;
            for tuple in z.members() {
                coded.insert(CodedMember::new(tuple.parts().to_vec())?)?;
            }
        }
        Ok(coded)
    }
}

fn check_ground(schedule: &dyn SizeSchedule, ground: &GroundSet) -> Result<()> {
    let required = required_ground_size(schedule);
    if (ground.size() as u64) < required {
        return Err(Error::GroundTooSmall {
            required,
            actual: ground.size() as u64,
        });
    }
    Ok(())
}

/// Encodes a mixed family stage by stage, producing the slice form.
///
/// For each admissible cell `k` the H-iterates under the completion context
/// are closed with G; the stage family of `(k, m)` is `G(H^m(X_k))`.
pub fn phi_encode_slices(x: &MixedFamily, schedule: &dyn SizeSchedule) -> Result<PhiSlices> {
    if x.arity() != schedule.arity() {
        return Err(Error::ArityMismatch {
            left: x.arity(),
            right: schedule.arity(),
        });
    }
    check_ground(schedule, x.ground())?;
    for (shape, _) in x.cells() {
        if shape.sizes().iter().any(|&k| k > schedule.max_cell()) {
            return Err(Error::Parameter(format!(
                "cell {shape} exceeds the schedule's maximum cell size {}",
                schedule.max_cell()
            )));
        }
    }
    let mut slices = BTreeMap::new();
    for cell in admissible_cells(schedule.arity(), schedule.max_cell()) {
        let stages = cell.size_sum() as u32;
        let completion = completion_shape(schedule, &cell)?;
        let ctx = OperatorContext::new(*x.ground(), cell.clone(), completion)?;
        let mut current = x
            .cell(&cell)
            .cloned()
            .unwrap_or_else(|| Family::empty(*x.ground(), cell.clone()));
        for stage in 0..=stages {
            let closed = big_g(&current, &ctx)?;
            if !closed.is_empty() {
                slices.insert((cell.clone(), stage), closed.clone());
            }
            current = closed.difference(&current);
        }
    }
    Ok(PhiSlices {
        ground: *x.ground(),
        arity: schedule.arity(),
        max_cell: schedule.max_cell(),
        schedule_id: schedule.id().to_string(),
        slices,
    })
}

/// Reassembles each cell from recovered stage families by the alternating
/// difference `Y_0 \ (Y_1 \ ( .. \ Y_sum ))`.
fn assemble_cells(
    ground: GroundSet,
    arity: usize,
    schedule: &dyn SizeSchedule,
    recovered: &BTreeMap<(CellShape, u32), Family>,
) -> Result<MixedFamily> {
    let mut mixed = MixedFamily::new(ground, arity)?;
    for cell in admissible_cells(arity, schedule.max_cell()) {
        let stages = cell.size_sum() as u32;
        let mut acc = recovered
            .get(&(cell.clone(), stages))
            .cloned()
            .expect("all stages recovered");
        for stage in (0..stages).rev() {
            let y = recovered
                .get(&(cell.clone(), stage))
                .expect("all stages recovered");
            acc = y.difference(&acc);
        }
        mixed.set_cell(acc)?;
    }
    Ok(mixed)
}

/// Re-encodes a decode result and compares it stage by stage with the
/// recovered stage families. Both sides are G-fixed under the stage
/// context, where F is injective, so slice equality is equality of the
/// denoted coded sets.
fn validate_by_reencoding(
    mixed: &MixedFamily,
    schedule: &dyn SizeSchedule,
    recovered: &BTreeMap<(CellShape, u32), Family>,
) -> Result<()> {
    let reencoded = phi_encode_slices(mixed, schedule)?;
    for cell in admissible_cells(schedule.arity(), schedule.max_cell()) {
        for stage in 0..=cell.size_sum() as u32 {
            let ours = recovered
                .get(&(cell.clone(), stage))
                .expect("all stages recovered");
            let matches = match reencoded.slice(&cell, stage) {
                Some(f) => f == ours,
                None => ours.is_empty(),
            };
            if !matches {
                return Err(Error::NotAPhiImage {
                    cell,
                    stage,
                    reason: "stage family does not survive re-encoding".into(),
                });
            }
        }
    }
    Ok(())
}

/// Decodes the slice form: each stage family is normalized with G under its
/// stage context (recovering the unique G-fixed family with the same
/// F-image), cells are reassembled, and the result is validated by
/// re-encoding.
pub fn phi_decode_slices(slices: &PhiSlices, schedule: &dyn SizeSchedule) -> Result<MixedFamily> {
    if schedule.id() != slices.schedule_id
        || schedule.arity() != slices.arity
        || schedule.max_cell() != slices.max_cell
    {
        return Err(Error::Parameter(
            "schedule does not match the one used to encode".into(),
        ));
    }
    check_ground(schedule, &slices.ground)?;
    for ((cell, stage), family) in &slices.slices {
        let admissible = cell.arity() == slices.arity
            && cell.sizes().iter().all(|&k| k <= slices.max_cell)
            && *stage as u64 <= cell.size_sum();
        if !admissible || family.shape() != cell || family.ground() != &slices.ground {
            return Err(Error::NotAPhiImage {
                cell: cell.clone(),
                stage: *stage,
                reason: "slice key is not an admissible stage".into(),
            });
        }
    }
    let mut recovered = BTreeMap::new();
    for cell in admissible_cells(slices.arity, slices.max_cell) {
        let stages = cell.size_sum() as u32;
        for stage in 0..=stages {
            let upper = stage_shape(schedule, &cell, stage)?;
            let ctx = OperatorContext::new(slices.ground, cell.clone(), upper)?;
            let w = slices
                .slice(&cell, stage)
                .cloned()
                .unwrap_or_else(|| Family::empty(slices.ground, cell.clone()));
            let y = big_g(&w, &ctx)?;
            recovered.insert((cell.clone(), stage), y);
        }
    }
    let mixed = assemble_cells(slices.ground, slices.arity, schedule, &recovered)?;
    validate_by_reencoding(&mixed, schedule, &recovered)?;
    Ok(mixed)
}

/// Encodes a mixed family into an explicit coded set.
pub fn phi_encode(x: &MixedFamily, schedule: &dyn SizeSchedule) -> Result<CodedSet> {
    phi_encode_slices(x, schedule)?.materialize(schedule)
}

/// Decodes an explicit coded set: groups members by decoded sizes into
/// stage families, recovers each stage's G-fixed family (with a forward
/// check), reassembles cells, and validates by re-encoding.
pub fn phi_decode(coded: &CodedSet, schedule: &dyn SizeSchedule) -> Result<MixedFamily> {
    if schedule.id() != coded.schedule_id
        || schedule.arity() != coded.arity
        || schedule.max_cell() != coded.max_cell
    {
        return Err(Error::Parameter(
            "schedule does not match the one used to encode".into(),
        ));
    }
    check_ground(schedule, &coded.ground)?;
    let mut stages: BTreeMap<(CellShape, u32), Family> = BTreeMap::new();
    for member in coded.members() {
        let mut decoded_cell: Option<(CellShape, u32)> = None;
        for (pos, part) in member.parts().iter().enumerate() {
            let size = part.k() as u64;
            let (cell, stage, coord) = schedule
                .decode(size)
                .ok_or(Error::UndecodableSize { size })?;
            let consistent = coord as usize == pos + 1
                && decoded_cell
                    .as_ref()
                    .is_none_or(|(c, m)| c == &cell && *m == stage);
            if !consistent {
                return Err(Error::NotAPhiImage {
                    cell,
                    stage,
                    reason: "member sizes decode inconsistently".into(),
                });
            }
            decoded_cell = Some((cell, stage));
        }
        let (cell, stage) = decoded_cell.expect("members have arity >= 1");
        let upper = stage_shape(schedule, &cell, stage)?;
        let tuple = SubsetTuple::new(member.parts().to_vec())?;
        stages
            .entry((cell, stage))
            .or_insert_with(|| Family::empty(coded.ground, upper))
            .insert(&tuple)?;
    }
    let mut recovered = BTreeMap::new();
    for cell in admissible_cells(coded.arity, coded.max_cell) {
        for stage in 0..=cell.size_sum() as u32 {
            let upper = stage_shape(schedule, &cell, stage)?;
            let ctx = OperatorContext::new(coded.ground, cell.clone(), upper.clone())?;
            let z = stages
                .remove(&(cell.clone(), stage))
                .unwrap_or_else(|| Family::empty(coded.ground, upper));
            let y = recover_from_image(&z, &ctx).map_err(|e| match e {
                Error::NotAnFImage => Error::NotAPhiImage {
                    cell: cell.clone(),
                    stage,
                    reason: "stage family is not the F-image of a G-fixed family".into(),
                },
                other => other,
            })?;
            recovered.insert((cell.clone(), stage), y);
        }
    }
    let mixed = assemble_cells(coded.ground, coded.arity, schedule, &recovered)?;
    validate_by_reencoding(&mixed, schedule, &recovered)?;
    Ok(mixed)
}
