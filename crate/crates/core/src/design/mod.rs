//! Affine SL(2,q)-unitals built from hat systems, their axioms, and their
//! closures to 2-(q³+1, q+1, 1) designs.
//!
//! Points are the element indices of SL(2,q). A hat system fixes a subgroup
//! S of order q+1 and a list of base blocks D through the identity; the
//! blocks of the affine unital are the right cosets of S, the right cosets
//! of all Sylow 2-subgroups, and all right translates D·g of the bases.
//! Two points u, v lie on a common block D·g exactly when u·v⁻¹ is a
//! quotient x·y⁻¹ of two distinct points of D, which is why the quotient
//! direction below is x·y⁻¹.

mod closure;
mod incidence;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::sl2q::{SpecialLinearGroup, Subgroup};

pub use closure::{close, natural_parallelism, flat_parallelism, verify_design, ClosedUnital, Parallelism, ParallelismKind};
pub use incidence::{Incidence, PairScan};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesignError {
    #[error("subgroup has {found} elements, expected q+1 = {expected}")]
    SubgroupSize { found: usize, expected: usize },
    #[error("base D{index}: {reason}")]
    BadBase { index: usize, reason: String },
    #[error("condition (Q) fails for base D{index}: quotient {element} occurs twice")]
    QuotientRepeat { index: usize, element: u32 },
    #[error("condition (P) fails: {0}")]
    Partition(PartitionFault),
    #[error("parallelism class {class}: {reason}")]
    InvalidParallelism { class: usize, reason: String },
}

/// Where an element of SL(2,q)∖{1} is covered in condition (P).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Subgroup,
    Sylow(usize),
    Quotients(usize),
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Part::Subgroup => write!(f, "S"),
            Part::Sylow(i) => write!(f, "Sylow subgroup {i}"),
            Part::Quotients(i) => write!(f, "D{}*", i + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionFault {
    DoublyCovered { element: u32, first: Part, second: Part },
    Uncovered { element: u32 },
}

impl fmt::Display for PartitionFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionFault::DoublyCovered { element, first, second } => {
                write!(f, "element {element} lies in both {first} and {second}")
            }
            PartitionFault::Uncovered { element } => write!(f, "element {element} is not covered"),
        }
    }
}

/// A subgroup S of order q+1 together with arcuate base blocks through 1.
/// Bases are sorted lists of element indices.
#[derive(Clone)]
pub struct HatSystem {
    group: Arc<SpecialLinearGroup>,
    subgroup: Subgroup,
    bases: Vec<Vec<u32>>,
}

impl fmt::Debug for HatSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HatSystem")
            .field("q", &self.q())
            .field("subgroup", &self.subgroup)
            .field("bases", &self.bases)
            .finish()
    }
}

impl PartialEq for HatSystem {
    fn eq(&self, other: &Self) -> bool {
        self.group.field() == other.group.field()
            && self.subgroup == other.subgroup
            && self.bases == other.bases
    }
}

impl Eq for HatSystem {}

impl HatSystem {
    pub fn new(
        group: Arc<SpecialLinearGroup>,
        subgroup: Subgroup,
        bases: Vec<Vec<u32>>,
    ) -> Result<Self, DesignError> {
        let q = group.q();
        if subgroup.len() != q + 1 || !subgroup.contains(0) {
            return Err(DesignError::SubgroupSize { found: subgroup.len(), expected: q + 1 });
        }
        let mut sorted = Vec::with_capacity(bases.len());
        for (i, mut base) in bases.into_iter().enumerate() {
            base.sort_unstable();
            base.dedup();
            if base.len() != q + 1 {
                return Err(DesignError::BadBase {
                    index: i + 1,
                    reason: format!("has {} distinct elements, expected {}", base.len(), q + 1),
                });
            }
            if base.first() != Some(&0) {
                return Err(DesignError::BadBase { index: i + 1, reason: "does not contain the identity".into() });
            }
            sorted.push(base);
        }
        Ok(HatSystem { group, subgroup, bases: sorted })
    }

    pub fn group(&self) -> &Arc<SpecialLinearGroup> {
        &self.group
    }

    pub fn q(&self) -> usize {
        self.group.q()
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn bases(&self) -> &[Vec<u32>] {
        &self.bases
    }

    /// The hats {D·d⁻¹ : d ∈ D}, one per base.
    pub fn hats(&self) -> Vec<Vec<Vec<u32>>> {
        self.bases.iter().map(|d| hat(&self.group, d)).collect()
    }

    pub fn with_bases(&self, bases: Vec<Vec<u32>>) -> Result<Self, DesignError> {
        Self::new(self.group.clone(), self.subgroup.clone(), bases)
    }
}

/// The right translate B·g, sorted.
pub fn translate(group: &SpecialLinearGroup, block: &[u32], g: u32) -> Vec<u32> {
    let mut out: Vec<u32> = block.iter().map(|&x| group.mul(x, g)).collect();
    out.sort_unstable();
    out
}

/// The hat {D·d⁻¹ : d ∈ D} of the blocks through 1 that are translates of D,
/// in the order of d.
pub fn hat(group: &SpecialLinearGroup, base: &[u32]) -> Vec<Vec<u32>> {
    base.iter().map(|&d| translate(group, base, group.inv(d))).collect()
}

/// All quotients x·y⁻¹ for x ≠ y in D, with multiplicity.
pub fn quotient_list(group: &SpecialLinearGroup, block: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(block.len() * block.len().saturating_sub(1));
    for &x in block {
        for &y in block {
            if x != y {
                out.push(group.mul(x, group.inv(y)));
            }
        }
    }
    out
}

/// The quotient set D* together with the size of the underlying multiset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientSet {
    pub elements: Vec<u32>,
    pub multiset_len: usize,
}

impl QuotientSet {
    pub fn is_injective(&self) -> bool {
        self.elements.len() == self.multiset_len
    }
}

pub fn quotient_set(group: &SpecialLinearGroup, block: &[u32]) -> QuotientSet {
    let list = quotient_list(group, block);
    let multiset_len = list.len();
    let mut elements = list;
    elements.sort_unstable();
    elements.dedup();
    QuotientSet { elements, multiset_len }
}

/// Condition (Q): D has q+1 points and its q(q+1) quotients are distinct.
pub fn check_q(group: &SpecialLinearGroup, block: &[u32]) -> bool {
    let q = group.q();
    block.len() == q + 1 && quotient_set(group, block).elements.len() == q * (q + 1)
}

fn first_repeat(group: &SpecialLinearGroup, block: &[u32]) -> Option<u32> {
    let mut seen = HashSet::new();
    quotient_list(group, block).into_iter().find(|&x| !seen.insert(x))
}

/// Sizes of the parts in condition (P).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionCounts {
    pub subgroup: usize,
    pub sylow: usize,
    pub quotients: usize,
}

impl PartitionCounts {
    pub fn total(&self) -> usize {
        self.subgroup + self.sylow + self.quotients
    }
}

/// Checks (Q) for every base and (P) for the whole system, returning the part
/// sizes or the first offending element.
pub fn partition_report(system: &HatSystem) -> Result<PartitionCounts, DesignError> {
    let group = system.group();
    let n = group.order();
    for (i, base) in system.bases().iter().enumerate() {
        if let Some(element) = first_repeat(group, base) {
            return Err(DesignError::QuotientRepeat { index: i + 1, element });
        }
    }
    let mut owner: Vec<Option<Part>> = vec![None; n];
    let mut counts = PartitionCounts { subgroup: 0, sylow: 0, quotients: 0 };
    let mut claim = |x: u32, part: Part| -> Result<(), DesignError> {
        if x == 0 {
            return Ok(());
        }
        match owner[x as usize] {
            Some(first) => Err(DesignError::Partition(PartitionFault::DoublyCovered { element: x, first, second: part })),
            None => {
                owner[x as usize] = Some(part);
                Ok(())
            }
        }
    };
    for &s in system.subgroup().elements() {
        claim(s, Part::Subgroup)?;
        counts.subgroup += usize::from(s != 0);
    }
    for (i, sylow) in group.sylow_subgroups().iter().enumerate() {
        for &t in sylow.elements() {
            claim(t, Part::Sylow(i))?;
            counts.sylow += usize::from(t != 0);
        }
    }
    for (i, base) in system.bases().iter().enumerate() {
        for x in quotient_list(group, base) {
            claim(x, Part::Quotients(i))?;
            counts.quotients += 1;
        }
    }
    if let Some(element) = (1..n).find(|&x| owner[x].is_none()) {
        return Err(DesignError::Partition(PartitionFault::Uncovered { element: element as u32 }));
    }
    Ok(counts)
}

/// Condition (P), with (Q) for every base as a prerequisite.
pub fn check_p(system: &HatSystem) -> bool {
    partition_report(system).is_ok()
}

/// What a block of the affine unital was generated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    /// A right coset S·g (long).
    SubgroupCoset,
    /// A right coset T·g of the Sylow subgroup with this index (short).
    SylowCoset(usize),
    /// A right translate D·g of the base with this index (long).
    Arcuate(usize),
}

/// The affine unital U_{S,𝒟}.
#[derive(Debug, Clone)]
pub struct AffineUnital {
    system: HatSystem,
    kinds: Vec<BlockKind>,
    incidence: Incidence,
    duplicate_blocks: usize,
}

/// Builds the block set of U_{S,𝒟}. Fails if (Q) or (P) is violated.
pub fn build_affine_unital(system: &HatSystem) -> Result<AffineUnital, DesignError> {
    partition_report(system)?;
    Ok(build_unchecked(system))
}

fn build_unchecked(system: &HatSystem) -> AffineUnital {
    let group = system.group();
    let n = group.order() as u32;
    let mut blocks = Vec::new();
    let mut kinds = Vec::new();
    let mut seen: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut duplicate_blocks = 0;
    let mut push = |block: Vec<u32>, kind: BlockKind, count_duplicates: bool| {
        if seen.contains_key(&block) {
            if count_duplicates {
                duplicate_blocks += 1;
            }
            return;
        }
        seen.insert(block.clone(), blocks.len());
        blocks.push(block);
        kinds.push(kind);
    };
    for g in 0..n {
        push(translate(group, system.subgroup().elements(), g), BlockKind::SubgroupCoset, false);
    }
    for (i, sylow) in group.sylow_subgroups().iter().enumerate() {
        for g in 0..n {
            push(translate(group, sylow.elements(), g), BlockKind::SylowCoset(i), false);
        }
    }
    for (i, base) in system.bases().iter().enumerate() {
        for g in 0..n {
            push(translate(group, base, g), BlockKind::Arcuate(i), true);
        }
    }
    AffineUnital {
        system: system.clone(),
        kinds,
        incidence: Incidence::new(n as usize, blocks),
        duplicate_blocks,
    }
}

impl AffineUnital {
    pub fn system(&self) -> &HatSystem {
        &self.system
    }

    pub fn group(&self) -> &Arc<SpecialLinearGroup> {
        self.system.group()
    }

    pub fn q(&self) -> usize {
        self.system.q()
    }

    pub fn incidence(&self) -> &Incidence {
        &self.incidence
    }

    pub fn n_points(&self) -> usize {
        self.incidence.n_points()
    }

    pub fn n_blocks(&self) -> usize {
        self.incidence.n_blocks()
    }

    pub fn kind(&self, block: u32) -> BlockKind {
        self.kinds[block as usize]
    }

    pub fn is_short(&self, block: u32) -> bool {
        matches!(self.kinds[block as usize], BlockKind::SylowCoset(_))
    }

    pub fn short_blocks(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.n_blocks() as u32).filter(|&b| self.is_short(b))
    }

    /// Arcuate translates that coincided with an earlier block while building.
    pub fn duplicate_blocks(&self) -> usize {
        self.duplicate_blocks
    }

    /// The blocks through the identity.
    pub fn blocks_through_identity(&self) -> &[u32] {
        self.incidence.blocks_through(0)
    }

    pub fn joining_block(&self, x: u32, y: u32) -> Option<u32> {
        self.incidence.joining_block(x, y)
    }

    /// A copy with one block removed, for exercising the verifier.
    pub fn without_block(&self, block: u32) -> AffineUnital {
        let mut blocks = self.incidence.blocks().to_vec();
        let mut kinds = self.kinds.clone();
        blocks.remove(block as usize);
        kinds.remove(block as usize);
        AffineUnital {
            system: self.system.clone(),
            kinds,
            incidence: Incidence::new(self.n_points(), blocks),
            duplicate_blocks: self.duplicate_blocks,
        }
    }
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    fn push(&mut self, name: &'static str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name, passed, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

pub(crate) fn replication_check(incidence: &Incidence, expected: usize) -> (bool, String) {
    match (0..incidence.n_points() as u32).find(|&p| incidence.blocks_through(p).len() != expected) {
        None => (true, format!("every point on {expected} blocks")),
        Some(p) => (false, format!("point {p} lies on {} blocks, expected {expected}", incidence.blocks_through(p).len())),
    }
}

pub(crate) fn joining_check(incidence: &Incidence) -> (bool, String) {
    let scan = incidence.pair_scan();
    if let Some((x, y)) = scan.multiply_joined {
        (false, format!("points {x} and {y} lie on more than one block"))
    } else if let Some((x, y)) = scan.uncovered {
        (false, format!("points {x} and {y} lie on no common block"))
    } else {
        (true, format!("{} point pairs joined uniquely", scan.pairs))
    }
}

/// Checks (AU1)–(AU5). (AU5) is certified by the flat parallelism.
pub fn verify_affine_unital(unital: &AffineUnital) -> Report {
    let n = unital.q();
    let inc = unital.incidence();
    let mut report = Report::default();

    let points = inc.n_points();
    report.push("AU1", points == n * n * n - n, format!("{points} points"));

    let bad_size = (0..inc.n_blocks() as u32).find(|&b| {
        let len = inc.block(b).len();
        let expected = if unital.is_short(b) { n } else { n + 1 };
        len != expected
    });
    let short = unital.short_blocks().count();
    match bad_size {
        None => report.push(
            "AU2",
            true,
            format!("{} blocks: {} short, {} long", inc.n_blocks(), short, inc.n_blocks() - short),
        ),
        Some(b) => report.push("AU2", false, format!("block {b} has {} points", inc.block(b).len())),
    }

    let (ok, detail) = replication_check(inc, n * n);
    report.push("AU3", ok, detail);

    let (ok, detail) = joining_check(inc);
    report.push("AU4", ok, detail);

    let flat = flat_parallelism(unital);
    match flat.validate(unital) {
        Ok(()) => report.push(
            "AU5",
            true,
            format!("flat parallelism: {} classes of {}", flat.classes().len(), n * n - 1),
        ),
        Err(e) => report.push("AU5", false, e.to_string()),
    }
    report
}
