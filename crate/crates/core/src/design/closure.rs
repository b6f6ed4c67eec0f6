use std::collections::HashMap;
use std::fmt;

use super::{joining_check, replication_check, AffineUnital, DesignError, Incidence, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParallelismKind {
    /// Right cosets T·g grouped by the Sylow subgroup T.
    Flat,
    /// Left cosets g·T grouped by T; the right coset T·g = g·T^g goes to T^g.
    Natural,
    Custom,
}

impl ParallelismKind {
    pub fn name(self) -> &'static str {
        match self {
            ParallelismKind::Flat => "flat",
            ParallelismKind::Natural => "natural",
            ParallelismKind::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "flat" => Some(ParallelismKind::Flat),
            "natural" => Some(ParallelismKind::Natural),
            _ => None,
        }
    }
}

impl fmt::Display for ParallelismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A partition of the short blocks into parallel classes. Blocks are ids in
/// the affine unital the parallelism was built for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parallelism {
    kind: ParallelismKind,
    classes: Vec<Vec<u32>>,
    class_of: HashMap<u32, usize>,
}

impl Parallelism {
    pub fn from_classes(kind: ParallelismKind, classes: Vec<Vec<u32>>) -> Self {
        let mut class_of = HashMap::new();
        for (i, class) in classes.iter().enumerate() {
            for &b in class {
                class_of.entry(b).or_insert(i);
            }
        }
        Parallelism { kind, classes, class_of }
    }

    pub fn kind(&self) -> ParallelismKind {
        self.kind
    }

    pub fn classes(&self) -> &[Vec<u32>] {
        &self.classes
    }

    pub fn class_of(&self, block: u32) -> Option<usize> {
        self.class_of.get(&block).copied()
    }

    /// Checks that the classes partition the short blocks of `unital` into
    /// q+1 classes of q²−1 pairwise disjoint blocks.
    pub fn validate(&self, unital: &AffineUnital) -> Result<(), DesignError> {
        let q = unital.q();
        let inc = unital.incidence();
        if self.classes.len() != q + 1 {
            return Err(DesignError::InvalidParallelism {
                class: self.classes.len(),
                reason: format!("{} classes, expected {}", self.classes.len(), q + 1),
            });
        }
        let mut seen = vec![false; inc.n_blocks()];
        for (i, class) in self.classes.iter().enumerate() {
            let fail = |reason: String| DesignError::InvalidParallelism { class: i, reason };
            if class.len() != q * q - 1 {
                return Err(fail(format!("{} blocks, expected {}", class.len(), q * q - 1)));
            }
            let mut covered = vec![false; inc.n_points()];
            for &b in class {
                if b as usize >= inc.n_blocks() || !unital.is_short(b) {
                    return Err(fail(format!("block {b} is not a short block")));
                }
                if std::mem::replace(&mut seen[b as usize], true) {
                    return Err(fail(format!("block {b} appears in more than one class")));
                }
                for &p in inc.block(b) {
                    if std::mem::replace(&mut covered[p as usize], true) {
                        return Err(fail(format!("blocks meet in point {p}")));
                    }
                }
            }
        }
        if let Some(b) = unital.short_blocks().find(|&b| !seen[b as usize]) {
            return Err(DesignError::InvalidParallelism {
                class: self.classes.len(),
                reason: format!("short block {b} is in no class"),
            });
        }
        Ok(())
    }
}

fn coset_parallelism(unital: &AffineUnital, kind: ParallelismKind) -> Parallelism {
    let group = unital.group();
    let sylows = group.sylow_subgroups();
    let index: HashMap<&[u32], usize> =
        sylows.iter().enumerate().map(|(i, s)| (s.elements(), i)).collect();
    let mut classes = vec![Vec::new(); sylows.len()];
    for b in unital.short_blocks() {
        let block = unital.incidence().block(b);
        let b0 = block[0];
        let b0_inv = group.inv(b0);
        // T·g = {x·b0⁻¹} b0 = b0 {b0⁻¹·x}
        let mut sub: Vec<u32> = match kind {
            ParallelismKind::Natural => block.iter().map(|&x| group.mul(b0_inv, x)).collect(),
            _ => block.iter().map(|&x| group.mul(x, b0_inv)).collect(),
        };
        sub.sort_unstable();
        let class = index[sub.as_slice()];
        classes[class].push(b);
    }
    Parallelism::from_classes(kind, classes)
}

/// ♭: the short block T·g lies in the class of T.
pub fn flat_parallelism(unital: &AffineUnital) -> Parallelism {
    coset_parallelism(unital, ParallelismKind::Flat)
}

/// ♮: the short block T·g = g·T^g lies in the class of T^g.
pub fn natural_parallelism(unital: &AffineUnital) -> Parallelism {
    coset_parallelism(unital, ParallelismKind::Natural)
}

/// The π-closure: one ideal point per parallel class, added to every short
/// block of that class, and the block [∞] of all ideal points. Affine block
/// ids are kept; [∞] is the last block.
#[derive(Debug, Clone)]
pub struct ClosedUnital {
    q: usize,
    affine_points: usize,
    incidence: Incidence,
    parallelism: Parallelism,
}

pub fn close(unital: &AffineUnital, parallelism: &Parallelism) -> Result<ClosedUnital, DesignError> {
    parallelism.validate(unital)?;
    let n = unital.n_points() as u32;
    let inc = unital.incidence();
    let mut blocks: Vec<Vec<u32>> = (0..inc.n_blocks() as u32)
        .map(|b| {
            let mut block = inc.block(b).to_vec();
            if let Some(class) = parallelism.class_of(b) {
                block.push(n + class as u32);
            }
            block
        })
        .collect();
    let classes = parallelism.classes().len() as u32;
    blocks.push((n..n + classes).collect());
    Ok(ClosedUnital {
        q: unital.q(),
        affine_points: n as usize,
        incidence: Incidence::new((n + classes) as usize, blocks),
        parallelism: parallelism.clone(),
    })
}

impl ClosedUnital {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn incidence(&self) -> &Incidence {
        &self.incidence
    }

    pub fn parallelism(&self) -> &Parallelism {
        &self.parallelism
    }

    pub fn affine_points(&self) -> usize {
        self.affine_points
    }

    pub fn ideal_point(&self, class: usize) -> u32 {
        (self.affine_points + class) as u32
    }

    /// Block id of [∞].
    pub fn infinity(&self) -> u32 {
        self.incidence.n_blocks() as u32 - 1
    }

    /// Removes [∞] and the ideal points again.
    pub fn affine_part(&self) -> Incidence {
        let n = self.affine_points as u32;
        let blocks = self.incidence.blocks()[..self.infinity() as usize]
            .iter()
            .map(|b| b.iter().copied().filter(|&p| p < n).collect())
            .collect();
        Incidence::new(self.affine_points, blocks)
    }
}

/// Checks the 2-(n³+1, n+1, 1) parameters of an incidence structure.
pub fn verify_unital_incidence(inc: &Incidence, n: usize) -> Report {
    let mut report = Report::default();
    let v = n * n * n + 1;
    report.push("points", inc.n_points() == v, format!("{} points, expected {v}", inc.n_points()));
    match (0..inc.n_blocks() as u32).find(|&b| inc.block(b).len() != n + 1) {
        None => report.push("block size", true, format!("{} blocks of size {}", inc.n_blocks(), n + 1)),
        Some(b) => report.push("block size", false, format!("block {b} has {} points", inc.block(b).len())),
    }
    let (ok, detail) = replication_check(inc, n * n);
    report.push("replication", ok, detail);
    let (ok, detail) = joining_check(inc);
    report.push("lambda", ok, detail);
    report
}

pub fn verify_design(closed: &ClosedUnital) -> Report {
    verify_unital_incidence(closed.incidence(), closed.q())
}
