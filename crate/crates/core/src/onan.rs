//! O'Nan configurations: four distinct blocks pairwise meeting in six
//! distinct points.
//!
//! Any two blocks of a configuration meet in one of its points, so a
//! configuration through p is seen exactly once as a pencil (B₁, B₂) through
//! p completed by a pair B₃, B₄ of blocks that join a point of B₁∖{p} to a
//! point of B₂∖{p}. Enumeration order: block pairs through the anchor in
//! order of `blocks_through`, then x ∈ B₁, y ∈ B₂ in block order, then
//! pairs of joining blocks in that order.

use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::design::Incidence;

/// Blocks B₁..B₄ and points a = B₁∩B₂, x = B₁∩B₃, y = B₂∩B₃, x' = B₁∩B₄,
/// y' = B₂∩B₄, d = B₃∩B₄.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OnanConfig {
    pub blocks: [u32; 4],
    pub points: [u32; 6],
}

const PATTERN: [(usize, usize); 6] = [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)];

impl OnanConfig {
    /// Relabels points and blocks, e.g. by an automorphism.
    pub fn map(&self, point: impl Fn(u32) -> u32, block: impl Fn(u32) -> u32) -> OnanConfig {
        OnanConfig { blocks: self.blocks.map(block), points: self.points.map(point) }
    }
}

/// Checks distinctness and that the i-th point is the meet of the i-th block
/// pair of the pattern (and lies on no other block of the configuration).
pub fn verify_config(inc: &Incidence, cfg: &OnanConfig) -> bool {
    let distinct = |xs: &[u32]| (0..xs.len()).all(|i| xs[i + 1..].iter().all(|y| *y != xs[i]));
    if !distinct(&cfg.blocks) || !distinct(&cfg.points) {
        return false;
    }
    if cfg.blocks.iter().any(|&b| b as usize >= inc.n_blocks()) || cfg.points.iter().any(|&p| p as usize >= inc.n_points()) {
        return false;
    }
    PATTERN.iter().zip(&cfg.points).all(|(&(i, j), &p)| {
        (0..4).all(|k| inc.contains(cfg.blocks[k], p) == (k == i || k == j))
    })
}

/// Looks up explicit block point sets and builds the configuration.
pub fn config_from_sets(inc: &Incidence, blocks: [&[u32]; 4], points: [u32; 6]) -> Option<OnanConfig> {
    let mut ids = [0; 4];
    for (id, block) in ids.iter_mut().zip(blocks) {
        let mut sorted = block.to_vec();
        sorted.sort_unstable();
        *id = inc.block_id(&sorted)?;
    }
    Some(OnanConfig { blocks: ids, points })
}

/// Result of a counting run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OnanCount {
    pub count: u64,
    pub steps: u64,
    /// false if the budget ran out first
    pub complete: bool,
}

/// Visits every configuration containing `anchor`, as B₁∩B₂. Each step is
/// one join lookup or one candidate pair; `budget` bounds the steps.
fn scan_anchor<B>(
    inc: &Incidence,
    anchor: u32,
    budget: Option<u64>,
    steps: &mut u64,
    mut visit: impl FnMut(OnanConfig) -> ControlFlow<B>,
) -> Option<ControlFlow<B>> {
    let through = inc.blocks_through(anchor);
    let mut joins: Vec<(u32, u32, u32)> = Vec::new();
    for (i, &b1) in through.iter().enumerate() {
        for &b2 in &through[i + 1..] {
            joins.clear();
            for &x in inc.block(b1).iter().filter(|&&x| x != anchor) {
                for &y in inc.block(b2).iter().filter(|&&y| y != anchor) {
                    *steps += 1;
                    if let Some(b) = inc.joining_block(x, y) {
                        joins.push((b, x, y));
                    }
                }
            }
            for (k, &(b3, x, y)) in joins.iter().enumerate() {
                for &(b4, x2, y2) in &joins[k + 1..] {
                    *steps += 1;
                    if x == x2 || y == y2 {
                        continue;
                    }
                    let Some(d) = inc.intersection(b3, b4) else {
                        continue;
                    };
                    let cfg = OnanConfig { blocks: [b1, b2, b3, b4], points: [anchor, x, y, x2, y2, d] };
                    if let ControlFlow::Break(v) = visit(cfg) {
                        return Some(ControlFlow::Break(v));
                    }
                }
                if budget.is_some_and(|limit| *steps > limit) {
                    return None;
                }
            }
        }
    }
    Some(ControlFlow::Continue(()))
}

/// Number of configurations whose six points include `point`.
pub fn count_onan_through(inc: &Incidence, point: u32, budget: Option<u64>) -> OnanCount {
    let mut steps = 0;
    let mut count = 0;
    let done = scan_anchor::<()>(inc, point, budget, &mut steps, |_| {
        count += 1;
        ControlFlow::Continue(())
    });
    OnanCount { count, steps, complete: done.is_some() }
}

/// The first configuration through `point` in enumeration order.
pub fn find_onan_through(inc: &Incidence, point: u32) -> Option<OnanConfig> {
    let mut steps = 0;
    match scan_anchor(inc, point, None, &mut steps, ControlFlow::Break) {
        Some(ControlFlow::Break(cfg)) => Some(cfg),
        _ => None,
    }
}

/// Scans every point as anchor; returns the configuration found at the
/// smallest anchor.
pub fn find_onan(inc: &Incidence) -> Option<OnanConfig> {
    (0..inc.n_points() as u32).into_par_iter().find_map_first(|a| find_onan_through(inc, a))
}

/// Exhaustive existence test over all anchors.
pub fn contains_onan(inc: &Incidence) -> bool {
    find_onan(inc).is_some()
}

/// Existence test for a structure whose automorphism group is transitive on
/// points (e.g. an affine SL(2,q)-unital): anchoring at one point suffices.
pub fn contains_onan_transitive(inc: &Incidence) -> bool {
    find_onan_through(inc, 0).is_some()
}
