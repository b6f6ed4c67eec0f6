use std::collections::HashMap;

/// Sentinel in the joining table for "no block through both points".
const NONE: u32 = u32::MAX;

/// Above this many points the n² joining table is not materialized.
const JOIN_TABLE_LIMIT: usize = 8192;

/// A finite incidence structure with points `0..n` and blocks given as sorted
/// point lists. Precomputes point-to-block lists, per-block bitsets and the
/// table of joining blocks.
#[derive(Debug, Clone)]
pub struct Incidence {
    n_points: usize,
    blocks: Vec<Vec<u32>>,
    point_blocks: Vec<Vec<u32>>,
    lookup: HashMap<Vec<u32>, u32>,
    words: usize,
    bits: Vec<u64>,
    join: Option<Vec<u32>>,
    multiply_joined: Option<(u32, u32)>,
}

impl Incidence {
    /// Blocks must already be sorted and duplicate-free point lists.
    pub fn new(n_points: usize, blocks: Vec<Vec<u32>>) -> Self {
        let words = n_points.div_ceil(64);
        let mut point_blocks = vec![Vec::new(); n_points];
        let mut bits = vec![0u64; words * blocks.len()];
        let mut lookup = HashMap::with_capacity(blocks.len());
        let table = n_points <= JOIN_TABLE_LIMIT;
        let mut join = if table { vec![NONE; n_points * n_points] } else { Vec::new() };
        let mut multiply_joined = None;
        for (id, block) in blocks.iter().enumerate() {
            let id = id as u32;
            debug_assert!(block.windows(2).all(|w| w[0] < w[1]));
            lookup.entry(block.clone()).or_insert(id);
            for (i, &x) in block.iter().enumerate() {
                point_blocks[x as usize].push(id);
                bits[id as usize * words + x as usize / 64] |= 1 << (x % 64);
                if !table {
                    continue;
                }
                for &y in &block[i + 1..] {
                    let slot = &mut join[x as usize * n_points + y as usize];
                    if *slot != NONE && multiply_joined.is_none() {
                        multiply_joined = Some((x, y));
                    }
                    *slot = id;
                    join[y as usize * n_points + x as usize] = id;
                }
            }
        }
        let mut incidence = Incidence {
            n_points,
            blocks,
            point_blocks,
            lookup,
            words,
            bits,
            join: table.then_some(join),
            multiply_joined,
        };
        if !table {
            incidence.multiply_joined = incidence.find_multiply_joined();
        }
        incidence
    }

    fn find_multiply_joined(&self) -> Option<(u32, u32)> {
        let mut seen = vec![u32::MAX; self.n_points];
        for x in 0..self.n_points as u32 {
            for &b in self.blocks_through(x) {
                for &y in self.block(b) {
                    if y > x {
                        if seen[y as usize] == x {
                            return Some((x, y));
                        }
                        seen[y as usize] = x;
                    }
                }
            }
        }
        None
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn block(&self, id: u32) -> &[u32] {
        &self.blocks[id as usize]
    }

    pub fn blocks_through(&self, point: u32) -> &[u32] {
        &self.point_blocks[point as usize]
    }

    /// Id of the block with exactly this (sorted) point set.
    pub fn block_id(&self, points: &[u32]) -> Option<u32> {
        self.lookup.get(points).copied()
    }

    pub fn contains(&self, block: u32, point: u32) -> bool {
        self.bits[block as usize * self.words + point as usize / 64] >> (point % 64) & 1 == 1
    }

    fn block_bits(&self, block: u32) -> &[u64] {
        let start = block as usize * self.words;
        &self.bits[start..start + self.words]
    }

    /// The smallest common point of two blocks.
    pub fn intersection(&self, a: u32, b: u32) -> Option<u32> {
        self.block_bits(a)
            .iter()
            .zip(self.block_bits(b))
            .enumerate()
            .find_map(|(w, (x, y))| {
                let common = x & y;
                (common != 0).then(|| w as u32 * 64 + common.trailing_zeros())
            })
    }

    /// Number of common points of two blocks.
    pub fn meet_count(&self, a: u32, b: u32) -> u32 {
        self.block_bits(a).iter().zip(self.block_bits(b)).map(|(x, y)| (x & y).count_ones()).sum()
    }

    /// The block through two distinct points, if any. When several blocks
    /// contain both, the one with the largest id is returned.
    pub fn joining_block(&self, x: u32, y: u32) -> Option<u32> {
        if x == y {
            return None;
        }
        match &self.join {
            Some(join) => {
                let id = join[x as usize * self.n_points + y as usize];
                (id != NONE).then_some(id)
            }
            None => self.blocks_through(x).iter().rev().copied().find(|&b| self.contains(b, y)),
        }
    }

    /// Scans all point pairs: returns the number of pairs examined together
    /// with the first pair on two or more blocks and the first pair on none.
    pub fn pair_scan(&self) -> PairScan {
        let n = self.n_points as u32;
        let mut uncovered = None;
        'outer: for x in 0..n {
            for y in x + 1..n {
                if self.joining_block(x, y).is_none() {
                    uncovered = Some((x, y));
                    break 'outer;
                }
            }
        }
        PairScan {
            pairs: self.n_points * self.n_points.saturating_sub(1) / 2,
            multiply_joined: self.multiply_joined,
            uncovered,
        }
    }

    /// Sum of block sizes, i.e. the number of flags.
    pub fn flag_count(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }
}

/// Outcome of the unique-joining scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairScan {
    pub pairs: usize,
    pub multiply_joined: Option<(u32, u32)>,
    pub uncovered: Option<(u32, u32)>,
}

impl PairScan {
    pub fn unique_joining(&self) -> bool {
        self.multiply_joined.is_none() && self.uncovered.is_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fano() -> Incidence {
        let lines = [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]];
        Incidence::new(7, lines.iter().map(|l| l.to_vec()).collect())
    }

    #[test]
    fn fano_plane_is_linear() {
        let fano = fano();
        let scan = fano.pair_scan();
        assert_eq!(scan.pairs, 21);
        assert!(scan.unique_joining());
        assert_eq!(fano.joining_block(3, 5), Some(3));
        assert_eq!(fano.intersection(0, 1), Some(0));
        assert_eq!(fano.meet_count(3, 4), 1);
        assert_eq!(fano.block_id(&[2, 4, 5]), Some(6));
        assert_eq!(fano.flag_count(), 21);
    }

    #[test]
    fn scan_reports_witnesses() {
        let partial = Incidence::new(4, vec![vec![0, 1, 2], vec![1, 2, 3]]);
        let scan = partial.pair_scan();
        assert_eq!(scan.multiply_joined, Some((1, 2)));
        assert_eq!(scan.uncovered, Some((0, 3)));
        assert_eq!(partial.intersection(0, 1), Some(1));
    }
}
