//! Homogeneous blocks and the COMBINE step.
//!
//! A block is a set of input positions known to hold the same (unknown)
//! value. Comparing representatives of two blocks either merges them or
//! cancels `min(|R|, |S|)` bits from each side; cancelled bits never change
//! the majority of what remains.

use std::fmt;

use crate::oracle::{BudgetExhausted, CountingOracle};

/// Nonempty set of input positions, kept sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    indices: Vec<usize>,
}

impl Block {
    pub fn singleton(i: usize) -> Self {
        Block { indices: vec![i] }
    }

    pub fn from_indices(mut indices: Vec<usize>) -> Self {
        assert!(!indices.is_empty(), "blocks are nonempty");
        indices.sort_unstable();
        indices.dedup();
        Block { indices }
    }

    pub fn size(&self) -> usize {
        self.indices.len()
    }

    /// The position queried on behalf of the block: its smallest index.
    pub fn representative(&self) -> usize {
        self.indices[0]
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    fn absorb(&mut self, other: Block) {
        self.indices.extend(other.indices);
        self.indices.sort_unstable();
    }

    /// Drops the `count` largest indices.
    fn shed(&mut self, count: usize) {
        debug_assert!(count < self.indices.len());
        self.indices.truncate(self.indices.len() - count);
    }
}

/// Which structural invariant a list is expected to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockMode {
    /// Every block a power of two, at most one block of each size below
    /// `2^(phase-1)`.
    Oblivious { phase: u32 },
    /// Every block after the first a power of two; exponents nonincreasing.
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvariantViolation {
    EmptyBlock(usize),
    Overlap(usize),
    OutOfRange(usize),
    SizesIncrease(usize),
    NotPowerOfTwo(usize),
    DuplicateSmallSize(usize),
    ExponentsIncrease(usize),
}

impl fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Ordered collection `(S_1, ..., S_l)` of disjoint homogeneous blocks.
///
/// Positions in the public API are 1-based to match the usual `S_1` naming.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BlockList {
    blocks: Vec<Block>,
}

impl BlockList {
    /// One singleton block per input position.
    pub fn singletons(n: usize) -> Self {
        BlockList {
            blocks: (0..n).map(Block::singleton).collect(),
        }
    }

    pub fn from_blocks(blocks: Vec<Block>) -> Self {
        BlockList { blocks }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Size of `S_pos` (1-based).
    pub fn size(&self, pos: usize) -> usize {
        self.blocks[pos - 1].size()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Block::size).collect()
    }

    pub fn first(&self) -> Option<&Block> {
        self.blocks.first()
    }

    pub fn total_size(&self) -> usize {
        self.blocks.iter().map(Block::size).sum()
    }

    /// `s_1` is the 2-adic valuation of `|S_1|`; `s_j = log2 |S_j|` for
    /// `j >= 2` (those sizes are powers of two in greedy mode).
    pub fn s_exponents(&self) -> Vec<u32> {
        self.blocks
            .iter()
            .enumerate()
            .map(|(j, b)| {
                if j == 0 {
                    b.size().trailing_zeros()
                } else {
                    b.size().ilog2()
                }
            })
            .collect()
    }

    /// Position 1 when `|S_1|` exceeds the combined size of all other blocks.
    /// With nonincreasing sizes no other block can dominate.
    pub fn dominant_block(&self) -> Option<usize> {
        let first = self.blocks.first()?.size();
        let rest: usize = self.blocks[1..].iter().map(Block::size).sum();
        (first > rest).then_some(1)
    }

    fn compare(&self, pos: usize, oracle: &mut CountingOracle<'_>) -> Result<bool, BudgetExhausted> {
        let a = self.blocks[pos - 1].representative();
        let b = self.blocks[pos].representative();
        oracle.query_xor(a, b).map_err(|e| e.expect_budget())
    }

    /// COMBINE for two blocks of equal size at positions `pos`, `pos+1`:
    /// merge in place on equal values, remove both otherwise.
    pub fn combine_equal(
        &mut self,
        pos: usize,
        oracle: &mut CountingOracle<'_>,
    ) -> Result<(), BudgetExhausted> {
        assert!(
            pos >= 1 && pos < self.blocks.len(),
            "combine position {pos} out of range for {} blocks",
            self.blocks.len()
        );
        assert_eq!(
            self.size(pos),
            self.size(pos + 1),
            "combine_equal on blocks of unequal size"
        );
        let differ = self.compare(pos, oracle)?;
        if differ {
            self.blocks.drain(pos - 1..=pos);
        } else {
            self.merge(pos);
        }
        Ok(())
    }

    /// COMBINE allowing `|S_pos| > |S_pos+1|`: on unequal values the smaller
    /// block is removed along with as many bits of the larger one.
    pub fn combine_general(
        &mut self,
        pos: usize,
        oracle: &mut CountingOracle<'_>,
    ) -> Result<(), BudgetExhausted> {
        assert!(
            pos >= 1 && pos < self.blocks.len(),
            "combine position {pos} out of range for {} blocks",
            self.blocks.len()
        );
        let differ = self.compare(pos, oracle)?;
        if !differ {
            self.merge(pos);
        } else {
            let (big, small) = (self.size(pos), self.size(pos + 1));
            if big > small {
                self.blocks[pos - 1].shed(small);
                self.blocks.remove(pos);
            } else {
                self.blocks.drain(pos - 1..=pos);
            }
        }
        debug_assert!(self.sizes().windows(2).all(|w| w[0] >= w[1]));
        Ok(())
    }

    fn merge(&mut self, pos: usize) {
        let absorbed = self.blocks.remove(pos);
        self.blocks[pos - 1].absorb(absorbed);
        if pos >= 2 {
            assert!(
                self.size(pos - 1) >= self.size(pos),
                "merged block outgrew its predecessor"
            );
        }
    }

    /// Checks disjointness, range, ordering, and the mode's shape rules.
    pub fn check_invariants(&self, n: usize, mode: BlockMode) -> Result<(), InvariantViolation> {
        let mut seen = vec![false; n];
        for (j, b) in self.blocks.iter().enumerate() {
            if b.indices.is_empty() {
                return Err(InvariantViolation::EmptyBlock(j + 1));
            }
            for &i in &b.indices {
                if i >= n {
                    return Err(InvariantViolation::OutOfRange(j + 1));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(InvariantViolation::Overlap(j + 1));
                }
            }
        }
        let sizes = self.sizes();
        if let Some(j) = sizes.windows(2).position(|w| w[0] < w[1]) {
            return Err(InvariantViolation::SizesIncrease(j + 2));
        }
        match mode {
            BlockMode::Oblivious { phase } => {
                if let Some(j) = sizes.iter().position(|s| !s.is_power_of_two()) {
                    return Err(InvariantViolation::NotPowerOfTwo(j + 1));
                }
                let small = 1usize << phase.saturating_sub(1);
                if let Some(j) = sizes
                    .windows(2)
                    .position(|w| w[0] == w[1] && w[0] < small)
                {
                    return Err(InvariantViolation::DuplicateSmallSize(j + 1));
                }
            }
            BlockMode::Greedy => {
                if let Some(j) = sizes.iter().skip(1).position(|s| !s.is_power_of_two()) {
                    return Err(InvariantViolation::NotPowerOfTwo(j + 2));
                }
                let s = self.s_exponents();
                if let Some(j) = s.windows(2).position(|w| w[0] < w[1]) {
                    return Err(InvariantViolation::ExponentsIncrease(j + 2));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::BitString;

    fn list(blocks: &[&[usize]]) -> BlockList {
        BlockList::from_blocks(blocks.iter().map(|b| Block::from_indices(b.to_vec())).collect())
    }

    fn run_equal(mut s: BlockList, x: &str) -> (BlockList, u64) {
        let x: BitString = x.parse().unwrap();
        let mut o = CountingOracle::new(&x);
        s.combine_equal(1, &mut o).unwrap();
        (s, o.ledger().xor_queries)
    }

    fn run_general(mut s: BlockList, x: &str) -> (BlockList, u64) {
        let x: BitString = x.parse().unwrap();
        let mut o = CountingOracle::new(&x);
        s.combine_general(1, &mut o).unwrap();
        (s, o.ledger().xor_queries)
    }

    #[test]
    fn combine_equal_examples() {
        assert_eq!(run_equal(list(&[&[0], &[1]]), "11"), (list(&[&[0, 1]]), 1));
        assert_eq!(run_equal(list(&[&[0], &[1]]), "10"), (list(&[]), 1));
        assert_eq!(
            run_equal(list(&[&[0, 1], &[2, 3]]), "1111"),
            (list(&[&[0, 1, 2, 3]]), 1)
        );
    }

    #[test]
    #[should_panic(expected = "unequal size")]
    fn combine_equal_rejects_unequal() {
        run_equal(list(&[&[0, 1], &[2]]), "111");
    }

    #[test]
    fn combine_general_examples() {
        assert_eq!(
            run_general(list(&[&[0, 1, 2, 3], &[4]]), "11110"),
            (list(&[&[0, 1, 2]]), 1)
        );
        assert_eq!(run_general(list(&[&[0, 1], &[2]]), "111"), (list(&[&[0, 1, 2]]), 1));
        assert_eq!(run_general(list(&[&[0], &[1]]), "01"), (list(&[]), 1));
    }

    #[test]
    fn dominance() {
        let sized = |sizes: &[usize]| {
            let mut next = 0;
            BlockList::from_blocks(
                sizes
                    .iter()
                    .map(|&s| {
                        let b = Block::from_indices((next..next + s).collect());
                        next += s;
                        b
                    })
                    .collect(),
            )
        };
        assert_eq!(sized(&[4, 1, 1]).dominant_block(), Some(1));
        assert_eq!(sized(&[4, 2, 2]).dominant_block(), None);
        assert_eq!(sized(&[]).dominant_block(), None);
    }

    #[test]
    fn exponents() {
        let s = list(&[&[0, 1, 2, 3, 4, 5], &[6, 7], &[8]]);
        assert_eq!(s.s_exponents(), vec![1, 1, 0]);
        assert_eq!(s.check_invariants(9, BlockMode::Greedy), Ok(()));
        assert_eq!(
            s.check_invariants(9, BlockMode::Oblivious { phase: 1 }),
            Err(InvariantViolation::NotPowerOfTwo(1))
        );
        let overlapping = list(&[&[0, 1], &[1]]);
        assert_eq!(
            overlapping.check_invariants(2, BlockMode::Greedy),
            Err(InvariantViolation::Overlap(2))
        );
    }

    /// Every bit outside the surviving blocks was cancelled against an
    /// opposite bit, so the weighted majority of the survivors matches the
    /// whole input.
    #[test]
    fn cancellation_preserves_majority_exhaustively() {
        use crate::oracle::MajorityMode;
        for n in 0..=10usize {
            for mask in 0..(1u64 << n) {
                let x = BitString::from_mask(mask, n);
                let mut o = CountingOracle::new(&x);
                let mut s = BlockList::singletons(n);
                while s.len() >= 2 {
                    s.combine_general(1, &mut o).unwrap();
                    assert_eq!(s.check_invariants(n, BlockMode::Greedy), Ok(()));
                }
                let ones: usize = s
                    .blocks()
                    .iter()
                    .filter(|b| x.bit(b.representative()))
                    .map(Block::size)
                    .sum();
                let zeros = s.total_size() - ones;
                assert_eq!(
                    crate::oracle::MajorityLabel::from_counts(ones, zeros, MajorityMode::Strong),
                    x.majority(MajorityMode::Strong),
                    "{x}"
                );
            }
        }
    }
}
