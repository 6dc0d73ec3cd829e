//! Noncrossing partitions of the `2n` boundary points without singletons.
//!
//! Boundary points are labelled `1..=2n` counterclockwise starting at the
//! bottom-left corner: bottom position `p` (counted from the left) is label
//! `p`, top position `p` is label `2n + 1 - p`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default largest order accepted by [`enumerate_basis`].
pub const DEFAULT_MAX_ENUMERATION_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Bottom,
    Top,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundaryIndex {
    pub side: Side,
    pub position: usize,
}

pub fn boundary_label(side: Side, position: usize, n: usize) -> Result<usize> {
    if position < 1 || position > n {
        return Err(Error::OutOfRange { what: "boundary position", value: position, lo: 1, hi: n });
    }
    Ok(match side {
        Side::Bottom => position,
        Side::Top => 2 * n + 1 - position,
    })
}

/// Inverse of [`boundary_label`].
pub fn boundary_index(label: usize, n: usize) -> Result<BoundaryIndex> {
    if label < 1 || label > 2 * n {
        return Err(Error::OutOfRange { what: "boundary label", value: label, lo: 1, hi: 2 * n });
    }
    Ok(if label <= n {
        BoundaryIndex { side: Side::Bottom, position: label }
    } else {
        BoundaryIndex { side: Side::Top, position: 2 * n + 1 - label }
    })
}

fn check_set_partition(blocks: &[Vec<usize>], n: usize) -> Result<()> {
    let mut seen = vec![false; 2 * n + 1];
    for block in blocks {
        if block.is_empty() {
            return Err(Error::MalformedPartition("empty block".into()));
        }
        for &x in block {
            if x < 1 || x > 2 * n {
                return Err(Error::MalformedPartition(format!("label {x} outside 1..={}", 2 * n)));
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::MalformedPartition(format!("label {x} appears twice")));
            }
        }
    }
    if let Some(missing) = (1..=2 * n).find(|&x| !seen[x]) {
        return Err(Error::MalformedPartition(format!("label {missing} is not covered")));
    }
    Ok(())
}

/// True iff no `a < b < c < d` has `{a, c}` in one block and `{b, d}` in another.
pub fn is_noncrossing(blocks: &[Vec<usize>], n: usize) -> Result<bool> {
    check_set_partition(blocks, n)?;
    Ok(noncrossing_unchecked(blocks, n))
}

fn noncrossing_unchecked(blocks: &[Vec<usize>], n: usize) -> bool {
    let mut owner = vec![0usize; 2 * n + 1];
    let mut last = vec![0usize; blocks.len()];
    for (b, block) in blocks.iter().enumerate() {
        for &x in block {
            owner[x] = b;
        }
        last[b] = *block.iter().max().unwrap();
    }
    // Sweep the circle keeping a stack of blocks that are open.
    let mut open: Vec<usize> = Vec::new();
    let mut started = vec![false; blocks.len()];
    for (x, &b) in owner.iter().enumerate().skip(1) {
        if started[b] {
            if open.last() != Some(&b) {
                return false;
            }
            if last[b] == x {
                open.pop();
            }
        } else {
            started[b] = true;
            if last[b] != x {
                open.push(b);
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    TopIsolated,
    BottomIsolated,
    Crossing,
}

/// A canonical element of `P_{2n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct PartitionRepr {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = PartitionRepr::deserialize(deserializer)?;
        Partition::new(repr.n, repr.blocks).map_err(serde::de::Error::custom)
    }
}

impl Partition {
    /// Validates and canonicalizes `blocks` as an element of `P_{2n}`.
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPartition("order must be positive".into()));
        }
        check_set_partition(&blocks, n)?;
        if let Some(b) = blocks.iter().find(|b| b.len() < 2) {
            return Err(Error::InvalidPartition(format!("singleton block {b:?}")));
        }
        if !noncrossing_unchecked(&blocks, n) {
            return Err(Error::InvalidPartition(format!("crossing partition {blocks:?}")));
        }
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Self { n, blocks })
    }

    pub(crate) fn from_canonical(n: usize, blocks: Vec<Vec<usize>>) -> Self {
        debug_assert!(Partition::new(n, blocks.clone()).is_ok_and(|p| p.blocks == blocks));
        Self { n, blocks }
    }

    /// `n` vertical strands.
    pub fn identity(n: usize) -> Self {
        Self::from_canonical(n, (1..=n).map(|j| vec![j, 2 * n + 1 - j]).collect())
    }

    /// The single block holding every boundary point.
    pub fn full(n: usize) -> Self {
        Self::from_canonical(n, vec![(1..=2 * n).collect()])
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<Vec<usize>> {
        self.blocks
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn block_index_of(&self, label: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&label))
    }

    fn find_block(&self, block: &[usize]) -> Result<usize> {
        let mut sorted = block.to_vec();
        sorted.sort_unstable();
        self.blocks
            .iter()
            .position(|b| *b == sorted)
            .ok_or_else(|| Error::BlockNotInPartition(block.to_vec()))
    }

    /// Positions (ascending) of the block's points on one side.
    pub fn positions(&self, block: &[usize], side: Side) -> Vec<usize> {
        let mut out: Vec<usize> = block
            .iter()
            .filter_map(|&l| boundary_index(l, self.n).ok())
            .filter(|ix| ix.side == side)
            .map(|ix| ix.position)
            .collect();
        out.sort_unstable();
        out
    }

    pub fn classify_block(&self, block: &[usize]) -> Result<BlockKind> {
        let b = &self.blocks[self.find_block(block)?];
        Ok(classify_labels(b, self.n))
    }

    pub fn kind_of(&self, index: usize) -> BlockKind {
        classify_labels(&self.blocks[index], self.n)
    }

    pub fn isolated_count(&self) -> usize {
        (0..self.blocks.len()).filter(|&i| self.kind_of(i) != BlockKind::Crossing).count()
    }

    /// Whether isolated block `a`, together with its side of the rectangle,
    /// encloses block `b` on the same side.
    pub fn covers(&self, a: &[usize], b: &[usize]) -> Result<bool> {
        let ia = self.find_block(a)?;
        let ib = self.find_block(b)?;
        if ia == ib {
            return Err(Error::Misuse("covers: a block cannot cover itself".into()));
        }
        let side = match (self.kind_of(ia), self.kind_of(ib)) {
            (BlockKind::TopIsolated, BlockKind::TopIsolated) => Side::Top,
            (BlockKind::BottomIsolated, BlockKind::BottomIsolated) => Side::Bottom,
            _ => {
                return Err(Error::Misuse(
                    "covers: both blocks must be top-isolated or both bottom-isolated".into(),
                ))
            }
        };
        let pa = self.positions(&self.blocks[ia], side);
        let pb = self.positions(&self.blocks[ib], side);
        let (lo, hi) = (pb[0], *pb.last().unwrap());
        Ok(pa.windows(2).any(|w| w[0] < lo && hi < w[1]))
    }

    /// Places `self` at positions `left + 1 ..= left + m` of an order-`n`
    /// diagram and fills every other position with a vertical strand.
    pub fn embed(&self, n: usize, left: usize) -> Result<Self> {
        let m = self.n;
        if left + m > n {
            return Err(Error::OutOfRange { what: "embedding order", value: n, lo: left + m, hi: usize::MAX });
        }
        let relabel = |l: usize| -> usize {
            let ix = boundary_index(l, m).expect("label of own partition");
            boundary_label(ix.side, ix.position + left, n).expect("position in range")
        };
        let mut blocks: Vec<Vec<usize>> =
            self.blocks.iter().map(|b| b.iter().map(|&l| relabel(l)).collect()).collect();
        for j in (1..=left).chain(left + m + 1..=n) {
            blocks.push(vec![j, 2 * n + 1 - j]);
        }
        Self::new(n, blocks)
    }

    /// Restriction to positions `from ..= from + m - 1` on both sides, relabelled
    /// as an order-`m` partition. Fails unless those positions are closed under
    /// the partition.
    pub fn restrict(&self, from: usize, m: usize) -> Result<Self> {
        let n = self.n;
        let inside = |l: usize| {
            let p = boundary_index(l, n).unwrap().position;
            p >= from && p < from + m
        };
        let mut blocks = Vec::new();
        for b in &self.blocks {
            let hits = b.iter().filter(|&&l| inside(l)).count();
            if hits == 0 {
                continue;
            }
            if hits != b.len() {
                return Err(Error::Internal(format!("block {b:?} straddles the restriction window")));
            }
            blocks.push(
                b.iter()
                    .map(|&l| {
                        let ix = boundary_index(l, n).unwrap();
                        boundary_label(ix.side, ix.position + 1 - from, m).unwrap()
                    })
                    .collect(),
            );
        }
        Self::new(m, blocks)
    }

    /// Merges blocks `i` and `j`; the result must remain noncrossing.
    pub fn merge_blocks(&self, i: usize, j: usize) -> Result<Self> {
        if i == j {
            return Err(Error::Misuse("cannot merge a block with itself".into()));
        }
        let mut blocks = self.blocks.clone();
        let (lo, hi) = (i.min(j), i.max(j));
        let moved = blocks.remove(hi);
        blocks[lo].extend(moved);
        Self::new(self.n, blocks)
    }
}

fn classify_labels(block: &[usize], n: usize) -> BlockKind {
    let top = block.iter().any(|&l| l > n);
    let bottom = block.iter().any(|&l| l <= n);
    match (top, bottom) {
        (true, false) => BlockKind::TopIsolated,
        (false, true) => BlockKind::BottomIsolated,
        _ => BlockKind::Crossing,
    }
}

pub fn classify_block(p: &Partition, block: &[usize]) -> Result<BlockKind> {
    p.classify_block(block)
}

pub fn covers(p: &Partition, a: &[usize], b: &[usize]) -> Result<bool> {
    p.covers(a, b)
}

/// Appends `n - m` vertical strands on the right of an order-`m` partition.
pub fn pad_partition(p: &Partition, n: usize) -> Result<Partition> {
    p.embed(n, 0)
}

pub fn enumerate_basis(n: usize) -> Result<Vec<Partition>> {
    enumerate_basis_capped(n, DEFAULT_MAX_ENUMERATION_ORDER)
}

/// Every element of `P_{2n}` in canonical order.
pub fn enumerate_basis_capped(n: usize, cap: usize) -> Result<Vec<Partition>> {
    if n == 0 {
        return Err(Error::OutOfRange { what: "order", value: 0, lo: 1, hi: cap });
    }
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let mut out = Vec::new();
    let mut blocks = Vec::new();
    extend_partitions(n, &mut vec![(1, 2 * n)], &mut blocks, &mut out);
    out.sort_unstable();
    Ok(out)
}

/// Fills the closed intervals in `pending` with noncrossing blocks of size at
/// least two. The block holding an interval's first point splits the rest of
/// the interval into independent gaps.
fn extend_partitions(
    n: usize,
    pending: &mut Vec<(usize, usize)>,
    blocks: &mut Vec<Vec<usize>>,
    out: &mut Vec<Partition>,
) {
    let Some((lo, hi)) = pending.pop() else {
        let mut canon = blocks.clone();
        for b in &mut canon {
            b.sort_unstable();
        }
        canon.sort_unstable_by_key(|b| b[0]);
        out.push(Partition { n, blocks: canon });
        return;
    };
    if lo < hi {
        let mut block = vec![lo];
        let mut gaps = Vec::new();
        grow_block(n, lo, hi, &mut block, &mut gaps, pending, blocks, out);
    }
    pending.push((lo, hi));
}

#[allow(clippy::too_many_arguments)]
fn grow_block(
    n: usize,
    prev: usize,
    hi: usize,
    block: &mut Vec<usize>,
    gaps: &mut Vec<(usize, usize)>,
    pending: &mut Vec<(usize, usize)>,
    blocks: &mut Vec<Vec<usize>>,
    out: &mut Vec<Partition>,
) {
    for x in prev + 1..=hi {
        let gap = x - prev - 1;
        if gap == 1 {
            continue;
        }
        if gap > 0 {
            gaps.push((prev + 1, x - 1));
        }
        block.push(x);

        let rest = hi - x;
        if rest != 1 {
            let saved = pending.len();
            pending.extend(gaps.iter().copied());
            if rest > 0 {
                pending.push((x + 1, hi));
            }
            blocks.push(block.clone());
            extend_partitions(n, pending, blocks, out);
            blocks.pop();
            pending.truncate(saved);
        }
        grow_block(n, x, hi, block, gaps, pending, blocks, out);

        block.pop();
        if gap > 0 {
            gaps.pop();
        }
    }
}

/// Riordan number `R_k` with `R_0 = 1`, `R_1 = 0` and
/// `(k + 1) R_k = (k - 1)(2 R_{k-1} + 3 R_{k-2})`.
pub fn riordan(k: usize) -> Result<BigUint> {
    Ok(riordan_sequence(k)?.pop().expect("nonempty sequence"))
}

/// `R_0 ..= R_k`.
pub fn riordan_sequence(k: usize) -> Result<Vec<BigUint>> {
    let mut seq = vec![BigUint::one(), BigUint::zero()];
    for m in 2..=k {
        let rhs = BigUint::from(m - 1) * (BigUint::from(2u32) * &seq[m - 1] + BigUint::from(3u32) * &seq[m - 2]);
        let (q, r) = rhs.div_rem(&BigUint::from(m + 1));
        if !r.is_zero() {
            return Err(Error::Internal(format!("Riordan recurrence division inexact at k = {m}")));
        }
        seq.push(q);
    }
    seq.truncate(k + 1);
    Ok(seq)
}
