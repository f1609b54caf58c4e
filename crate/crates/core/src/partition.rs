//! Set partitions of `{0, .., n-1}` ordered by refinement.
//!
//! `sigma.refines(pi)` means every block of `sigma` lies inside a block of
//! `pi` (sigma is finer, "thinner"). The same orientation is used everywhere
//! in the crate: `P(C ⪰ pi)` is the probability that the cluster partition
//! refines `pi`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// `Bell(10)`, the default bound on how many partitions an enumeration may yield.
pub const DEFAULT_ENUMERATION_CAP: u128 = 115_975;

/// Bell numbers `B(0..=n)`, `None` past the point where they overflow `u128`.
pub fn bell(n: usize) -> Option<u128> {
    // Bell triangle: each row starts with the last entry of the previous one.
    let mut row: Vec<u128> = vec![1];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last()?);
        for &x in &row {
            let last = *next.last()?;
            next.push(last.checked_add(x)?);
        }
        row = next;
    }
    row.first().copied()
}

/// A set partition in canonical form: blocks sorted internally and ordered by
/// their smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    ground_size: usize,
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    pub fn from_blocks(ground_size: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut labels = vec![usize::MAX; ground_size];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &x in block {
                if x >= ground_size {
                    return Err(Error::VertexOutOfRange { vertex: x, n: ground_size });
                }
                if labels[x] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("vertex {x} in two blocks")));
                }
                labels[x] = b;
            }
        }
        if let Some(x) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidPartition(format!("vertex {x} not covered")));
        }
        Ok(Self::from_labels(&labels))
    }

    /// Builds the partition whose blocks are the level sets of `labels`.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut relabel = std::collections::HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = Vec::with_capacity(labels.len());
        for (x, &l) in labels.iter().enumerate() {
            let b = *relabel.entry(l).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(x);
            block_of.push(b);
        }
        Partition {
            ground_size: labels.len(),
            blocks,
            block_of,
        }
    }

    /// Builds from labels already in restricted-growth form (first occurrences
    /// of block ids appear in increasing order), skipping the hash map.
    fn from_rgs(rgs: &[usize]) -> Self {
        let count = rgs.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        for (x, &b) in rgs.iter().enumerate() {
            blocks[b].push(x);
        }
        Partition {
            ground_size: rgs.len(),
            blocks,
            block_of: rgs.to_vec(),
        }
    }

    /// All singletons.
    pub fn finest(n: usize) -> Self {
        Self::from_rgs(&(0..n).collect::<Vec<_>>())
    }

    /// The single block `{X}`.
    pub fn coarsest(n: usize) -> Self {
        Self::from_rgs(&vec![0; n])
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    /// Number of non-empty blocks, `|pi|`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// `self ⪰ other`: every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> Result<bool> {
        if self.ground_size != other.ground_size {
            return Err(Error::GroundSizeMismatch(self.ground_size, other.ground_size));
        }
        Ok(self.blocks.iter().all(|block| {
            let target = other.block_of[block[0]];
            block.iter().all(|&x| other.block_of[x] == target)
        }))
    }

    /// `pi_{|A}`: the partition of `subset` cut out by the blocks of `self`.
    ///
    /// The result is expressed on `{0, .., |A|-1}`, vertex `i` standing for the
    /// `i`-th smallest element of `subset`; [`Partition::restrict_blocks`]
    /// keeps the original labels.
    pub fn restrict(&self, subset: &[usize]) -> Result<Partition> {
        let sorted = self.sorted_subset(subset)?;
        let labels: Vec<usize> = sorted.iter().map(|&x| self.block_of[x]).collect();
        Ok(Partition::from_labels(&labels))
    }

    /// The nonempty intersections of the blocks with `subset`, in original labels.
    pub fn restrict_blocks(&self, subset: &[usize]) -> Result<Vec<Vec<usize>>> {
        let sorted = self.sorted_subset(subset)?;
        let restricted = self.restrict(&sorted)?;
        Ok(restricted
            .blocks
            .iter()
            .map(|b| b.iter().map(|&i| sorted[i]).collect())
            .collect())
    }

    fn sorted_subset(&self, subset: &[usize]) -> Result<Vec<usize>> {
        if subset.is_empty() {
            return Err(Error::InvalidParameter("cannot restrict to an empty set".into()));
        }
        let mut sorted = subset.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&x) = sorted.iter().find(|&&x| x >= self.ground_size) {
            return Err(Error::VertexOutOfRange { vertex: x, n: self.ground_size });
        }
        Ok(sorted)
    }

    /// The partition with blocks `i` and `j` merged.
    pub fn merge_blocks(&self, i: usize, j: usize) -> Partition {
        let labels: Vec<usize> = self
            .block_of
            .iter()
            .map(|&b| if b == j { i } else { b })
            .collect();
        Partition::from_labels(&labels)
    }

    /// `prod_i Bell(|B_i|)`, the number of partitions refining `self`.
    pub fn refinement_count(&self) -> Option<u128> {
        self.blocks
            .iter()
            .try_fold(1u128, |acc, b| acc.checked_mul(bell(b.len())?))
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.blocks.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let blocks = Vec::<Vec<usize>>::deserialize(d)?;
        let n = blocks.iter().map(Vec::len).sum();
        Partition::from_blocks(n, blocks).map_err(serde::de::Error::custom)
    }
}

/// Restricted-growth string odometer: `a[0] = 0`, `a[i] <= 1 + max(a[..i])`.
#[derive(Clone, Debug)]
struct GrowthString {
    digits: Vec<usize>,
    prefix_max: Vec<usize>,
}

impl GrowthString {
    fn new(len: usize) -> Self {
        Self {
            digits: vec![0; len],
            prefix_max: vec![0; len],
        }
    }

    /// Advances to the next string; returns `false` (and resets) after the last.
    fn advance(&mut self) -> bool {
        let len = self.digits.len();
        for i in (1..len).rev() {
            if self.digits[i] <= self.prefix_max[i - 1] {
                self.digits[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.digits[i]);
                for j in i + 1..len {
                    self.digits[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                return true;
            }
        }
        self.digits.iter_mut().for_each(|d| *d = 0);
        self.prefix_max.iter_mut().for_each(|d| *d = 0);
        false
    }
}

/// All partitions of `{0, .., n-1}` in restricted-growth order.
pub struct SetPartitions {
    state: GrowthString,
    done: bool,
}

impl Iterator for SetPartitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let current = Partition::from_rgs(&self.state.digits);
        self.done = !self.state.advance();
        Some(current)
    }
}

/// Every partition of an `n`-set, each exactly once. Errors when `Bell(n)`
/// exceeds `cap` (default [`DEFAULT_ENUMERATION_CAP`]).
pub fn enumerate_all(n: usize, cap: Option<u128>) -> Result<SetPartitions> {
    let cap = cap.unwrap_or(DEFAULT_ENUMERATION_CAP);
    let required = bell(n).unwrap_or(u128::MAX);
    if required > cap {
        return Err(Error::CapExceeded { required, cap });
    }
    Ok(SetPartitions {
        state: GrowthString::new(n),
        done: false,
    })
}

/// Partitions refining a fixed partition: an independent partition of each block.
pub struct Refinements<'a> {
    base: &'a Partition,
    per_block: Vec<GrowthString>,
    labels: Vec<usize>,
    done: bool,
}

impl Iterator for Refinements<'_> {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let mut offset = 0;
        for (block, rgs) in self.base.blocks.iter().zip(&self.per_block) {
            for (&x, &d) in block.iter().zip(&rgs.digits) {
                self.labels[x] = offset + d;
            }
            offset += block.len();
        }
        let current = Partition::from_labels(&self.labels);
        self.done = !self.per_block.iter_mut().rev().any(GrowthString::advance);
        Some(current)
    }
}

/// Every `tilde` with `tilde ⪰ pi`, each exactly once.
pub fn enumerate_refinements(pi: &Partition, cap: Option<u128>) -> Result<Refinements<'_>> {
    let cap = cap.unwrap_or(DEFAULT_ENUMERATION_CAP);
    let required = pi.refinement_count().unwrap_or(u128::MAX);
    if required > cap {
        return Err(Error::CapExceeded { required, cap });
    }
    Ok(Refinements {
        base: pi,
        per_block: pi.blocks.iter().map(|b| GrowthString::new(b.len())).collect(),
        labels: vec![0; pi.ground_size],
        done: false,
    })
}

fn factorial_i128(m: usize) -> Option<i128> {
    (1..=m as i128).try_fold(1i128, |acc, x| acc.checked_mul(x))
}

/// `(-1)^(|tilde| - |pi|) * prod_i (|tilde restricted to B_i| - 1)!` for `tilde ⪰ pi`.
pub fn mobius_weight(tilde: &Partition, pi: &Partition) -> Result<i128> {
    if !tilde.refines(pi)? {
        return Err(Error::NotComparable);
    }
    let mut inside = vec![0usize; pi.len()];
    for block in &tilde.blocks {
        inside[pi.block_of[block[0]]] += 1;
    }
    let mut weight: i128 = if (tilde.len() - pi.len()) % 2 == 0 { 1 } else { -1 };
    for count in inside {
        let f = factorial_i128(count - 1).ok_or(Error::Overflow("mobius weight"))?;
        weight = weight.checked_mul(f).ok_or(Error::Overflow("mobius weight"))?;
    }
    Ok(weight)
}
