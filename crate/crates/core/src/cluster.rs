//! Loop clusters: connected components of the edges traversed by a soup.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::partition::Partition;
use crate::sampler::{Loop, LoopConfig};
use crate::{Error, Result};

/// Disjoint sets with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        assert!(n <= u32::MAX as usize);
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    /// Merges the sets of `x` and `y`; returns the size of the merged set.
    pub fn union(&mut self, x: usize, y: usize) -> usize {
        let (mut a, mut b) = (self.find(x), self.find(y));
        if a != b {
            if self.size[a] < self.size[b] {
                std::mem::swap(&mut a, &mut b);
            }
            self.parent[b] = a as u32;
            self.size[a] += self.size[b];
        }
        self.size[a] as usize
    }

    pub fn set_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r] as usize
    }

    pub fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i as u32;
        }
        self.size.iter_mut().for_each(|s| *s = 1);
    }

    /// Block labels per vertex (root indices).
    pub fn labels(&mut self) -> Vec<usize> {
        (0..self.len()).map(|x| self.find(x)).collect()
    }
}

/// Accumulates loops one at a time into a cluster partition.
///
/// Only the union-find is kept, so memory is `O(n)` whatever the total soup size.
#[derive(Clone, Debug)]
pub struct ClusterBuilder {
    sets: UnionFind,
    loops: usize,
}

impl ClusterBuilder {
    pub fn new(n: usize) -> Self {
        Self {
            sets: UnionFind::new(n),
            loops: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.sets.len()
    }

    /// Joins consecutive vertices of a cyclic walk, wrap-around included.
    pub fn add_walk(&mut self, walk: &[usize]) -> Result<()> {
        let n = self.n();
        if let Some(&v) = walk.iter().find(|&&v| v >= n) {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        self.add_walk_unchecked(walk);
        Ok(())
    }

    pub(crate) fn add_walk_unchecked(&mut self, walk: &[usize]) {
        if let Some(&first) = walk.first() {
            // Every vertex of a closed walk is joined to the first one.
            for &v in &walk[1..] {
                self.sets.union(first, v);
            }
        }
        self.loops += 1;
    }

    pub fn reset(&mut self) {
        self.sets.reset();
        self.loops = 0;
    }

    /// Sizes of the clusters, in no particular order.
    pub fn cluster_sizes(&mut self) -> Vec<usize> {
        let n = self.n();
        (0..n)
            .filter_map(|x| (self.sets.find(x) == x).then(|| self.sets.set_size(x)))
            .collect()
    }

    pub fn census(&mut self) -> SizeCensus {
        SizeCensus::from_sizes(self.n(), self.cluster_sizes())
    }

    pub fn max_cluster_size(&mut self) -> usize {
        self.cluster_sizes().into_iter().max().unwrap_or(0)
    }

    /// Does the current partition refine `pi`?
    pub fn refines(&mut self, pi: &Partition) -> bool {
        let n = self.n();
        (0..n).all(|x| {
            let r = self.sets.find(x);
            pi.block_of(r) == pi.block_of(x)
        })
    }

    pub fn finish(&mut self) -> ClusterPartition {
        ClusterPartition {
            partition: Partition::from_labels(&self.sets.labels()),
            built_from: self.loops,
        }
    }
}

/// The cluster partition `C` of a loop configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterPartition {
    pub partition: Partition,
    /// Number of loops consumed.
    pub built_from: usize,
}

/// Union-find over the edges traversed by the loops of `config`.
pub fn clusters(config: &LoopConfig, n: usize) -> Result<ClusterPartition> {
    let mut builder = ClusterBuilder::new(n);
    for l in config.loops() {
        builder.add_walk(l.vertices())?;
    }
    Ok(builder.finish())
}

/// Counts `|I_d|` of clusters of each size `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeCensus {
    pub n: usize,
    pub counts: BTreeMap<usize, usize>,
}

impl SizeCensus {
    fn from_sizes(n: usize, sizes: impl IntoIterator<Item = usize>) -> Self {
        let mut counts = BTreeMap::new();
        for s in sizes {
            *counts.entry(s).or_insert(0) += 1;
        }
        Self { n, counts }
    }

    /// `|I_d|`.
    pub fn count(&self, d: usize) -> usize {
        self.counts.get(&d).copied().unwrap_or(0)
    }

    pub fn isolated_vertices(&self) -> usize {
        self.count(1)
    }
}

pub fn size_census(p: &ClusterPartition) -> SizeCensus {
    SizeCensus::from_sizes(p.partition.ground_size(), p.partition.block_sizes())
}

impl Serialize for SizeCensus {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, usize> = self.counts.iter().map(|(d, c)| (d.to_string(), *c)).collect();
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SizeCensus {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let map = BTreeMap::<String, usize>::deserialize(d)?;
        let mut counts = BTreeMap::new();
        for (k, v) in map {
            let size: usize = k.parse().map_err(serde::de::Error::custom)?;
            counts.insert(size, v);
        }
        let n = counts.iter().map(|(d, c)| d * c).sum();
        Ok(Self { n, counts })
    }
}

pub fn max_cluster_size(p: &ClusterPartition) -> usize {
    p.partition.blocks().iter().map(Vec::len).max().unwrap_or(0)
}

/// `{l}`: the distinct vertices a loop visits, sorted.
pub fn support(l: &Loop) -> Vec<usize> {
    let mut v = l.vertices().to_vec();
    v.sort_unstable();
    v.dedup();
    v
}
