//! Exact sampling of the Poisson loop ensemble and the primitive-loop projection.
//!
//! A loop is drawn from the normalized loop measure in three steps: its length
//! `k` with probability proportional to `w_k = tr(P^k)/k`, a base point `x`
//! with probability proportional to `(P^k)_{xx}`, then a closed walk from `x`
//! conditioned to return after `k` steps. Forgetting the base point gives each
//! unpointed loop of multiplicity `m` exactly `k/m` pointed representatives,
//! which is the `1/m` weighting of the loop measure.

mod complete;
mod general;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use complete::{closed_walk_count, length_weights, CompleteSampler, LengthWeights};
pub use general::{GeneralSampler, DEFAULT_VERTEX_CAP};

/// Default relative truncation for the length distribution.
pub const DEFAULT_TAIL_EPSILON: f64 = 1.0 / (1u64 << 60) as f64;

/// Largest allowed relative truncation.
pub const MAX_TAIL_EPSILON: f64 = 1.0 / (1u64 << 20) as f64;

/// A discrete loop in canonical (lexicographically least) rotation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Loop {
    vertices: Vec<usize>,
}

impl Loop {
    /// Validates a cyclic vertex sequence and rotates it to canonical form.
    pub fn new(mut vertices: Vec<usize>) -> Result<Self> {
        let k = vertices.len();
        if k < 2 {
            return Err(Error::InvalidParameter(format!("a loop needs length at least 2, got {k}")));
        }
        if let Some(i) = (0..k).find(|&i| vertices[i] == vertices[(i + 1) % k]) {
            return Err(Error::InvalidParameter(format!(
                "loop repeats vertex {} at positions {i} and {}",
                vertices[i],
                (i + 1) % k
            )));
        }
        let shift = least_rotation(&vertices);
        vertices.rotate_left(shift);
        Ok(Self { vertices })
    }

    pub(crate) fn from_walk(walk: &[usize]) -> Self {
        let mut vertices = walk.to_vec();
        let shift = least_rotation(&vertices);
        vertices.rotate_left(shift);
        Self { vertices }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    /// Length of the primitive root.
    pub fn period(&self) -> usize {
        let s = &self.vertices;
        let k = s.len();
        let mut fail = vec![0usize; k];
        for i in 1..k {
            let mut j = fail[i - 1];
            while j > 0 && s[i] != s[j] {
                j = fail[j - 1];
            }
            if s[i] == s[j] {
                j += 1;
            }
            fail[i] = j;
        }
        let p = k - fail[k - 1];
        if k % p == 0 {
            p
        } else {
            k
        }
    }

    /// `m` such that this loop is the `m`-th power of its primitive root.
    pub fn multiplicity(&self) -> usize {
        self.len() / self.period()
    }

    pub fn is_primitive(&self) -> bool {
        self.multiplicity() == 1
    }

    /// The shortest loop whose repetition gives this one. The canonical
    /// rotation of a power is the power of the canonical root, so the prefix
    /// is already canonical.
    pub fn primitive_root(&self) -> Loop {
        Loop {
            vertices: self.vertices[..self.period()].to_vec(),
        }
    }

    /// `nu` of this loop on `K_n`: the product of its transition entries over its multiplicity.
    pub fn measure_complete(&self, n: usize, kappa: f64) -> f64 {
        if self.vertices.iter().any(|&v| v >= n) {
            return 0.0;
        }
        ((n - 1) as f64 + kappa).powi(-(self.len() as i32)) / self.multiplicity() as f64
    }
}

impl fmt::Debug for Loop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Loop{:?}", self.vertices)
    }
}

impl TryFrom<Vec<usize>> for Loop {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Loop::new(v)
    }
}

impl From<Loop> for Vec<usize> {
    fn from(l: Loop) -> Self {
        l.vertices
    }
}

/// Start index of the lexicographically least rotation.
fn least_rotation(s: &[usize]) -> usize {
    let n = s.len();
    let (mut i, mut j, mut k) = (0, 1, 0);
    while i < n && j < n && k < n {
        let (a, b) = (s[(i + k) % n], s[(j + k) % n]);
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

/// A multiset of loops, kept in sampling order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LoopConfigWire", into = "LoopConfigWire")]
pub struct LoopConfig {
    loops: Vec<Loop>,
    total_size: usize,
}

#[derive(Serialize, Deserialize)]
struct LoopConfigWire {
    loops: Vec<Loop>,
    total_size: usize,
}

impl TryFrom<LoopConfigWire> for LoopConfig {
    type Error = Error;

    fn try_from(w: LoopConfigWire) -> Result<Self> {
        let c = LoopConfig::new(w.loops);
        if c.total_size != w.total_size {
            return Err(Error::InvalidParameter(format!(
                "total_size {} does not match the summed loop lengths {}",
                w.total_size, c.total_size
            )));
        }
        Ok(c)
    }
}

impl From<LoopConfig> for LoopConfigWire {
    fn from(c: LoopConfig) -> Self {
        Self {
            loops: c.loops,
            total_size: c.total_size,
        }
    }
}

impl LoopConfig {
    pub fn new(loops: Vec<Loop>) -> Self {
        let total_size = loops.iter().map(Loop::len).sum();
        Self { loops, total_size }
    }

    pub fn loops(&self) -> &[Loop] {
        &self.loops
    }

    /// `M`, the summed lengths.
    pub fn total_size(&self) -> usize {
        self.total_size
    }

    pub fn len(&self) -> usize {
        self.loops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loops.is_empty()
    }

    pub fn push(&mut self, l: Loop) {
        self.total_size += l.len();
        self.loops.push(l);
    }
}

/// Maps each loop to its primitive root and de-duplicates.
pub fn project_primitive(config: &LoopConfig) -> BTreeSet<Loop> {
    config.loops().iter().map(Loop::primitive_root).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerMode {
    #[default]
    CompleteFastPath,
    GeneralSmallGraph,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerSettings {
    pub seed: u64,
    pub tail_cutoff_epsilon: f64,
    pub mode: SamplerMode,
}

impl Default for SamplerSettings {
    fn default() -> Self {
        Self {
            seed: 0,
            tail_cutoff_epsilon: DEFAULT_TAIL_EPSILON,
            mode: SamplerMode::CompleteFastPath,
        }
    }
}

impl SamplerSettings {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_epsilon(self.tail_cutoff_epsilon)
    }
}

pub(crate) fn validate_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= MAX_TAIL_EPSILON {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "tail_cutoff_epsilon must lie in (0, 2^-20], got {eps:e}"
        )))
    }
}
