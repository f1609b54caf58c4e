//! Experiment configuration: a JSON file, overridden field by field from the command line.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::report::OutputFormat;
use crate::exact::ModelParams;
use crate::partition::Partition;
use crate::sampler::{validate_epsilon, DEFAULT_TAIL_EPSILON};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// `P(C ⪰ pi)` for fixed partitions.
    #[default]
    FinerProb,
    /// `P(C = pi)` over the whole lattice, normalization and connectedness.
    ExactProb,
    /// Factorial moments of the isolated-vertex count.
    IsolatedMoments,
    /// Factorial moments of the number of clusters of size `d`.
    SizeDMoments,
    /// Moments of the isolated fraction and the Poisson-mixture law of `|I_d|`.
    LimitLaws,
    /// Large clusters and the total loop mass.
    LargeClusters,
    /// `log|l| / log n` against Uniform[0, 1].
    LoopLengthLaw,
    /// `E[theta^M]` for the total soup size `M`.
    SizeGf,
    /// Isolated-tree census of `G(n, c/n)`.
    ErBaseline,
    /// Inclusion of fixed primitive loops in the projected soup.
    PrimitiveLoops,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::FinerProb => "finer-prob",
            Self::ExactProb => "exact-prob",
            Self::IsolatedMoments => "isolated-moments",
            Self::SizeDMoments => "size-d-moments",
            Self::LimitLaws => "limit-laws",
            Self::LargeClusters => "large-clusters",
            Self::LoopLengthLaw => "loop-length-law",
            Self::SizeGf => "size-gf",
            Self::ErBaseline => "er-baseline",
            Self::PrimitiveLoops => "primitive-loops",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelParams,
    pub kind: ExperimentKind,
    /// Soups (graphs for the ER baseline, loops for the length law).
    pub samples: u64,
    pub seed: u64,
    pub batches: u64,
    /// Working precision of the exact engine; chosen automatically when absent.
    pub precision_bits: Option<usize>,
    /// Exponent in the large-cluster threshold `n^(1 - epsilon)`.
    pub epsilon: f64,
    /// Relative truncation of the loop-length distribution.
    pub tail_epsilon: f64,
    /// Cluster or tree size.
    pub d: usize,
    /// Largest moment order.
    pub k: usize,
    /// Edge-rate constant of the ER baseline, `p = c/n`.
    pub c: f64,
    pub theta: Vec<f64>,
    /// Partitions for `finer-prob`; a default set is used when empty.
    pub partitions: Vec<Partition>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelParams {
                n: 4,
                kappa: 1.0,
                alpha: 1.0,
            },
            kind: ExperimentKind::default(),
            samples: 100_000,
            seed: 1,
            batches: 16,
            precision_bits: None,
            epsilon: 0.5,
            tail_epsilon: DEFAULT_TAIL_EPSILON,
            d: 2,
            k: 2,
            c: 1.0,
            theta: vec![0.0, 0.5, 0.9],
            partitions: Vec::new(),
            out: None,
            format: OutputFormat::Csv,
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.samples < 1 {
            return Err(Error::InvalidParameter("samples must be at least 1".into()));
        }
        if self.batches < 1 || self.batches > self.samples {
            return Err(Error::InvalidParameter(format!(
                "batches must lie in [1, samples], got {} for {} samples",
                self.batches, self.samples
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        validate_epsilon(self.tail_epsilon)?;
        if self.d < 1 || self.k < 1 {
            return Err(Error::InvalidParameter("d and k must be at least 1".into()));
        }
        for pi in &self.partitions {
            if pi.ground_size() != self.model.n {
                return Err(Error::GroundSizeMismatch(pi.ground_size(), self.model.n));
            }
        }
        Ok(())
    }
}
