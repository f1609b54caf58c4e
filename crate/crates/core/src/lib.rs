//! Poissonian ensembles of discrete Markov loops on finite graphs with killing,
//! the random partition into loop clusters they induce, and the closed-form
//! quantities that describe that partition on the complete graph `K_n`.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: graphs with conductances and killing, transition matrices and
//!   Green-matrix determinants (closed forms on `K_n`, dense LU otherwise).
//! * [`partition`]: set partitions, refinement order, enumeration and the
//!   Möbius weights of the partition lattice.
//! * [`exact`]: high-precision moments and cumulants, partition probabilities,
//!   factorial moments of cluster counts, limit laws and loop-measure quantities.
//! * [`sampler`]: exact sampling of loop soups (pointed closed-walk scheme) and
//!   the primitive-loop projection.
//! * [`cluster`]: union-find cluster partitions and size censuses.
//! * [`er`]: the Erdős–Rényi `G(n, c/n)` comparison baseline.
//! * [`harness`]: Monte Carlo estimators, goodness-of-fit tests, experiment
//!   configuration, batched execution and reports.

pub mod cluster;
pub mod er;
mod error;
pub mod exact;
pub mod graph;
pub mod harness;
pub mod partition;
pub mod rng;
pub mod sampler;

pub use error::{Error, Result};
