//! Closed-form quantities for loop clusters on `K_n` with constant killing.
//!
//! Central objects are the moments `m_j = (1 - j/(n+kappa))^(-alpha)` of
//! `Y = exp(Z / (n + kappa))`, `Z ~ Gamma(alpha, 1)`, and the cumulants
//! `c_j` of `Y`. Connectedness probabilities are ratios `c_j / m_j`, which
//! cancel catastrophically in double precision, so the cumulant recursion
//! runs in arbitrary precision (see [`moments`]).

mod hp;
pub mod limits;
pub mod loops;
pub mod moments;
pub mod probabilities;

use serde::{Deserialize, Serialize};

use crate::graph::{CompleteGraphParams, GraphSpec};
use crate::{Error, Result};

pub use hp::{big_to_decimal, big_to_f64};
pub use limits::{
    limit_moment_h, limit_moment_r, poisson_mixture_pmf, poisson_mixture_pmf_series, poisson_mixture_pmf_series_with,
    poisson_mixture_pmf_with, MixtureForm,
};
pub use loops::{dgon_measure, expected_support, loop_mass, size_gf, size_gf_general, LoopMass};
pub use moments::{cumulants, moment, required_precision_bits, MomentTable};
pub use probabilities::{
    cumulant_asymptotic_ratio, factorial_moment_isolated_vertices, factorial_moment_size_d,
    prob_connected, prob_exact, prob_exact_with, prob_finer, prob_isolated_sets,
};

/// `(n, kappa, alpha)`: the complete graph, its killing rate and the soup intensity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub kappa: f64,
    pub alpha: f64,
}

impl ModelParams {
    pub fn new(n: usize, kappa: f64, alpha: f64) -> Result<Self> {
        let p = Self { n, kappa, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!("n must be at least 2, got {}", self.n)));
        }
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(Error::InvalidParameter(format!("kappa must be positive, got {}", self.kappa)));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {}", self.alpha)));
        }
        Ok(())
    }

    /// `n + kappa`.
    pub fn total(&self) -> f64 {
        self.n as f64 + self.kappa
    }

    pub fn graph(&self) -> CompleteGraphParams {
        CompleteGraphParams {
            n: self.n,
            kappa: self.kappa,
        }
    }

    pub fn graph_spec(&self) -> GraphSpec {
        self.graph().into()
    }
}
