//! Finite graphs with conductances and killing.
//!
//! A graph carries symmetric conductances `C[x][y]` and a killing rate
//! `kappa[x]`; `lambda[x] = sum_y C[x][y] + kappa[x]`. The walk's transition
//! matrix is `P = C / lambda` (row-wise) and the Green matrix restricted to a
//! vertex set `D` is the inverse of `(lambda_x delta_xy - C_xy)` on `D x D`.
//!
//! The complete graph with unit conductances and constant killing is kept
//! symbolic so that `n` can be large: its determinants have closed forms and
//! are evaluated in log-space.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::partition::Partition;
use crate::{Error, Result};

/// `K_n` with unit conductances and constant killing `kappa > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompleteGraphParams {
    pub n: usize,
    pub kappa: f64,
}

impl CompleteGraphParams {
    pub fn new(n: usize, kappa: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGraph(format!("need at least 2 vertices, got {n}")));
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidGraph(format!("killing rate must be positive, got {kappa}")));
        }
        Ok(Self { n, kappa })
    }

    /// `lambda = n - 1 + kappa`, the same at every vertex.
    pub fn lambda(&self) -> f64 {
        (self.n - 1) as f64 + self.kappa
    }

    /// Off-diagonal transition probability `1 / (n - 1 + kappa)`.
    pub fn off_diagonal(&self) -> f64 {
        1.0 / self.lambda()
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Topology {
    Complete { kappa: f64 },
    Dense { conductances: Vec<f64>, killing: Vec<f64> },
}

/// A finite weighted graph with killing.
///
/// Serializes to `{"n": .., "kappa": .., "conductances": [...], "killing": [...]}`
/// where the last two keys are present only for non-complete graphs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphConfig", into = "GraphConfig")]
pub struct GraphSpec {
    n: usize,
    topology: Topology,
}

/// Wire form of [`GraphSpec`].
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GraphConfig {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    /// Dense row-major `n * n` array.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conductances: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub killing: Option<Vec<f64>>,
}

impl TryFrom<GraphConfig> for GraphSpec {
    type Error = Error;

    fn try_from(cfg: GraphConfig) -> Result<Self> {
        match (cfg.conductances, cfg.killing) {
            (None, None) => {
                let kappa = cfg
                    .kappa
                    .ok_or_else(|| Error::InvalidGraph("complete graph requires \"kappa\"".into()))?;
                GraphSpec::complete(cfg.n, kappa)
            }
            (conductances, killing) => {
                let conductances = match conductances {
                    Some(c) => c,
                    None => {
                        let mut c = vec![1.0; cfg.n * cfg.n];
                        for x in 0..cfg.n {
                            c[x * cfg.n + x] = 0.0;
                        }
                        c
                    }
                };
                let killing = match (killing, cfg.kappa) {
                    (Some(k), _) => k,
                    (None, Some(kappa)) => vec![kappa; cfg.n],
                    (None, None) => {
                        return Err(Error::InvalidGraph("need \"killing\" or \"kappa\"".into()))
                    }
                };
                GraphSpec::dense(cfg.n, conductances, killing)
            }
        }
    }
}

impl From<GraphSpec> for GraphConfig {
    fn from(g: GraphSpec) -> Self {
        match g.topology {
            Topology::Complete { kappa } => GraphConfig {
                n: g.n,
                kappa: Some(kappa),
                ..Default::default()
            },
            Topology::Dense { conductances, killing } => GraphConfig {
                n: g.n,
                kappa: None,
                conductances: Some(conductances),
                killing: Some(killing),
            },
        }
    }
}

impl From<CompleteGraphParams> for GraphSpec {
    fn from(p: CompleteGraphParams) -> Self {
        GraphSpec {
            n: p.n,
            topology: Topology::Complete { kappa: p.kappa },
        }
    }
}

impl GraphSpec {
    pub fn complete(n: usize, kappa: f64) -> Result<Self> {
        CompleteGraphParams::new(n, kappa).map(Into::into)
    }

    /// A general graph from a row-major conductance matrix and per-vertex killing.
    pub fn dense(n: usize, conductances: Vec<f64>, killing: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGraph(format!("need at least 2 vertices, got {n}")));
        }
        if conductances.len() != n * n {
            return Err(Error::InvalidGraph(format!(
                "conductance array has {} entries, expected {}",
                conductances.len(),
                n * n
            )));
        }
        if killing.len() != n {
            return Err(Error::InvalidGraph(format!(
                "killing array has {} entries, expected {n}",
                killing.len()
            )));
        }
        for x in 0..n {
            if conductances[x * n + x] != 0.0 {
                return Err(Error::InvalidGraph(format!("nonzero diagonal conductance at {x}")));
            }
            for y in 0..n {
                let c = conductances[x * n + y];
                if !(c.is_finite() && c >= 0.0) {
                    return Err(Error::InvalidGraph(format!("bad conductance {c} at ({x}, {y})")));
                }
                if c != conductances[y * n + x] {
                    return Err(Error::InvalidGraph(format!("conductances not symmetric at ({x}, {y})")));
                }
            }
        }
        if killing.iter().any(|k| !(k.is_finite() && *k >= 0.0)) {
            return Err(Error::InvalidGraph("killing rates must be finite and nonnegative".into()));
        }
        if killing.iter().all(|k| *k == 0.0) {
            return Err(Error::InvalidGraph("killing vanishes everywhere".into()));
        }
        let g = GraphSpec {
            n,
            topology: Topology::Dense { conductances, killing },
        };
        if let Some(x) = (0..n).find(|&x| g.lambda(x) <= 0.0) {
            return Err(Error::InvalidGraph(format!("lambda vanishes at vertex {x}")));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_complete(&self) -> Option<CompleteGraphParams> {
        match self.topology {
            Topology::Complete { kappa } => Some(CompleteGraphParams { n: self.n, kappa }),
            Topology::Dense { .. } => None,
        }
    }

    /// The same graph with the complete-graph structure forgotten, so every
    /// computation goes through dense linear algebra.
    pub fn to_dense(&self) -> GraphSpec {
        match &self.topology {
            Topology::Dense { .. } => self.clone(),
            Topology::Complete { kappa } => {
                let n = self.n;
                let conductances = (0..n * n)
                    .map(|i| if i / n == i % n { 0.0 } else { 1.0 })
                    .collect();
                GraphSpec {
                    n,
                    topology: Topology::Dense {
                        conductances,
                        killing: vec![*kappa; n],
                    },
                }
            }
        }
    }

    pub fn conductance(&self, x: usize, y: usize) -> f64 {
        match &self.topology {
            Topology::Complete { .. } => {
                if x == y {
                    0.0
                } else {
                    1.0
                }
            }
            Topology::Dense { conductances, .. } => conductances[x * self.n + y],
        }
    }

    pub fn killing(&self, x: usize) -> f64 {
        match &self.topology {
            Topology::Complete { kappa } => *kappa,
            Topology::Dense { killing, .. } => killing[x],
        }
    }

    pub fn lambda(&self, x: usize) -> f64 {
        match &self.topology {
            Topology::Complete { kappa } => (self.n - 1) as f64 + kappa,
            Topology::Dense { conductances, killing } => {
                conductances[x * self.n..(x + 1) * self.n].iter().sum::<f64>() + killing[x]
            }
        }
    }

    /// `lambda_x delta_xy - C_xy` restricted to `subset x subset`.
    fn restricted_operator(&self, subset: &[usize]) -> DMatrix<f64> {
        let d = subset.len();
        DMatrix::from_fn(d, d, |i, j| {
            let (x, y) = (subset[i], subset[j]);
            if i == j {
                self.lambda(x)
            } else {
                -self.conductance(x, y)
            }
        })
    }

    fn check_subset(&self, subset: &[usize]) -> Result<()> {
        if subset.is_empty() {
            return Err(Error::InvalidParameter("vertex subset is empty".into()));
        }
        let mut seen = vec![false; self.n];
        for &x in subset {
            if x >= self.n {
                return Err(Error::VertexOutOfRange { vertex: x, n: self.n });
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidParameter(format!("vertex {x} repeated in subset")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Entries {
    Complete { n: usize, off_diagonal: f64 },
    Dense(DMatrix<f64>),
}

/// `P[x][y] = C[x][y] / lambda[x]` together with its spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    entries: Entries,
    eigenvalues: Vec<f64>,
    spectral_radius: f64,
}

impl TransitionMatrix {
    pub fn n(&self) -> usize {
        match &self.entries {
            Entries::Complete { n, .. } => *n,
            Entries::Dense(m) => m.nrows(),
        }
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        match &self.entries {
            Entries::Complete { off_diagonal, .. } => {
                if x == y {
                    0.0
                } else {
                    *off_diagonal
                }
            }
            Entries::Dense(m) => m[(x, y)],
        }
    }

    pub fn row_sum(&self, x: usize) -> f64 {
        match &self.entries {
            Entries::Complete { n, off_diagonal } => (*n - 1) as f64 * off_diagonal,
            Entries::Dense(m) => m.row(x).sum(),
        }
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_radius(&self) -> f64 {
        self.spectral_radius
    }

    /// Eigenvalues with multiplicity. `P` is similar to the symmetric matrix
    /// `lambda^{-1/2} C lambda^{-1/2}`, so they are real.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `tr(P^k)`. On `K_n` this is `((n-1)^k + (n-1)(-1)^k) / (n-1+kappa)^k`.
    pub fn trace_power(&self, k: u32) -> f64 {
        match &self.entries {
            Entries::Complete { n, off_diagonal } => {
                let a = (*n - 1) as f64;
                let q = a * off_diagonal;
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                q.powi(k as i32) + a * sign * off_diagonal.powi(k as i32)
            }
            Entries::Dense(_) => self.eigenvalues.iter().map(|mu| mu.powi(k as i32)).sum(),
        }
    }

    /// Dense copy of the entries (materializes `K_n`).
    pub fn to_matrix(&self) -> DMatrix<f64> {
        match &self.entries {
            Entries::Dense(m) => m.clone(),
            Entries::Complete { n, .. } => DMatrix::from_fn(*n, *n, |x, y| self.entry(x, y)),
        }
    }
}

pub fn build_transition(g: &GraphSpec) -> Result<TransitionMatrix> {
    let n = g.n();
    if let Some(x) = (0..n).find(|&x| g.lambda(x) <= 0.0) {
        return Err(Error::InvalidGraph(format!("lambda vanishes at vertex {x}")));
    }
    if let Some(p) = g.as_complete() {
        let lambda = p.lambda();
        let mut eigenvalues = vec![-1.0 / lambda; n];
        eigenvalues[0] = (n - 1) as f64 / lambda;
        return Ok(TransitionMatrix {
            entries: Entries::Complete { n, off_diagonal: 1.0 / lambda },
            eigenvalues,
            spectral_radius: (n - 1) as f64 / lambda,
        });
    }
    let entries = DMatrix::from_fn(n, n, |x, y| g.conductance(x, y) / g.lambda(x));
    let sym = DMatrix::from_fn(n, n, |x, y| {
        g.conductance(x, y) / (g.lambda(x) * g.lambda(y)).sqrt()
    });
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    let spectral_radius = eigenvalues.iter().fold(0.0f64, |r, mu| r.max(mu.abs()));
    Ok(TransitionMatrix {
        entries: Entries::Dense(entries),
        eigenvalues,
        spectral_radius,
    })
}

/// `ln det(G^D)` for the Green matrix restricted to `subset`.
pub fn log_green_det(g: &GraphSpec, subset: &[usize]) -> Result<f64> {
    g.check_subset(subset)?;
    if let Some(p) = g.as_complete() {
        let (n, d) = (p.n as f64, subset.len() as f64);
        return Ok(-(n - d + p.kappa).ln() - (d - 1.0) * (n + p.kappa).ln());
    }
    let lu = g.restricted_operator(subset).lu();
    let u = lu.u();
    let scale = u.diagonal().amax();
    let mut log_det = 0.0;
    let mut negative = false;
    for &pivot in u.diagonal().iter() {
        if !(pivot.abs() > scale * 1e-13) {
            return Err(Error::Singular);
        }
        negative ^= pivot < 0.0;
        log_det += pivot.abs().ln();
    }
    // Row swaps from pivoting flip the sign of det(U).
    let swaps = lu.p().determinant::<f64>() < 0.0;
    if negative ^ swaps {
        return Err(Error::Singular);
    }
    Ok(-log_det)
}

/// `det(G^D)`; `subset` equal to all vertices gives `det(G)`.
pub fn green_det(g: &GraphSpec, subset: &[usize]) -> Result<f64> {
    log_green_det(g, subset).map(f64::exp)
}

/// `ln( prod_i det(G^{B_i}) / det(G) )` over the blocks of `pi`.
pub fn log_det_ratio(g: &GraphSpec, pi: &Partition) -> Result<f64> {
    if pi.ground_size() != g.n() {
        return Err(Error::GroundSizeMismatch(pi.ground_size(), g.n()));
    }
    if let Some(p) = g.as_complete() {
        let total = p.n as f64 + p.kappa;
        let blocks: f64 = pi
            .blocks()
            .iter()
            .map(|b| (-(b.len() as f64) / total).ln_1p())
            .sum();
        return Ok((p.kappa / total).ln() - blocks);
    }
    let all: Vec<usize> = (0..g.n()).collect();
    let whole = log_green_det(g, &all)?;
    let mut sum = 0.0;
    for block in pi.blocks() {
        sum += log_green_det(g, block)?;
    }
    Ok(sum - whole)
}

/// `prod_i det(G^{B_i}) / det(G)`, computed from log-determinant differences.
pub fn det_ratio(g: &GraphSpec, pi: &Partition) -> Result<f64> {
    log_det_ratio(g, pi).map(f64::exp)
}

/// Determinant of the `m x m` matrix with diagonal `a + b` and off-diagonal `b`:
/// `a^(m-1) (a + m b)`.
pub fn uniform_offdiagonal_det(a: f64, b: f64, m: usize) -> f64 {
    a.powi(m as i32 - 1) * (a + m as f64 * b)
}
