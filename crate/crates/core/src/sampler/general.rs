//! Matrix-power sampler for small arbitrary graphs.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::{validate_epsilon, Loop, LoopConfig};
use crate::exact::loops::loop_mass_general;
use crate::graph::{build_transition, GraphSpec};
use crate::{Error, Result};

pub const DEFAULT_VERTEX_CAP: usize = 64;

/// Bound on the number of stored matrix-power entries, `(K+1) n^2`.
pub const DEFAULT_POWER_ENTRY_CAP: usize = 1 << 24;

/// Samples soups on any graph with at most [`DEFAULT_VERTEX_CAP`] vertices,
/// reading bridge weights from precomputed powers `P^0..P^K`.
#[derive(Clone, Debug)]
pub struct GeneralSampler {
    n: usize,
    p: DMatrix<f64>,
    powers: Vec<DMatrix<f64>>,
    /// Cumulative `w_k`; entry `i` covers lengths `2..=i+2`.
    cumulative: Vec<f64>,
    mass: f64,
    poisson: Option<Poisson<f64>>,
}

impl GeneralSampler {
    pub fn new(g: &GraphSpec, alpha: f64, tail_cutoff_epsilon: f64) -> Result<Self> {
        Self::with_caps(g, alpha, tail_cutoff_epsilon, DEFAULT_VERTEX_CAP, DEFAULT_POWER_ENTRY_CAP)
    }

    pub fn with_caps(
        g: &GraphSpec,
        alpha: f64,
        tail_cutoff_epsilon: f64,
        vertex_cap: usize,
        entry_cap: usize,
    ) -> Result<Self> {
        validate_epsilon(tail_cutoff_epsilon)?;
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        let n = g.n();
        if n > vertex_cap {
            return Err(Error::CapExceeded {
                required: n as u128,
                cap: vertex_cap as u128,
            });
        }
        let t = build_transition(g)?;
        let rho = t.spectral_radius();
        if rho >= 1.0 {
            return Err(Error::InvalidGraph(
                "a component without killing has infinite loop mass".into(),
            ));
        }
        let mass = loop_mass_general(&t);

        let mut cutoff = 2usize;
        if rho > 0.0 {
            let target = tail_cutoff_epsilon * mass;
            let bound = |k: usize| {
                let k1 = (k + 1) as f64;
                n as f64 * (k1 * rho.ln()).exp() / (k1 * (1.0 - rho))
            };
            while bound(cutoff) >= target {
                cutoff += 1;
                let required = (cutoff as u128 + 1) * (n * n) as u128;
                if required > entry_cap as u128 {
                    return Err(Error::CapExceeded {
                        required,
                        cap: entry_cap as u128,
                    });
                }
            }
        }

        let p = t.to_matrix();
        let mut powers = Vec::with_capacity(cutoff + 1);
        powers.push(DMatrix::identity(n, n));
        for r in 1..=cutoff {
            let next = &powers[r - 1] * &p;
            powers.push(next);
        }
        let mut cumulative = Vec::with_capacity(cutoff - 1);
        let mut acc = 0.0;
        for (k, pk) in powers.iter().enumerate().skip(2) {
            acc += pk.trace().max(0.0) / k as f64;
            cumulative.push(acc);
        }
        let rate = alpha * mass;
        let poisson = (rate > 0.0 && acc > 0.0).then(|| Poisson::new(rate).expect("positive finite rate"));
        Ok(Self {
            n,
            p,
            powers,
            cumulative,
            mass,
            poisson,
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Largest length the sampler can emit.
    pub fn cutoff(&self) -> usize {
        self.powers.len() - 1
    }

    pub fn sample_length<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().unwrap_or(&0.0);
        let u = rng.gen::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= u);
        i.min(self.cumulative.len() - 1) + 2
    }

    fn pick<R: Rng + ?Sized>(rng: &mut R, weights: impl Iterator<Item = f64> + Clone, fallback: usize) -> usize {
        let total: f64 = weights.clone().sum();
        let mut u = rng.gen::<f64>() * total;
        let mut last = fallback;
        for (i, w) in weights.enumerate() {
            if w > 0.0 {
                last = i;
                if u < w {
                    return i;
                }
                u -= w;
            }
        }
        last
    }

    /// Base point `x` with probability `(P^k)_xx / tr(P^k)`, then the bridge.
    pub fn sample_walk<R: Rng + ?Sized>(&self, rng: &mut R, k: usize, walk: &mut Vec<usize>) {
        let pk = &self.powers[k];
        walk.clear();
        let x = Self::pick(rng, (0..self.n).map(|v| pk[(v, v)]), 0);
        walk.push(x);
        let mut v = x;
        for i in 1..k {
            let rest = &self.powers[k - i];
            let w = Self::pick(rng, (0..self.n).map(|w| self.p[(v, w)] * rest[(w, x)]), x);
            walk.push(w);
            v = w;
        }
    }

    pub fn sample_loop<R: Rng + ?Sized>(&self, rng: &mut R) -> Loop {
        let mut walk = Vec::new();
        let k = self.sample_length(rng);
        self.sample_walk(rng, k, &mut walk);
        Loop::from_walk(&walk)
    }

    pub fn sample_count<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        self.poisson.as_ref().map_or(0, |p| p.sample(rng) as u64)
    }

    pub fn for_each_loop<R, F>(&self, rng: &mut R, mut f: F) -> u64
    where
        R: Rng + ?Sized,
        F: FnMut(&[usize]),
    {
        let count = self.sample_count(rng);
        let mut walk = Vec::new();
        for _ in 0..count {
            let k = self.sample_length(rng);
            self.sample_walk(rng, k, &mut walk);
            f(&walk);
        }
        count
    }

    pub fn sample_soup<R: Rng + ?Sized>(&self, rng: &mut R) -> LoopConfig {
        let mut config = LoopConfig::default();
        self.for_each_loop(rng, |w| config.push(Loop::from_walk(w)));
        config
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::sampler::DEFAULT_TAIL_EPSILON;

    fn star(leaves: usize, kappa: f64) -> GraphSpec {
        let n = leaves + 1;
        let mut c = vec![0.0; n * n];
        for leaf in 1..n {
            c[leaf] = 1.0;
            c[leaf * n] = 1.0;
        }
        GraphSpec::dense(n, c, vec![kappa; n]).unwrap()
    }

    #[test]
    fn star_loops_alternate() {
        let s = GeneralSampler::new(&star(3, 1.0), 1.0, DEFAULT_TAIL_EPSILON).unwrap();
        let mut rng = seeded(1);
        for _ in 0..2000 {
            let l = s.sample_loop(&mut rng);
            assert_eq!(l.len() % 2, 0);
            let hub_positions = l.vertices().iter().step_by(2).all(|&v| v == 0)
                || l.vertices().iter().skip(1).step_by(2).all(|&v| v == 0);
            assert!(hub_positions, "{l:?}");
        }
    }

    #[test]
    fn zero_conductance_vertex_is_never_visited() {
        let n = 4;
        let mut c = vec![1.0; n * n];
        for x in 0..n {
            c[x * n + x] = 0.0;
            c[x * n + 3] = 0.0;
            c[3 * n + x] = 0.0;
        }
        let g = GraphSpec::dense(n, c, vec![1.0; n]).unwrap();
        let s = GeneralSampler::new(&g, 2.0, DEFAULT_TAIL_EPSILON).unwrap();
        let mut rng = seeded(2);
        for _ in 0..500 {
            let soup = s.sample_soup(&mut rng);
            assert!(soup.loops().iter().all(|l| !l.vertices().contains(&3)));
        }
    }

    #[test]
    fn caps_are_enforced() {
        let g = GraphSpec::complete(70, 1.0).unwrap().to_dense();
        assert!(matches!(
            GeneralSampler::new(&g, 1.0, DEFAULT_TAIL_EPSILON),
            Err(Error::CapExceeded { .. })
        ));
        let g = GraphSpec::complete(8, 0.01).unwrap().to_dense();
        assert!(matches!(
            GeneralSampler::with_caps(&g, 1.0, DEFAULT_TAIL_EPSILON, 64, 1000),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn mass_matches_complete_closed_form() {
        let g = GraphSpec::complete(5, 1.0).unwrap().to_dense();
        let s = GeneralSampler::new(&g, 1.0, DEFAULT_TAIL_EPSILON).unwrap();
        let exact = crate::exact::loop_mass(5, 1.0).exact;
        assert!((s.mass() - exact).abs() < 1e-12);
        let head = s.cumulative.last().unwrap();
        assert!((head - exact).abs() / exact < 1e-12);
    }
}
