//! The fast path on `K_n`: closed-form length weights and walk counts.

use rand::Rng;
use rand_distr::{Distribution, Geometric, Poisson};

use super::{validate_epsilon, Loop, LoopConfig};
use crate::exact::{loop_mass, ModelParams};
use crate::{Error, Result};

/// Largest number of lengths held in the sampling table. Longer loops
/// come from the rejection tail in [`CompleteSampler`].
const HEAD_CAP: usize = 1 << 20;

/// Beyond this many remaining steps the `(-1)^t` correction to the walk
/// counts is below `2^-64` relative and the bridge ratio is taken as 1.
const RATIO_TABLE: usize = 64;

/// `w_k = tr(P^k)/k` for `k = 2..=cutoff` on `K_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LengthWeights {
    /// Indexed by length; entries 0 and 1 are zero.
    pub weights: Vec<f64>,
    /// Largest tabulated length `K`.
    pub cutoff: usize,
    /// Analytic bound on `sum_{k > K} w_k`.
    pub tail_bound: f64,
    /// Exact `sum_k w_k`.
    pub mass: f64,
}

impl LengthWeights {
    pub fn get(&self, k: usize) -> f64 {
        self.weights.get(k).copied().unwrap_or(0.0)
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

struct Spectrum {
    a: f64,
    ln_q: f64,
    ln_s: f64,
    one_minus_q: f64,
    one_minus_s: f64,
}

impl Spectrum {
    fn new(n: usize, kappa: f64) -> Self {
        let a = (n - 1) as f64;
        let lambda = a + kappa;
        Self {
            a,
            ln_q: -(kappa / a).ln_1p(),
            ln_s: -lambda.ln(),
            one_minus_q: kappa / lambda,
            one_minus_s: (lambda - 1.0) / lambda,
        }
    }

    /// `tr(P^k)/k = (q^k + a (-s)^k)/k`.
    fn weight(&self, k: usize) -> f64 {
        let kf = k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let w = ((kf * self.ln_q).exp() + sign * (self.a.ln() + kf * self.ln_s).exp()) / kf;
        w.max(0.0)
    }

    /// Bound on `sum_{k > K} w_k` from the two geometric tails.
    fn tail_bound(&self, cutoff: usize) -> f64 {
        let k1 = (cutoff + 1) as f64;
        let big = (k1 * self.ln_q).exp() / (k1 * self.one_minus_q);
        let small = (self.a.ln() + k1 * self.ln_s).exp() / (k1 * self.one_minus_s);
        big + small
    }

    /// Smallest `K >= 2` whose tail bound is below `target`.
    fn cutoff(&self, target: f64) -> usize {
        let mut hi = 2usize;
        while self.tail_bound(hi) >= target {
            hi = hi.checked_mul(2).expect("tail bound decreases geometrically");
        }
        let mut lo = hi / 2;
        if lo < 2 || self.tail_bound(lo) < target {
            return if lo < 2 { 2 } else { lo };
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.tail_bound(mid) < target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// The length weights on `K_n`, truncated where the analytic tail bound
/// drops below `cutoff_epsilon` times the total mass.
pub fn length_weights(n: usize, kappa: f64, cutoff_epsilon: f64) -> Result<LengthWeights> {
    let params = ModelParams::new(n, kappa, 1.0)?;
    if !(cutoff_epsilon > 0.0 && cutoff_epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("cutoff must lie in (0, 1), got {cutoff_epsilon}")));
    }
    let spec = Spectrum::new(params.n, params.kappa);
    let mass = loop_mass(n, kappa).exact;
    let cutoff = spec.cutoff(cutoff_epsilon * mass);
    let mut weights = vec![0.0; cutoff + 1];
    for (k, w) in weights.iter_mut().enumerate().skip(2) {
        *w = spec.weight(k);
    }
    Ok(LengthWeights {
        weights,
        cutoff,
        tail_bound: spec.tail_bound(cutoff),
        mass,
    })
}

/// Closed walks of length `r` from `u` to `t` on `K_n`:
/// `((n-1)^r + (n-1)(-1)^r)/n` if `u = t`, `((n-1)^r - (-1)^r)/n` otherwise.
pub fn closed_walk_count(n: usize, r: u32, same_endpoint: bool) -> Option<u128> {
    let a = (n as i128).checked_sub(1)?;
    let pow = a.checked_pow(r)?;
    let sign: i128 = if r % 2 == 0 { 1 } else { -1 };
    let num = if same_endpoint {
        pow.checked_add(a.checked_mul(sign)?)?
    } else {
        pow.checked_sub(sign)?
    };
    u128::try_from(num / n as i128).ok()
}

/// Exact length draws beyond the table: propose `K + Geometric(1 - q)`,
/// thin by `(K+1)/k` to get `q^k/k`, then by `(1 + (-1)^k a^{1-k})/2` to
/// get `w_k`.
#[derive(Clone, Debug)]
struct Tail {
    start: usize,
    geometric: Geometric,
    ln_a: f64,
}

impl Tail {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        loop {
            let k = self.start + 1 + self.geometric.sample(rng) as usize;
            if rng.gen::<f64>() * k as f64 >= (self.start + 1) as f64 {
                continue;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let accept = 0.5 * (1.0 + sign * ((1.0 - k as f64) * self.ln_a).exp());
            if rng.gen::<f64>() < accept {
                return k;
            }
        }
    }
}

/// Samples loops and soups from the loop measure on `K_n` with constant killing.
#[derive(Clone, Debug)]
pub struct CompleteSampler {
    params: ModelParams,
    mass: f64,
    /// Cumulative weights; entry `i` covers lengths `2..=i+2`.
    cumulative: Vec<f64>,
    tail: Option<(Tail, f64)>,
    poisson: Option<Poisson<f64>>,
    /// Probability of stepping to the base point from elsewhere with `t` steps left after the move.
    to_base: [f64; RATIO_TABLE + 1],
}

impl CompleteSampler {
    pub fn new(params: ModelParams, tail_cutoff_epsilon: f64) -> Result<Self> {
        params.validate()?;
        validate_epsilon(tail_cutoff_epsilon)?;
        let (n, kappa) = (params.n, params.kappa);
        let spec = Spectrum::new(n, kappa);
        let mass = loop_mass(n, kappa).exact;
        let cutoff = spec.cutoff(tail_cutoff_epsilon * mass);
        let head = cutoff.min(HEAD_CAP);
        let mut cumulative = Vec::with_capacity(head - 1);
        let mut acc = 0.0;
        for k in 2..=head {
            acc += spec.weight(k);
            cumulative.push(acc);
        }
        let tail = (cutoff > head).then(|| {
            let tail = Tail {
                start: head,
                geometric: Geometric::new(spec.one_minus_q).expect("1 - q lies in (0, 1)"),
                ln_a: spec.a.ln(),
            };
            (tail, (mass - acc).max(0.0))
        });
        let rate = params.alpha * mass;
        let poisson = (rate > 0.0).then(|| Poisson::new(rate).expect("positive finite rate"));

        let mut to_base = [0.0; RATIO_TABLE + 1];
        let others = (n as f64) - 2.0;
        for (t, p) in to_base.iter_mut().enumerate().skip(1) {
            // rho = N_t(x -> x) / N_t(w -> x) for w != x.
            let e = (-(t as f64) * spec.a.ln()).exp();
            let sigma = if t % 2 == 0 { 1.0 } else { -1.0 };
            let rho = (1.0 + sigma * spec.a * e) / (1.0 - sigma * e);
            *p = if others == 0.0 { 1.0 } else { rho / (rho + others) };
        }
        Ok(Self {
            params,
            mass,
            cumulative,
            tail,
            poisson,
            to_base,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// `|nu_n|`, the exact total loop mass.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn sample_length<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let head = *self.cumulative.last().unwrap_or(&0.0);
        let total = head + self.tail.as_ref().map_or(0.0, |t| t.1);
        let u = rng.gen::<f64>() * total;
        match &self.tail {
            Some((tail, _)) if u >= head => tail.sample(rng),
            _ => {
                let i = self.cumulative.partition_point(|&c| c <= u);
                i.min(self.cumulative.len() - 1) + 2
            }
        }
    }

    fn to_base(&self, t: usize) -> f64 {
        if t <= RATIO_TABLE {
            self.to_base[t]
        } else if self.params.n == 2 {
            1.0
        } else {
            1.0 / (self.params.n as f64 - 1.0)
        }
    }

    /// A uniformly random closed walk of length `k` with a uniform base point,
    /// written to `walk` without the closing return.
    pub fn sample_walk<R: Rng + ?Sized>(&self, rng: &mut R, k: usize, walk: &mut Vec<usize>) {
        let n = self.params.n;
        walk.clear();
        let x = rng.gen_range(0..n);
        walk.push(x);
        let mut v = x;
        for i in 1..k {
            let t = k - i;
            let w = if v == x {
                let j = rng.gen_range(0..n - 1);
                j + usize::from(j >= x)
            } else if rng.gen::<f64>() < self.to_base(t) {
                x
            } else {
                let (lo, hi) = if v < x { (v, x) } else { (x, v) };
                let mut j = rng.gen_range(0..n - 2);
                j += usize::from(j >= lo);
                j += usize::from(j >= hi);
                j
            };
            walk.push(w);
            v = w;
        }
    }

    /// One loop from the normalized loop measure.
    pub fn sample_loop<R: Rng + ?Sized>(&self, rng: &mut R) -> Loop {
        let mut walk = Vec::new();
        let k = self.sample_length(rng);
        self.sample_walk(rng, k, &mut walk);
        Loop::from_walk(&walk)
    }

    /// Number of loops in one soup, `Poisson(alpha |nu_n|)`.
    pub fn sample_count<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        self.poisson.as_ref().map_or(0, |p| p.sample(rng) as u64)
    }

    /// Draws one soup and hands each loop, as a pointed walk, to `f`.
    /// Returns the number of loops.
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
