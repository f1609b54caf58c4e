//! Estimators and goodness-of-fit tests used by the verification experiments.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::{Error, Result};

/// Significance level of every distribution test in the harness.
pub const TEST_LEVEL: f64 = 0.001;

/// A Monte Carlo mean and its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    /// `(mean - exact) / stderr`, kept finite when the standard error vanishes.
    pub fn z_score(&self, exact: f64) -> f64 {
        z_score(exact, self.mean, self.stderr)
    }
}

pub fn z_score(exact: f64, estimate: f64, stderr: f64) -> f64 {
    let diff = estimate - exact;
    if stderr > 0.0 {
        diff / stderr
    } else if diff == 0.0 {
        0.0
    } else {
        diff / (f64::EPSILON * exact.abs().max(1.0))
    }
}

/// `x (x-1) ... (x-k+1)`.
pub fn falling_factorial(x: u64, k: usize) -> u128 {
    (0..k as u64).fold(1u128, |acc, i| if i > x { 0 } else { acc * u128::from(x - i) })
}

/// Mean and standard error of `X (X-1) ... (X-k+1)` over the samples.
pub fn estimate_falling_factorial(samples: &[u64], k: usize) -> Result<Estimate> {
    if k == 0 {
        return Err(Error::InvalidParameter("factorial moment order must be at least 1".into()));
    }
    let mut acc = Welford::default();
    for &x in samples {
        acc.push(falling_factorial(x, k) as f64);
    }
    acc.estimate()
}

/// Streaming mean and variance (Welford), mergeable in a fixed order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Welford) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / total as f64;
        self.m2 += other.m2 + delta * delta * (self.count as f64 * other.count as f64 / total as f64);
        self.count = total;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn estimate(&self) -> Result<Estimate> {
        if self.count == 0 {
            return Err(Error::Degenerate("no samples".into()));
        }
        Ok(Estimate {
            mean: self.mean,
            stderr: (self.variance() / self.count as f64).sqrt(),
        })
    }
}

/// Exact integer power sums of a count statistic, so batch reduction is
/// associative bit for bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorialSums {
    count: u64,
    /// `sums[k-1] = (sum of X_(k), sum of X_(k)^2)`.
    sums: Vec<(u128, u128)>,
}

impl FactorialSums {
    pub fn new(max_order: usize) -> Self {
        Self {
            count: 0,
            sums: vec![(0, 0); max_order],
        }
    }

    pub fn push(&mut self, x: u64) {
        self.count += 1;
        for (k, (s, s2)) in self.sums.iter_mut().enumerate() {
            let f = falling_factorial(x, k + 1);
            *s += f;
            *s2 += f * f;
        }
    }

    pub fn merge(&mut self, other: &FactorialSums) {
        self.count += other.count;
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            a.0 += b.0;
            a.1 += b.1;
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Mean and standard error of the `k`-th falling factorial.
    pub fn estimate(&self, k: usize) -> Result<Estimate> {
        if k == 0 || k > self.sums.len() {
            return Err(Error::InvalidParameter(format!("order {k} was not accumulated")));
        }
        if self.count == 0 {
            return Err(Error::Degenerate("no samples".into()));
        }
        let (s, s2) = self.sums[k - 1];
        let n = self.count as f64;
        let mean = s as f64 / n;
        let var = if self.count < 2 {
            0.0
        } else {
            // sum (x - mean)^2 = s2 - s^2/n, computed exactly where it fits
            let centered = match s.checked_mul(s) {
                Some(sq) => {
                    let c = self.count as u128;
                    (s2 - sq / c) as f64 - (sq % c) as f64 / n
                }
                None => s2 as f64 - (s as f64) * mean,
            };
            centered.max(0.0) / (n - 1.0)
        };
        Ok(Estimate {
            mean,
            stderr: (var / n).sqrt(),
        })
    }
}

/// A Bernoulli frequency with the standard error it has when the success
/// probability equals `p0` (score-test form).
pub fn frequency(successes: u64, trials: u64, p0: f64) -> Result<Estimate> {
    if trials == 0 {
        return Err(Error::Degenerate("no trials".into()));
    }
    Ok(Estimate {
        mean: successes as f64 / trials as f64,
        stderr: (p0 * (1.0 - p0) / trials as f64).sqrt(),
    })
}

/// `P(K > x)` for the Kolmogorov distribution.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.0 {
        // Jacobi-transformed series, fast for small x.
        let c = std::f64::consts::PI.powi(2) / (8.0 * x * x);
        let s: f64 = (1..=20).map(|k| (-((2 * k - 1) as f64).powi(2) * c).exp()).sum();
        return 1.0 - (2.0 * std::f64::consts::PI).sqrt() / x * s;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic critical value of the one-sample KS statistic at `level`.
pub fn ks_critical_value(samples: usize, level: f64) -> f64 {
    let (mut lo, mut hi) = (0.1, 5.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_sf(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi) / (samples as f64).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub samples: usize,
    /// Asymptotic p-value.
    pub p_value: f64,
    pub critical_value: f64,
}

impl KsResult {
    fn new(statistic: f64, samples: usize) -> Self {
        Self {
            statistic,
            samples,
            p_value: kolmogorov_sf((samples as f64).sqrt() * statistic),
            critical_value: ks_critical_value(samples, TEST_LEVEL),
        }
    }

    pub fn passes(&self) -> bool {
        self.statistic < self.critical_value
    }
}

/// One-sample KS statistic against Uniform[0, 1].
pub fn ks_uniform(values: &[f64]) -> Result<KsResult> {
    if values.is_empty() {
        return Err(Error::Degenerate("no values".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Degenerate("NaN in KS input".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let d = v.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let x = x.clamp(0.0, 1.0);
        d.max((i + 1) as f64 / n - x).max(x - i as f64 / n)
    });
    Ok(KsResult::new(d, v.len()))
}

/// KS statistic of integer samples against a discrete law given by its CDF.
/// With atoms the asymptotic critical value is conservative.
pub fn ks_discrete(samples: &[u64], cdf: impl Fn(u64) -> f64) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::Degenerate("no samples".into()));
    }
    let mut v = samples.to_vec();
    v.sort_unstable();
    let n = v.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < v.len() {
        let k = v[i];
        let below = i as f64 / n;
        let mut j = i;
        while j < v.len() && v[j] == k {
            j += 1;
        }
        let at = j as f64 / n;
        let f_below = if k == 0 { 0.0 } else { cdf(k - 1) };
        d = d.max((below - f_below).abs()).max((at - cdf(k)).abs());
        i = j;
    }
    Ok(KsResult::new(d, v.len()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Bin count after merging.
    pub bins: usize,
}

impl ChiSquareResult {
    pub fn passes(&self) -> bool {
        self.p_value > TEST_LEVEL
    }
}

fn chi_square_p(statistic: f64, dof: usize) -> Result<f64> {
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Degenerate(e.to_string()))?;
    Ok(dist.sf(statistic))
}

/// Groups consecutive bins until each group's `weight` reaches `min`; a short
/// final group joins its predecessor.
fn merge_groups(weights: &[f64], min: f64) -> Vec<std::ops::Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if acc >= min {
            groups.push(start..i + 1);
            start = i + 1;
            acc = 0.0;
        }
    }
    if start < weights.len() {
        match groups.last_mut() {
            Some(last) => last.end = weights.len(),
            None => groups.push(0..weights.len()),
        }
    }
    groups
}

/// Pearson chi-square of observed counts against expected counts, merging
/// adjacent bins so that every expected count is at least 5.
pub fn chi_square(observed: &[f64], expected: &[f64]) -> Result<ChiSquareResult> {
    chi_square_with_dof(observed, expected, 0)
}

/// [`chi_square`] with `fitted` parameters estimated from the data.
pub fn chi_square_with_dof(observed: &[f64], expected: &[f64], fitted: usize) -> Result<ChiSquareResult> {
    if observed.len() != expected.len() || observed.is_empty() {
        return Err(Error::Degenerate("observed and expected must be nonempty and equally long".into()));
    }
    if expected.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(Error::Degenerate("expected counts must be finite and nonnegative".into()));
    }
    let groups = merge_groups(expected, 5.0);
    if groups.len() < 2 + fitted {
        return Err(Error::Degenerate(format!("only {} bins after merging", groups.len())));
    }
    let mut statistic = 0.0;
    for g in &groups {
        let o: f64 = observed[g.clone()].iter().sum();
        let e: f64 = expected[g.clone()].iter().sum();
        if e == 0.0 {
            if o > 0.0 {
                statistic = f64::INFINITY;
            }
            continue;
        }
        statistic += (o - e).powi(2) / e;
    }
    let dof = groups.len() - 1 - fitted;
    Ok(ChiSquareResult {
        statistic,
        dof,
        p_value: chi_square_p(statistic, dof)?,
        bins: groups.len(),
    })
}

/// Two-sample chi-square homogeneity test on histograms with possibly
/// different totals; adjacent bins are merged until each pooled count is at least 10.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<ChiSquareResult> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Degenerate("histograms must be nonempty and equally long".into()));
    }
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Degenerate("empty histogram".into()));
    }
    let pooled: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x + y) as f64).collect();
    let groups = merge_groups(&pooled, 10.0);
    if groups.len() < 2 {
        return Err(Error::Degenerate("only one bin after merging".into()));
    }
    let (ka, kb) = ((nb / na).sqrt(), (na / nb).sqrt());
    let statistic = groups
        .iter()
        .map(|g| {
            let x: f64 = a[g.clone()].iter().sum::<u64>() as f64;
            let y: f64 = b[g.clone()].iter().sum::<u64>() as f64;
            (ka * x - kb * y).powi(2) / (x + y)
        })
        .sum();
    let dof = groups.len() - 1;
    Ok(ChiSquareResult {
        statistic,
        dof,
        p_value: chi_square_p(statistic, dof)?,
        bins: groups.len(),
    })
}
