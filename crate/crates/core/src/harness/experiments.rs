//! One function per experiment kind. Each draws its samples through
//! [`run_reduce`] and pairs the estimates with exact-engine values.

use std::collections::HashMap;

use serde::Serialize;

use super::config::{ExperimentConfig, ExperimentKind};
use super::report::{ExperimentReport, ReportMetadata, ReportRow};
use super::runner::{run_reduce, thread_count};
use super::stats::{chi_square, frequency, ChiSquareResult, ks_discrete, ks_uniform, Estimate, FactorialSums, Welford, TEST_LEVEL};
use crate::cluster::ClusterBuilder;
use crate::er::{self, ErParams};
use crate::exact::{self, MixtureForm, ModelParams};
use crate::partition::{enumerate_all, Partition};
use crate::sampler::{length_weights, project_primitive, CompleteSampler, Loop};
use crate::{Error, Result};

/// Band for equality claims, in standard errors.
pub const Z_BAND: f64 = 4.0;

/// Largest `n` for which `exact-prob` walks the whole partition lattice.
pub const EXACT_PROB_MAX_N: usize = 7;

const MIN_SIZE_D_BITS: usize = 192;

pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = std::time::Instant::now();
    let rows = match config.kind {
        ExperimentKind::FinerProb => finer_prob(config)?,
        ExperimentKind::ExactProb => exact_prob(config)?,
        ExperimentKind::IsolatedMoments => isolated_moments(config)?,
        ExperimentKind::SizeDMoments => size_d_moments(config)?,
        ExperimentKind::LimitLaws => limit_laws(config)?,
        ExperimentKind::LargeClusters => large_clusters(config)?,
        ExperimentKind::LoopLengthLaw => loop_length_law(config)?,
        ExperimentKind::SizeGf => size_gf(config)?,
        ExperimentKind::ErBaseline => er_rows(config)?.iter().map(ErRow::to_report_row).collect(),
        ExperimentKind::PrimitiveLoops => primitive_loops(config)?,
    };
    let rows = match config.kind {
        ExperimentKind::ErBaseline => {
            let mut rows = rows;
            rows.extend(er_asymptotic_rows(config)?);
            rows
        }
        _ => rows,
    };
    Ok(ExperimentReport {
        metadata: ReportMetadata {
            kind: config.kind.name().into(),
            seed: config.seed,
            samples: config.samples,
            batches: config.batches,
            precision_bits: precision_bits(config),
            threads: thread_count(),
            wall_time_seconds: start.elapsed().as_secs_f64(),
        },
        rows,
    })
}

fn precision_bits(config: &ExperimentConfig) -> usize {
    let m = &config.model;
    let auto = exact::required_precision_bits(m.n.max(config.d * config.k), m) + 64;
    config.precision_bits.unwrap_or(match config.kind {
        ExperimentKind::SizeDMoments => auto.max(MIN_SIZE_D_BITS),
        _ => auto,
    })
}

fn sampler(config: &ExperimentConfig) -> Result<CompleteSampler> {
    CompleteSampler::new(config.model, config.tail_epsilon)
}

/// Draws every soup of the run, builds its cluster partition and hands the
/// builder to `observe`, which folds it into a per-batch accumulator.
fn over_clusters<T, I, O, M>(config: &ExperimentConfig, init: I, observe: O, merge: M) -> Result<T>
where
    T: Send,
    I: Fn() -> T + Sync,
    O: Fn(&mut T, &mut ClusterBuilder) + Sync,
    M: FnMut(&mut T, T),
{
    let s = sampler(config)?;
    let n = config.model.n;
    run_reduce(
        config.seed,
        config.samples,
        config.batches,
        |_, rng, count| {
            let mut acc = init();
            let mut builder = ClusterBuilder::new(n);
            for _ in 0..count {
                builder.reset();
                s.for_each_loop(rng, |w| builder.add_walk_unchecked(w));
                observe(&mut acc, &mut builder);
            }
            acc
        },
        merge,
    )
    .ok_or_else(|| Error::Degenerate("no batches".into()))
}

fn merge_counts(acc: &mut Vec<u64>, other: Vec<u64>) {
    if acc.len() < other.len() {
        acc.resize(other.len(), 0);
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

/// `{0}{1 2}` style, free of commas so CSV cells stay unquoted.
fn label(pi: &Partition) -> String {
    pi.blocks()
        .iter()
        .map(|b| format!("{{{}}}", b.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")))
        .collect()
}

/// Two halves, one vertex against the rest, and one pair among singletons.
pub fn default_partitions(n: usize) -> Vec<Partition> {
    let labels = |f: &dyn Fn(usize) -> usize| Partition::from_labels(&(0..n).map(f).collect::<Vec<_>>());
    let mut out: Vec<Partition> = Vec::new();
    for p in [
        labels(&|x| usize::from(x >= n / 2)),
        labels(&|x| usize::from(x > 0)),
        labels(&|x| x.saturating_sub(1)),
    ] {
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

fn finer_prob(config: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let parts = if config.partitions.is_empty() {
        default_partitions(config.model.n)
    } else {
        config.partitions.clone()
    };
    let hits = over_clusters(
        config,
        || vec![0u64; parts.len()],
        |acc, b| {
            for (h, pi) in acc.iter_mut().zip(&parts) {
                *h += u64::from(b.refines(pi));
            }
        },
        merge_counts,
    )?;
    parts
        .iter()
        .zip(hits)
        .map(|(pi, h)| {
            let p = exact::prob_finer(pi, &config.model)?;
            Ok(ReportRow::z_band(format!("finer{}", label(pi)), p, frequency(h, config.samples, p)?, Z_BAND))
        })
        .collect()
}

fn exact_prob(config: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let m = &config.model;
    if m.n > EXACT_PROB_MAX_N {
        return Err(Error::InvalidParameter(format!(
            "exact-prob walks the whole lattice; n must be at most {EXACT_PROB_MAX_N}"
        )));
    }
    let all: Vec<Partition> = enumerate_all(m.n, None)?.collect();
    let index: HashMap<Vec<usize>, usize> = all
        .iter()
        .enumerate()
        .map(|(i, p)| ((0..m.n).map(|x| p.block_of(x)).collect(), i))
        .collect();
    let bits = config.precision_bits;
    let probs = all
        .iter()
        .map(|p| exact::prob_exact_with(p, m, bits, None))
        .collect::<Result<Vec<_>>>()?;
    let hist = over_clusters(
        config,
        || vec![0u64; all.len()],
        |acc, b| {
            let c = b.finish().partition;
            let key: Vec<usize> = (0..m.n).map(|x| c.block_of(x)).collect();
            acc[index[&key]] += 1;
        },
        merge_counts,
    )?;
    let n_samples = config.samples as f64;
    let mut rows = Vec::new();
    rows.push(ReportRow::absolute("normalization", 1.0, probs.iter().sum(), 1e-9));
    let connected = exact::prob_connected(m)?;
    let coarsest = Partition::coarsest(m.n);
    let top = all.iter().position(|p| *p == coarsest).expect("enumeration covers the lattice");
    rows.push(ReportRow::absolute("connected-identity", probs[top], connected, 1e-9));
    rows.push(ReportRow::z_band(
        "connected-frequency",
        connected,
        frequency(hist[top], config.samples, connected)?,
        Z_BAND,
    ));
    for (i, p) in all.iter().enumerate() {
        if probs[i] * n_samples >= 20.0 {
            rows.push(ReportRow::z_band(
                format!("exact{}", label(p)),
                probs[i],
                frequency(hist[i], config.samples, probs[i])?,
                Z_BAND,
            ));
        }
    }
    let observed: Vec<f64> = hist.iter().map(|&h| h as f64).collect();
    let expected: Vec<f64> = probs.iter().map(|p| p * n_samples).collect();
    let chi = chi_square(&observed, &expected)?;
    rows.push(ReportRow::p_value("lattice-chi2", chi.p_value, TEST_LEVEL));
    Ok(rows)
}

fn count_moment_rows(
    name: &str,
    sums: &FactorialSums,
    k_max: usize,
    exact_of: impl Fn(usize) -> Result<f64>,
) -> Result<Vec<ReportRow>> {
    (1..=k_max)
        .map(|k| Ok(ReportRow::z_band(format!("{name}[k={k}]"), exact_of(k)?, sums.estimate(k)?, Z_BAND)))
        .collect()
}

fn isolated_count(b: &mut ClusterBuilder) -> u64 {
    b.cluster_sizes().into_iter().filter(|&s| s == 1).count() as u64
}

fn isolated_moments(config: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let sums = over_clusters(
        config,
        || FactorialSums::new(config.k),
        |acc, b| acc.push(isolated_count(b)),
        |a, b| a.merge(&b),
    )?;
    count_moment_rows("isolated-factorial-moment", &sums, config.k, |k| {
        exact::factorial_moment_isolated_vertices(k, &config.model)
    })
}

fn size_d_moments(config: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let d = config.d;
    let bits = precision_bits(config);
    let sums = over_clusters(
        config,
        || FactorialSums::new(config.k),
        |acc, b| acc.push(b.cluster_sizes().into_iter().filter(|&s| s == d).count() as u64),
        |a, b| a.merge(&b),
    )?;
    count_moment_rows(&format!("size-{d}-factorial-moment"), &sums, config.k, |k| {
        exact::factorial_moment_size_d(d, k, &config.model, bits)
    })
}

struct LimitAcc {
    fraction_moments: Vec<Welford>,
    hist: Vec<u64>,
}

fn limit_laws(config: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let m = config.model;
    let (d, n) = (config.d, m.n as f64);
    let acc = over_clusters(
        config,
        || LimitAcc {
            fraction_moments: vec![Welford::default(); config.k],
            hist: Vec::new(),
        },
        |acc, b| {
            let sizes = b.cluster_sizes();
            let frac = sizes.iter().filter(|&&s| s == 1).count() as f64 / n;
            for (k, w) in acc.fraction_moments.iter_mut().enumerate() {
                w.push(frac.powi(k as i32 + 1));
            }
            let count = sizes.iter().filter(|&&s| s == d).count();
            if acc.hist.len() <= count {
                acc.hist.resize(count + 1, 0);
            }
            acc.hist[count] += 1;
        },
        |a, b| {
            for (x, y) in a.fraction_moments.iter_mut().zip(&b.fraction_moments) {
                x.merge(y);
            }
            merge_counts(&mut a.hist, b.hist);
        },
    )?;
    let mut rows = Vec::new();
    for (k, w) in acc.fraction_moments.iter().enumerate() {
        let k = k + 1;
        let limit = exact::limit_moment_r(k, m.kappa, m.alpha);
        let est = w.estimate()?;
        rows.push(ReportRow::relative(format!("isolated-fraction-moment[k={k}]"), limit, est.mean, Some(est.stderr), 0.02));
    }
    let finite = exact::factorial_moment_isolated_vertices(1, &m)? / n;
    rows.push(ReportRow::info("isolated-fraction-mean-finite-n", Some(finite), acc.fraction_moments[0].mean(), None));

    let chi = mixture_chi_square(&acc.hist, config, MixtureForm::Corrected)?;
    rows.push(ReportRow::p_value(format!("size-{d}-count-mixture-chi2"), chi.p_value, TEST_LEVEL));
    rows.push(ReportRow::info(format!("size-{d}-count-mixture-statistic"), None, chi.statistic, None));
    let unscaled = mixture_chi_square(&acc.hist, config, MixtureForm::Displayed)?;
    rows.push(ReportRow::info(format!("size-{d}-count-unscaled-mixture-chi2"), None, unscaled.p_value, None));
    Ok(rows)
}

fn mixture_chi_square(hist: &[u64], config: &ExperimentConfig, form: MixtureForm) -> Result<ChiSquareResult> {
    let m = config.model;
    let samples = config.samples as f64;
    let mut expected = Vec::new();
    let mut cumulative = 0.0;
    let mut j = 0;
    while j < hist.len() || 1.0 - cumulative > 1e-9 {
        let p = exact::poisson_mixture_pmf_with(j, config.d, m.kappa, m.alpha, form)?;
        expected.push(p * samples);
        cumulative += p;
        j += 1;
        if j > 10_000 {
            break;
        }
    }
    let mut observed: Vec<f64> = hist.iter().map(|&h| h as f64).collect();
    observed.resize(expected.len(), 0.0);
    if let Some(last) = expected.last_mut() {
        *last += (1.0 - cumulative).max(0.0) * samples;
    }
    chi_square(&observed, &expected)
}

fn large_clusters(config: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let m = config.model;
    let threshold = (m.n as f64).powf(1.0 - config.epsilon);
    let (hits, max_sum) = over_clusters(
        config,
        || (0u64, 0u64),
        |acc, b| {
            let largest = b.max_cluster_size();
            acc.0 += u64::from(largest as f64 >= threshold);
            acc.1 += largest as u64;
        },
        |a, b| {
            a.0 += b.0;
            a.1 += b.1;
        },
    )?;
    let f = hits as f64 / config.samples as f64;
    let se = (f * (1.0 - f) / config.samples as f64).sqrt();
    let mass = exact::loop_mass(m.n, m.kappa);
    let reference = (m.n as f64 / m.kappa).ln();
    Ok(vec![
        ReportRow::at_least("large-cluster-fraction", f, Some(se), 0.95),
        ReportRow::info("mean-largest-cluster", None, max_sum as f64 / config.samples as f64, None),
        ReportRow::info("large-cluster-threshold", None, threshold, None),
        ReportRow::relative("loop-mass-vs-log(n/kappa)", reference, mass.exact, None, 0.05),
        ReportRow::info("loop-mass-approximate", Some(reference), mass.approximate, None),
    ])
}

/// Largest table used for the exact length-law diagnostic.
const LENGTH_TABLE_MAX: usize = 1 << 26;

fn loop_length_law(config: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let m = config.model;
    let s = sampler(config)?;
    let mut lengths = run_reduce(
        config.seed,
        config.samples,
        config.batches,
        |_, rng, count| (0..count).map(|_| s.sample_length(rng) as u64).collect::<Vec<_>>(),
        |a, b| a.extend(b),
    )
    .unwrap_or_default();
    let ln_n = (m.n as f64).ln();
    let u: Vec<f64> = lengths.iter().map(|&k| (k as f64).ln() / ln_n).collect();
    let ks = ks_uniform(&u)?;
    let mut rows = vec![
        ReportRow::below("length-law-ks-uniform", ks.statistic, ks.critical_value),
        ReportRow::info("length-law-ks-uniform-floor", None, 2f64.ln() / ln_n, None),
    ];
    let w = length_weights(m.n, m.kappa, config.tail_epsilon.max(1e-15))?;
    if w.cutoff <= LENGTH_TABLE_MAX {
        let mut cdf = Vec::with_capacity(w.weights.len());
        let mut acc = 0.0;
        for x in &w.weights {
            acc += x;
            cdf.push(acc / w.mass);
        }
        lengths.sort_unstable();
        let exact = ks_discrete(&lengths, |k| cdf.get(k as usize).copied().unwrap_or(1.0))?;
        rows.push(ReportRow::below("length-law-ks-exact-finite-n", exact.statistic, exact.critical_value));
    }
    Ok(rows)
}

fn size_gf(config: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let m = config.model;
    let s = sampler(config)?;
    let thetas = config.theta.clone();
    let (gf, counts) = run_reduce(
        config.seed,
        config.samples,
        config.batches,
        |_, rng, count| {
            let mut gf = vec![Welford::default(); thetas.len()];
            let mut counts = FactorialSums::new(2);
            for _ in 0..count {
                let mut size = 0i32;
                let loops = s.for_each_loop(rng, |w| size += w.len() as i32);
                counts.push(loops);
                for (acc, &t) in gf.iter_mut().zip(&thetas) {
                    acc.push(t.powi(size));
                }
            }
            (gf, counts)
        },
        |a, b| {
            for (x, y) in a.0.iter_mut().zip(&b.0) {
                x.merge(y);
            }
            a.1.merge(&b.1);
        },
    )
    .ok_or_else(|| Error::Degenerate("no batches".into()))?;
    let mut rows = Vec::new();
    for (acc, &t) in gf.iter().zip(&thetas) {
        rows.push(ReportRow::z_band(format!("size-gf[theta={t}]"), exact::size_gf(t, &m)?, acc.estimate()?, Z_BAND));
    }
    let rate = m.alpha * s.mass();
    rows.push(ReportRow::z_band("loop-count-mean", rate, counts.estimate(1)?, Z_BAND));
    rows.push(ReportRow::z_band("loop-count-second-factorial-moment", rate * rate, counts.estimate(2)?, Z_BAND));
    Ok(rows)
}

fn primitive_loops(config: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let m = config.model;
    let s = sampler(config)?;
    let first = Loop::new(vec![0, 1])?;
    let second = (m.n >= 4).then(|| Loop::new(vec![2, 3])).transpose()?;
    let (a, b, ab) = run_reduce(
        config.seed,
        config.samples,
        config.batches,
        |_, rng, count| {
            let mut acc = (0u64, 0u64, 0u64);
            for _ in 0..count {
                let projected = project_primitive(&s.sample_soup(rng));
                let x = projected.contains(&first);
                let y = second.as_ref().is_some_and(|l| projected.contains(l));
                acc.0 += u64::from(x);
                acc.1 += u64::from(y);
                acc.2 += u64::from(x && y);
            }
            acc
        },
        |acc, o| {
            acc.0 += o.0;
            acc.1 += o.1;
            acc.2 += o.2;
        },
    )
    .ok_or_else(|| Error::Degenerate("no batches".into()))?;
    let nu = first.measure_complete(m.n, m.kappa);
    let p = 1.0 - (1.0 - nu).powf(m.alpha);
    let n = config.samples as f64;
    let mut rows = vec![ReportRow::z_band("two-gon-inclusion", p, frequency(a, config.samples, p)?, Z_BAND)];
    if second.is_some() {
        let (fa, fb) = (a as f64 / n, b as f64 / n);
        let cov = ab as f64 / n - fa * fb;
        let se = (p * (1.0 - p) * p * (1.0 - p) / n).sqrt();
        rows.push(ReportRow::z_band(
            "disjoint-inclusion-covariance",
            0.0,
            Estimate { mean: cov, stderr: se },
            Z_BAND,
        ));
    }
    Ok(rows)
}

/// One line of the `er` report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErRow {
    pub n: usize,
    pub c: f64,
    pub d: usize,
    pub k: usize,
    pub exact: f64,
    pub estimate: f64,
    pub stderr: f64,
}

impl ErRow {
    pub fn z(&self) -> f64 {
        super::stats::z_score(self.exact, self.estimate, self.stderr)
    }

    pub fn passes(&self) -> bool {
        self.z().abs() <= Z_BAND
    }

    fn to_report_row(&self) -> ReportRow {
        ReportRow::z_band(
            format!("isolated-trees[d={},k={}]", self.d, self.k),
            self.exact,
            Estimate {
                mean: self.estimate,
                stderr: self.stderr,
            },
            Z_BAND,
        )
    }
}

struct ErAcc {
    trees: Vec<FactorialSums>,
    clusters: Vec<FactorialSums>,
    violations: u64,
}

fn er_sample(config: &ExperimentConfig) -> Result<ErAcc> {
    let params = ErParams::new(config.model.n, config.c)?;
    let dmax = config.d;
    let k = config.k;
    run_reduce(
        config.seed,
        config.samples,
        config.batches,
        |_, rng, count| {
            let mut acc = ErAcc {
                trees: vec![FactorialSums::new(k); dmax],
                clusters: vec![FactorialSums::new(k); dmax],
                violations: 0,
            };
            let mut trees = vec![0u64; dmax];
            let mut clusters = vec![0u64; dmax];
            for _ in 0..count {
                let g = er::sample_gnp(rng, &params);
                trees.iter_mut().for_each(|t| *t = 0);
                clusters.iter_mut().for_each(|t| *t = 0);
                for (size, edges) in er::components(&g) {
                    if size <= dmax {
                        clusters[size - 1] += 1;
                        trees[size - 1] += u64::from(edges + 1 == size);
                    }
                }
                for d in 0..dmax {
                    acc.trees[d].push(trees[d]);
                    acc.clusters[d].push(clusters[d]);
                    acc.violations += u64::from(trees[d] > clusters[d]);
                }
            }
            acc
        },
        |a, b| {
            for (x, y) in a.trees.iter_mut().zip(&b.trees) {
                x.merge(y);
            }
            for (x, y) in a.clusters.iter_mut().zip(&b.clusters) {
                x.merge(y);
            }
            a.violations += b.violations;
        },
    )
    .ok_or_else(|| Error::Degenerate("no batches".into()))
}

/// Tree-census factorial moments for `d <= config.d`, `k <= config.k`.
pub fn er_rows(config: &ExperimentConfig) -> Result<Vec<ErRow>> {
    let acc = er_sample(config)?;
    let n = config.model.n;
    let mut rows = Vec::new();
    for d in 1..=config.d {
        for k in 1..=config.k {
            let est = acc.trees[d - 1].estimate(k)?;
            rows.push(ErRow {
                n,
                c: config.c,
                d,
                k,
                exact: er::er_tree_factorial_moment(n, config.c, d, k)?,
                estimate: est.mean,
                stderr: est.stderr,
            });
        }
    }
    Ok(rows)
}

fn er_asymptotic_rows(config: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let acc = er_sample(config)?;
    let n = config.model.n as f64;
    let mut rows = vec![ReportRow::absolute("trees-le-clusters-violations", 0.0, acc.violations as f64, 0.0)];
    for d in 1..=config.d {
        let trees = acc.trees[d - 1].estimate(1)?;
        let clusters = acc.clusters[d - 1].estimate(1)?;
        rows.push(ReportRow::relative(
            format!("isolated-trees-per-vertex[d={d}]"),
            er::er_asymptotic_count(config.c, d),
            trees.mean / n,
            Some(trees.stderr / n),
            0.05,
        ));
        rows.push(ReportRow::info(
            format!("tree-to-cluster-ratio[d={d}]"),
            None,
            trees.mean / clusters.mean,
            None,
        ));
    }
    Ok(rows)
}

/// Exact-engine values for the `exact` subcommand.
pub fn exact_rows(config: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    let m: ModelParams = config.model;
    m.validate()?;
    let mass = exact::loop_mass(m.n, m.kappa);
    let mut rows = vec![
        ReportRow::info("loop-mass", None, mass.exact, None),
        ReportRow::info("loop-mass-approximate", None, mass.approximate, None),
        ReportRow::info("dgon-measure[d=2]", None, exact::dgon_measure(2, m.n, m.kappa), None),
        ReportRow::info("prob-connected", None, exact::prob_connected(&m)?, None),
    ];
    for k in 1..=config.k {
        rows.push(ReportRow::info(
            format!("isolated-factorial-moment[k={k}]"),
            None,
            exact::factorial_moment_isolated_vertices(k, &m)?,
            None,
        ));
        if config.d * k <= m.n {
            rows.push(ReportRow::info(
                format!("size-{}-factorial-moment[k={k}]", config.d),
                None,
                exact::factorial_moment_size_d(config.d, k, &m, precision_bits(config).max(MIN_SIZE_D_BITS))?,
                None,
            ));
        }
        rows.push(ReportRow::info(
            format!("isolated-fraction-limit[k={k}]"),
            None,
            exact::limit_moment_r(k, m.kappa, m.alpha),
            None,
        ));
    }
    for &t in &config.theta {
        rows.push(ReportRow::info(format!("size-gf[theta={t}]"), None, exact::size_gf(t, &m)?, None));
    }
    for pi in &config.partitions {
        rows.push(ReportRow::info(format!("finer{}", label(pi)), None, exact::prob_finer(pi, &m)?, None));
        rows.push(ReportRow::info(
            format!("exact{}", label(pi)),
            None,
            exact::prob_exact_with(pi, &m, config.precision_bits, None)?,
            None,
        ));
    }
    Ok(rows)
}

/// Cumulant ratios and loop mass against their large-`n` equivalents.
/// Bands apply at `n = 10^4` only; other sizes are informational.
pub fn asymptotic_rows(ns: &[usize], kappa: f64, alphas: &[f64], ds: &[usize]) -> Result<Vec<ReportRow>> {
    const BANDED_N: usize = 10_000;
    let mut rows = Vec::new();
    for &n in ns {
        for &alpha in alphas {
            let m = ModelParams::new(n, kappa, alpha)?;
            for &d in ds {
                let r = exact::cumulant_asymptotic_ratio(d, &m)?;
                let name = format!("cumulant-ratio[n={n},d={d},alpha={alpha}]");
                rows.push(if n == BANDED_N {
                    ReportRow::absolute(name, 1.0, r, 5e-3)
                } else {
                    ReportRow::info(name, Some(1.0), r, None)
                });
            }
        }
        let mass = exact::loop_mass(n, kappa);
        let reference = (n as f64 / kappa).ln();
        let name = format!("loop-mass-vs-log(n/kappa)[n={n}]");
        rows.push(if n == BANDED_N {
            ReportRow::relative(name, reference, mass.exact, None, 0.05)
        } else {
            ReportRow::info(name, Some(reference), mass.exact, None)
        });
    }
    Ok(rows)
}
