//! The Erdős–Rényi graph `G(n, c/n)`: sampling, isolated-tree and
//! isolated-cluster censuses, and the factorial moments of the tree census.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::{ln_binomial, ln_factorial};

use crate::cluster::UnionFind;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErParams {
    pub n: usize,
    pub c: f64,
}

impl ErParams {
    pub fn new(n: usize, c: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("n must be at least 2, got {n}")));
        }
        if !(c > 0.0 && c < n as f64) {
            return Err(Error::InvalidParameter(format!("c must lie in (0, n), got {c}")));
        }
        Ok(Self { n, c })
    }

    /// Edge probability `c/n`.
    pub fn p(&self) -> f64 {
        self.c / self.n as f64
    }
}

/// An undirected simple graph as an edge list with `u > v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErGraph {
    pub n: usize,
    pub edges: Vec<(u32, u32)>,
}

/// Each of the `n(n-1)/2` edges independently with probability `c/n`,
/// by geometric skipping over the lexicographic edge order.
pub fn sample_gnp<R: Rng + ?Sized>(rng: &mut R, params: &ErParams) -> ErGraph {
    let n = params.n as i64;
    let ln_q = (-params.p()).ln_1p();
    let mut edges = Vec::new();
    let (mut v, mut w) = (1i64, -1i64);
    while v < n {
        let r: f64 = rng.gen();
        let skip = ((-r).ln_1p() / ln_q).floor();
        w += 1 + if skip.is_finite() { skip.min(1e15) as i64 } else { i64::MAX / 4 };
        while w >= v && v < n {
            w -= v;
            v += 1;
        }
        if v < n {
            edges.push((v as u32, w as u32));
        }
    }
    ErGraph {
        n: params.n,
        edges,
    }
}

/// `(vertices, edges)` of every connected component.
pub fn components(graph: &ErGraph) -> Vec<(usize, usize)> {
    let mut uf = UnionFind::new(graph.n);
    for &(u, v) in &graph.edges {
        uf.union(u as usize, v as usize);
    }
    let mut edge_count = vec![0usize; graph.n];
    for &(u, _) in &graph.edges {
        edge_count[uf.find(u as usize)] += 1;
    }
    let mut out = Vec::new();
    for x in 0..graph.n {
        if uf.find(x) == x {
            out.push((uf.set_size(x), edge_count[x]));
        }
    }
    out
}

/// Isolated trees and isolated clusters with `d` vertices, counted together.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Census {
    pub trees: usize,
    pub clusters: usize,
}

pub fn census(graph: &ErGraph, d: usize) -> Census {
    components(graph)
        .into_iter()
        .filter(|&(size, _)| size == d)
        .fold(Census::default(), |mut acc, (_, edges)| {
            acc.clusters += 1;
            acc.trees += usize::from(edges + 1 == d);
            acc
        })
}

pub fn isolated_tree_census(graph: &ErGraph, d: usize) -> usize {
    census(graph, d).trees
}

pub fn isolated_cluster_census(graph: &ErGraph, d: usize) -> usize {
    census(graph, d).clusters
}

/// Which closed form to evaluate for the tree-census factorial moments.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeMomentForm {
    /// With the `(d^{d-2})^k` spanning-tree factor and the within-block
    /// exponent counted once per block.
    #[default]
    Corrected,
    /// No spanning-tree factor and a single within-block exponent term.
    Displayed,
}

struct Exponents {
    p: u64,
    q: u64,
    trees: u64,
}

fn exponents(n: usize, d: usize, k: usize, form: TreeMomentForm) -> Exponents {
    let (n, d, k) = (n as u64, d as u64, k as u64);
    let inside = d * (d - 1) / 2 - (d - 1);
    let outside = k * d * (n - k * d) + k * (k - 1) * d * d / 2;
    match form {
        TreeMomentForm::Corrected => Exponents {
            p: k * (d - 1),
            q: outside + k * inside,
            trees: k,
        },
        TreeMomentForm::Displayed => Exponents {
            p: k * (d - 1),
            q: outside + inside,
            trees: 0,
        },
    }
}

fn check_args(n: usize, d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidParameter("tree size d must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    Ok(())
}

/// `E[X(X-1)...(X-k+1)]` for the number `X` of isolated trees with `d` vertices.
pub fn er_tree_factorial_moment(n: usize, c: f64, d: usize, k: usize) -> Result<f64> {
    er_tree_factorial_moment_with(n, c, d, k, TreeMomentForm::Corrected)
}

pub fn er_tree_factorial_moment_with(n: usize, c: f64, d: usize, k: usize, form: TreeMomentForm) -> Result<f64> {
    check_args(n, d)?;
    let params = ErParams::new(n, c)?;
    if k == 0 {
        return Ok(1.0);
    }
    if k * d > n {
        return Ok(0.0);
    }
    let p = params.p();
    let e = exponents(n, d, k, form);
    let mut ln = (0..k).map(|j| ln_binomial((n - j * d) as u64, d as u64)).sum::<f64>();
    if d >= 2 {
        ln += e.trees as f64 * (d as f64 - 2.0) * (d as f64).ln();
        ln += e.p as f64 * p.ln();
    }
    ln += e.q as f64 * (-p).ln_1p();
    Ok(ln.exp())
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// The same factorial moment in exact rational arithmetic, for edge probability `p`.
pub fn er_tree_factorial_moment_exact(
    n: usize,
    p: &BigRational,
    d: usize,
    k: usize,
    form: TreeMomentForm,
) -> Result<BigRational> {
    check_args(n, d)?;
    if !(p > &BigRational::zero() && p < &BigRational::one()) {
        return Err(Error::InvalidParameter(format!("edge probability must lie in (0, 1), got {p}")));
    }
    if k == 0 {
        return Ok(BigRational::one());
    }
    if k * d > n {
        return Ok(BigRational::zero());
    }
    let e = exponents(n, d, k, form);
    let q = BigRational::one() - p;
    let count: BigInt = (0..k).map(|j| binomial(n - j * d, d)).product();
    let trees = if d >= 2 {
        BigInt::from(d).pow((d as u32 - 2) * e.trees as u32)
    } else {
        BigInt::one()
    };
    let mut value = BigRational::from_integer(count * trees);
    value *= num_traits::pow(p.clone(), e.p as usize);
    value *= num_traits::pow(q, e.q as usize);
    Ok(value)
}

/// `d^{d-2} c^{d-1} e^{-cd} / d!`, the limiting census per vertex.
pub fn er_asymptotic_count(c: f64, d: usize) -> f64 {
    let d_f = d as f64;
    let ln = (d_f - 2.0) * d_f.ln() + (d_f - 1.0) * c.ln() - c * d_f - ln_factorial(d as u64);
    ln.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn graph(n: usize, edges: &[(u32, u32)]) -> ErGraph {
        ErGraph {
            n,
            edges: edges.to_vec(),
        }
    }

    #[test]
    fn census_examples() {
        let empty = graph(5, &[]);
        assert_eq!(isolated_tree_census(&empty, 1), 5);
        assert_eq!(isolated_cluster_census(&empty, 1), 5);
        let tri = graph(5, &[(1, 0), (2, 1), (2, 0)]);
        assert_eq!(isolated_cluster_census(&tri, 3), 1);
        assert_eq!(isolated_tree_census(&tri, 3), 0);
        let path = graph(5, &[(1, 0), (2, 1)]);
        assert_eq!(census(&path, 3), Census { trees: 1, clusters: 1 });
        assert_eq!(census(&path, 1), Census { trees: 2, clusters: 2 });
    }

    #[test]
    fn moment_examples() {
        let n = 40;
        let c = 1.5;
        let p = c / n as f64;
        let m = er_tree_factorial_moment(n, c, 1, 1).unwrap();
        assert!((m - n as f64 * (1.0 - p).powi(n as i32 - 1)).abs() < 1e-12 * m);
        let m = er_tree_factorial_moment(4, 1.0, 2, 1).unwrap();
        assert!((m - 0.474609375).abs() < 1e-12);
        assert_eq!(er_tree_factorial_moment(4, 1.0, 3, 2).unwrap(), 0.0);
        assert_eq!(er_tree_factorial_moment(4, 1.0, 3, 0).unwrap(), 1.0);
        assert!(er_tree_factorial_moment(4, 1.0, 0, 1).is_err());
    }

    #[test]
    fn float_and_rational_agree() {
        for form in [TreeMomentForm::Corrected, TreeMomentForm::Displayed] {
            for &(n, d, k) in &[(6, 2, 2), (10, 3, 2), (12, 1, 3), (9, 4, 1)] {
                let p = BigRational::new(1.into(), 4.into());
                let exact = er_tree_factorial_moment_exact(n, &p, d, k, form).unwrap();
                let exact = exact.numer().to_string().parse::<f64>().unwrap()
                    / exact.denom().to_string().parse::<f64>().unwrap();
                let approx = er_tree_factorial_moment_with(n, n as f64 / 4.0, d, k, form).unwrap();
                assert!((approx - exact).abs() <= 1e-12 * exact.abs(), "{n} {d} {k}: {approx} vs {exact}");
            }
        }
    }

    #[test]
    fn edge_count_mean() {
        let params = ErParams::new(100, 1.0).unwrap();
        let mut rng = seeded(17);
        let samples = 100_000;
        let counts: Vec<f64> = (0..samples).map(|_| sample_gnp(&mut rng, &params).edges.len() as f64).collect();
        let mean = counts.iter().sum::<f64>() / samples as f64;
        let var = counts.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
        let expected = 4950.0 * 0.01;
        assert!((mean - expected).abs() < 4.0 * (var / samples as f64).sqrt(), "{mean}");
    }

    #[test]
    fn edges_are_valid_and_distinct() {
        let params = ErParams::new(30, 10.0).unwrap();
        let mut rng = seeded(4);
        for _ in 0..200 {
            let g = sample_gnp(&mut rng, &params);
            let mut seen = std::collections::BTreeSet::new();
            for &(u, v) in &g.edges {
                assert!(u > v && (u as usize) < 30);
                assert!(seen.insert((u, v)));
            }
        }
    }

    #[test]
    fn tiny_c_gives_empty_graphs() {
        let params = ErParams::new(50, 1e-9).unwrap();
        let mut rng = seeded(8);
        assert!((0..1000).all(|_| sample_gnp(&mut rng, &params).edges.is_empty()));
    }

    #[test]
    fn asymptotic_count_values() {
        assert!((er_asymptotic_count(1.0, 1) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((er_asymptotic_count(1.0, 2) - 0.5 * (-2.0f64).exp()).abs() < 1e-15);
        assert!((er_asymptotic_count(1.0, 3) - 0.5 * (-3.0f64).exp()).abs() < 1e-15);
    }
}
