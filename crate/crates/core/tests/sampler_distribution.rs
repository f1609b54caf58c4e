//! Distributional checks of the loop sampler against enumeration and exact values.

use std::collections::HashMap;

use loopsoup::exact::{dgon_measure, loop_mass, size_gf, ModelParams};
use loopsoup::graph::GraphSpec;
use loopsoup::harness::stats::{chi_square, chi_square_two_sample, frequency, FactorialSums, TEST_LEVEL};
use loopsoup::rng::seeded;
use loopsoup::sampler::{length_weights, project_primitive, CompleteSampler, GeneralSampler, Loop, DEFAULT_TAIL_EPSILON};

fn complete(n: usize, kappa: f64, alpha: f64) -> CompleteSampler {
    CompleteSampler::new(ModelParams::new(n, kappa, alpha).unwrap(), DEFAULT_TAIL_EPSILON).unwrap()
}

/// Every closed walk of length `k` on `K_n`, as base-pointed sequences.
fn closed_walks(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut walk = vec![0usize; k];
    fn rec(n: usize, i: usize, walk: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let k = walk.len();
        if i == k {
            if walk[k - 1] != walk[0] {
                out.push(walk.clone());
            }
            return;
        }
        for v in 0..n {
            if i == 0 || walk[i - 1] != v {
                walk[i] = v;
                rec(n, i + 1, walk, out);
            }
        }
    }
    rec(n, 0, &mut walk, &mut out);
    out
}

#[test]
fn bridge_is_uniform_over_closed_walks() {
    let s = complete(4, 1.0, 1.0);
    let mut rng = seeded(101);
    let mut walk = Vec::new();
    for k in 2..=5 {
        let all = closed_walks(4, k);
        let index: HashMap<Vec<usize>, usize> = all.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let draws = 200 * all.len();
        let mut observed = vec![0.0; all.len()];
        for _ in 0..draws {
            s.sample_walk(&mut rng, k, &mut walk);
            observed[index[&walk]] += 1.0;
        }
        let expected = vec![draws as f64 / all.len() as f64; all.len()];
        let chi = chi_square(&observed, &expected).unwrap();
        assert!(chi.p_value > TEST_LEVEL, "k={k}: p={}", chi.p_value);
    }
}

#[test]
fn length_histogram_matches_weights() {
    let (n, kappa) = (3, 1.0);
    let s = complete(n, kappa, 1.0);
    let w = length_weights(n, kappa, DEFAULT_TAIL_EPSILON).unwrap();
    let mut rng = seeded(102);
    let draws = 1_000_000;
    let mut hist = vec![0.0; w.weights.len()];
    for _ in 0..draws {
        hist[s.sample_length(&mut rng)] += 1.0;
    }
    let total = w.sum();
    let expected: Vec<f64> = w.weights.iter().map(|x| x / total * draws as f64).collect();
    let chi = chi_square(&hist[2..], &expected[2..]).unwrap();
    assert!(chi.p_value > TEST_LEVEL, "p={}", chi.p_value);
}

#[test]
fn fixed_two_gon_frequency() {
    let s = complete(3, 1.0, 1.0);
    let mut rng = seeded(103);
    let target = Loop::new(vec![0, 1]).unwrap();
    let draws = 1_000_000u64;
    let hits = (0..draws).filter(|_| s.sample_loop(&mut rng) == target).count() as u64;
    let p = dgon_measure(2, 3, 1.0) / s.mass();
    let est = frequency(hits, draws, p).unwrap();
    assert!(est.z_score(p).abs() < 4.0, "{} vs {p}", est.mean);
}

#[test]
fn soup_counts_are_poisson_with_exact_mass() {
    let m = ModelParams::new(2, 1.0, 1.0).unwrap();
    let s = complete(2, 1.0, 1.0);
    let mut rng = seeded(104);
    let soups = 1_000_000u64;
    let mut counts = FactorialSums::new(2);
    let mut empty = 0u64;
    for _ in 0..soups {
        let c = s.sample_count(&mut rng);
        counts.push(c);
        empty += u64::from(c == 0);
    }
    let rate = loop_mass(2, 1.0).exact;
    assert!((rate - (4.0f64 / 3.0).ln()).abs() < 1e-15);
    assert!(counts.estimate(1).unwrap().z_score(rate).abs() < 4.0);
    // Var N = E N for a Poisson count: E[N(N-1)] = (E N)^2.
    assert!(counts.estimate(2).unwrap().z_score(rate * rate).abs() < 4.0);
    let p0 = size_gf(0.0, &m).unwrap();
    assert!((p0 - (-rate).exp()).abs() < 1e-15);
    assert!(frequency(empty, soups, p0).unwrap().z_score(p0).abs() < 4.0);
}

#[test]
fn primitive_inclusion_probability() {
    let s = complete(3, 1.0, 1.0);
    let mut rng = seeded(105);
    let target = Loop::new(vec![1, 2]).unwrap();
    let soups = 300_000u64;
    let hits = (0..soups)
        .filter(|_| project_primitive(&s.sample_soup(&mut rng)).contains(&target))
        .count() as u64;
    let p = 1.0 / 9.0;
    assert!(frequency(hits, soups, p).unwrap().z_score(p).abs() < 4.0);
}

#[test]
fn general_sampler_agrees_with_fast_path() {
    let (n, kappa) = (5, 1.0);
    let fast = complete(n, kappa, 1.0);
    let g = GraphSpec::complete(n, kappa).unwrap().to_dense();
    let general = GeneralSampler::new(&g, 1.0, DEFAULT_TAIL_EPSILON).unwrap();
    let draws = 100_000;
    let bins = 40;
    let mut a = vec![0u64; bins];
    let mut b = vec![0u64; bins];
    let mut rng = seeded(106);
    for _ in 0..draws {
        a[fast.sample_loop(&mut rng).len().min(bins - 1)] += 1;
        b[general.sample_loop(&mut rng).len().min(bins - 1)] += 1;
    }
    let chi = chi_square_two_sample(&a[2..], &b[2..]).unwrap();
    assert!(chi.p_value > TEST_LEVEL, "p={}", chi.p_value);
    assert!((fast.mass() - general.mass()).abs() < 1e-12);
}

#[test]
fn general_sampler_bridge_on_weighted_graph() {
    // Path 0-1-2 with unequal conductances: closed walks of length 4 from the
    // walk measure, checked against the product of transition entries.
    let c = vec![0.0, 2.0, 0.0, 2.0, 0.0, 1.0, 0.0, 1.0, 0.0];
    let g = GraphSpec::dense(3, c, vec![0.5, 0.5, 0.5]).unwrap();
    let p = loopsoup::graph::build_transition(&g).unwrap();
    let s = GeneralSampler::new(&g, 1.0, DEFAULT_TAIL_EPSILON).unwrap();
    let walks: Vec<Vec<usize>> = closed_walks(3, 4)
        .into_iter()
        .filter(|w| (0..4).all(|i| p.entry(w[i], w[(i + 1) % 4]) > 0.0))
        .collect();
    let weight = |w: &Vec<usize>| (0..4).map(|i| p.entry(w[i], w[(i + 1) % 4])).product::<f64>();
    let total: f64 = walks.iter().map(weight).sum();
    let mut rng = seeded(107);
    let draws = 200_000;
    let index: HashMap<&Vec<usize>, usize> = walks.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut observed = vec![0.0; walks.len()];
    let mut buf = Vec::new();
    for _ in 0..draws {
        s.sample_walk(&mut rng, 4, &mut buf);
        observed[index[&buf]] += 1.0;
    }
    let expected: Vec<f64> = walks.iter().map(|w| weight(w) / total * draws as f64).collect();
    let chi = chi_square(&observed, &expected).unwrap();
    assert!(chi.p_value > TEST_LEVEL, "p={}", chi.p_value);
}

#[test]
fn soups_are_reproducible() {
    let s = complete(20, 0.5, 1.5);
    let a: Vec<_> = (0..200).scan(seeded(9), |r, _| Some(s.sample_soup(r))).collect();
    let b: Vec<_> = (0..200).scan(seeded(9), |r, _| Some(s.sample_soup(r))).collect();
    assert_eq!(a, b);
    for soup in &a {
        for l in soup.loops() {
            let v = l.vertices();
            assert!(v.len() >= 2 && (0..v.len()).all(|i| v[i] != v[(i + 1) % v.len()]));
        }
        assert_eq!(soup.total_size(), soup.loops().iter().map(|l| l.len()).sum::<usize>());
    }
}
