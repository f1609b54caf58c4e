//! Partition probabilities and factorial moments of cluster counts on `K_n`.

use astro_float::BigFloat;
use statrs::function::factorial::{ln_binomial, ln_factorial};

use super::hp::{big_to_f64, from_usize, RM};
use super::moments::{auto_precision_bits, big_moments, MomentTable};
use super::ModelParams;
use crate::graph::log_det_ratio;
use crate::partition::{enumerate_refinements, mobius_weight, Partition};
use crate::{Error, Result};

fn check_partition(pi: &Partition, params: &ModelParams) -> Result<()> {
    params.validate()?;
    if pi.ground_size() != params.n {
        return Err(Error::GroundSizeMismatch(pi.ground_size(), params.n));
    }
    Ok(())
}

/// `ln m_j` in double precision.
fn ln_moment(j: usize, params: &ModelParams) -> f64 {
    -params.alpha * (-(j as f64) / params.total()).ln_1p()
}

/// `P(C ⪰ pi) = (det ratio)^alpha = prod_i m_{|B_i|} / m_n`.
pub fn prob_finer(pi: &Partition, params: &ModelParams) -> Result<f64> {
    check_partition(pi, params)?;
    let ratio = log_det_ratio(&params.graph_spec(), pi)?;
    Ok((params.alpha * ratio).exp())
}

/// `P(C = pi)` by Möbius inversion over the refinements of `pi`, at an
/// automatically chosen precision and the default enumeration cap.
pub fn prob_exact(pi: &Partition, params: &ModelParams) -> Result<f64> {
    prob_exact_with(pi, params, None, None)
}

/// `P(C = pi) = sum_{tilde ⪰ pi} mu(tilde, pi) prod_{B in tilde} m_|B| / m_n`.
///
/// The alternating sum is accumulated at `precision_bits` (default: enough
/// for the moment table up to `n`).
pub fn prob_exact_with(
    pi: &Partition,
    params: &ModelParams,
    precision_bits: Option<usize>,
    cap: Option<u128>,
) -> Result<f64> {
    check_partition(pi, params)?;
    let refinements = enumerate_refinements(pi, cap)?;
    let p = precision_bits.unwrap_or_else(|| auto_precision_bits(params.n, params));
    let moments = big_moments(params.n, params, p)?;
    let mut total = BigFloat::from_u64(0, p);
    for tilde in refinements {
        let weight = mobius_weight(&tilde, pi)?;
        let mut term = BigFloat::from_i128(weight, p);
        for block in tilde.blocks() {
            term = term.mul(&moments[block.len()], p, RM);
        }
        total = total.add(&term, p, RM);
    }
    Ok(big_to_f64(&total.div(&moments[params.n], p, RM)))
}

/// `P(C = {X}) = c_n / m_n`.
pub fn prob_connected(params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let table = MomentTable::auto(params.n, params)?;
    Ok(big_to_f64(&table.connected_ratio(params.n)))
}

/// Probability that disjoint vertex sets of the given sizes are all isolated:
/// `prod_i m_{d_i} * m_{n - sum d_i} / m_n`.
pub fn prob_isolated_sets(sizes: &[usize], params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let used: usize = sizes.iter().sum();
    if used > params.n {
        return Err(Error::InvalidParameter(format!(
            "set sizes sum to {used}, more than n = {}",
            params.n
        )));
    }
    if sizes.contains(&0) {
        return Err(Error::InvalidParameter("set sizes must be positive".into()));
    }
    let log: f64 = sizes.iter().map(|&d| ln_moment(d, params)).sum::<f64>()
        + ln_moment(params.n - used, params)
        - ln_moment(params.n, params);
    Ok(log.exp())
}

fn ln_falling(n: usize, k: usize) -> f64 {
    (0..k).map(|i| ((n - i) as f64).ln()).sum()
}

/// `E[|I_1|(|I_1|-1)...(|I_1|-k+1)] = n^(k) (kappa/(k+kappa))^alpha (1 - 1/(n+kappa))^(-k alpha)`.
pub fn factorial_moment_isolated_vertices(k: usize, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    if k > params.n {
        return Ok(0.0);
    }
    let kf = k as f64;
    let log = ln_falling(params.n, k)
        + params.alpha * (params.kappa / (kf + params.kappa)).ln()
        + kf * ln_moment(1, params);
    Ok(log.exp())
}

/// `k`-th factorial moment of the number `|I_d|` of clusters of size `d`:
/// `prod_{j<k} binom(n - j d, d) * c_d^k * (kappa/(k d + kappa))^alpha`.
///
/// `c_d` comes from a moment table at `precision_bits`.
pub fn factorial_moment_size_d(
    d: usize,
    k: usize,
    params: &ModelParams,
    precision_bits: usize,
) -> Result<f64> {
    params.validate()?;
    if d == 0 {
        return Err(Error::InvalidParameter("cluster size must be positive".into()));
    }
    if k == 0 {
        return Ok(1.0);
    }
    if k * d > params.n {
        return Ok(0.0);
    }
    let table = MomentTable::new(d, params, precision_bits)?;
    let c = table.cumulant_f64(d);
    if !(c > 0.0) {
        return Err(Error::InsufficientPrecision {
            given: precision_bits,
            required: precision_bits + 64,
        });
    }
    let binomials: f64 = (0..k)
        .map(|j| ln_binomial((params.n - j * d) as u64, d as u64))
        .sum();
    let kd = (k * d) as f64;
    let log = binomials + k as f64 * c.ln() + params.alpha * (params.kappa / (kd + params.kappa)).ln();
    Ok(log.exp())
}

/// `c_d / (alpha (d-1)! n^(-d))`, which tends to 1 as `n` grows.
pub fn cumulant_asymptotic_ratio(d: usize, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    if d < 2 {
        return Err(Error::InvalidParameter("cluster size must be at least 2".into()));
    }
    let table = MomentTable::auto(d, params)?;
    let p = table.precision_bits();
    let scaled = table
        .cumulant(d)
        .mul(&from_usize(params.n, p).powi(d, p, RM), p, RM);
    let log = big_to_f64(&scaled).ln() - params.alpha.ln() - ln_factorial((d - 1) as u64);
    Ok(log.exp())
}
