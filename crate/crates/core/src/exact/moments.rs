//! Moments and cumulants of `Y = exp(Z/(n+kappa))`, `Z ~ Gamma(alpha, 1)`.
//!
//! `m_j = E[Y^j] = (1 - j/(n+kappa))^(-alpha)` for `j < n + kappa`, and the
//! cumulants follow from
//!
//! ```text
//! c_j = m_j - sum_{i=1}^{j-1} binom(j-1, i-1) c_i m_{j-i}
//! ```
//!
//! `c_d` is of order `n^(-d)` while the moments are of order one, so the
//! recursion loses about `d log2(n + kappa)` bits. Tables refuse to run below
//! `ceil(d log2(n+kappa)) + 64` mantissa bits.

use astro_float::{BigFloat, RoundingMode};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::hp::{big_to_decimal, big_to_f64, consts, from_usize, RM};
use super::ModelParams;
use crate::{Error, Result};

/// Guard bits kept on top of the cancellation loss.
const GUARD_BITS: usize = 64;

/// `ceil(upto * log2(n + kappa)) + 64`.
pub fn required_precision_bits(upto: usize, params: &ModelParams) -> usize {
    (upto as f64 * params.total().log2()).ceil() as usize + GUARD_BITS
}

/// Working precision chosen automatically: the requirement plus one more guard word.
pub(crate) fn auto_precision_bits(upto: usize, params: &ModelParams) -> usize {
    required_precision_bits(upto, params).max(64) + 64
}

fn check_index(j: usize, params: &ModelParams) -> Result<()> {
    if j as f64 >= params.total() {
        return Err(Error::MomentUndefined {
            j,
            limit: params.total(),
        });
    }
    Ok(())
}

/// `m_j` in double precision.
pub fn moment(j: usize, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    check_index(j, params)?;
    Ok((-params.alpha * (-(j as f64) / params.total()).ln_1p()).exp())
}

/// `m_0..=m_upto` at `bits` of precision. The base `(n + kappa - j)/(n + kappa)`
/// is formed exactly from the binary value of `kappa` and rounded once, so the
/// only other rounding is the `alpha` power.
pub(crate) fn big_moments(upto: usize, params: &ModelParams, bits: usize) -> Result<Vec<BigFloat>> {
    params.validate()?;
    check_index(upto, params)?;
    let mut cc = consts();
    // n + kappa is exact once the precision covers both binary expansions.
    let total_bits = bits + 128;
    let total = from_usize(params.n, total_bits).add(&BigFloat::from_f64(params.kappa, total_bits), total_bits, RM);
    let exponent = BigFloat::from_f64(-params.alpha, bits);
    let integer_alpha = params.alpha.fract() == 0.0 && params.alpha <= 64.0;
    let mut out = Vec::with_capacity(upto + 1);
    out.push(BigFloat::from_u64(1, bits));
    for j in 1..=upto {
        let numerator = total.sub(&from_usize(j, total_bits), total_bits, RM);
        let m = if integer_alpha {
            // (N / (N - j))^alpha with exact integer powers of numerator and denominator.
            let a = params.alpha as usize;
            let up = total.powi(a, total_bits + 64 * a, RM);
            let down = numerator.powi(a, total_bits + 64 * a, RM);
            up.div(&down, bits, RM)
        } else {
            // Exact results (e.g. 0.25^-0.5) make the correctly rounded pow spin,
            // so evaluate unrounded with a guard word and round once.
            let base = numerator.div(&total, bits + 64, RM);
            let mut m = base.pow(&exponent, bits + 64, RoundingMode::None, &mut cc);
            m.set_precision(bits, RM).expect("precision is positive");
            m
        };
        out.push(m);
    }
    Ok(out)
}

/// Moments `m_0..=m_J` and cumulants `c_1..=c_J` at a fixed working precision.
#[derive(Clone, Debug)]
pub struct MomentTable {
    params: ModelParams,
    precision_bits: usize,
    moments: Vec<BigFloat>,
    /// `cumulants[j]` is `c_j`; index 0 is unused and holds zero.
    cumulants: Vec<BigFloat>,
}

/// The moment table up to `upto`, computed at `precision_bits`.
pub fn cumulants(upto: usize, params: &ModelParams, precision_bits: usize) -> Result<MomentTable> {
    MomentTable::new(upto, params, precision_bits)
}

impl MomentTable {
    pub fn new(upto: usize, params: &ModelParams, precision_bits: usize) -> Result<Self> {
        let required = required_precision_bits(upto, params);
        if precision_bits < required {
            return Err(Error::InsufficientPrecision {
                given: precision_bits,
                required,
            });
        }
        let p = precision_bits;
        let moments = big_moments(upto, params, p)?;
        let mut cumulants: Vec<BigFloat> = vec![BigFloat::from_u64(0, p); upto + 1];
        for j in 1..=upto {
            // binom(j-1, i-1) for i = 1.. built incrementally.
            let mut binom = BigFloat::from_u64(1, p);
            let mut acc = BigFloat::from_u64(0, p);
            for i in 1..j {
                if i > 1 {
                    binom = binom
                        .mul(&from_usize(j - i + 1, p), p, RM)
                        .div(&from_usize(i - 1, p), p, RM);
                }
                let term = binom.mul(&cumulants[i], p, RM).mul(&moments[j - i], p, RM);
                acc = acc.add(&term, p, RM);
            }
            cumulants[j] = moments[j].sub(&acc, p, RM);
        }
        Ok(Self {
            params: *params,
            precision_bits,
            moments,
            cumulants,
        })
    }

    /// Table at an automatically chosen precision.
    pub fn auto(upto: usize, params: &ModelParams) -> Result<Self> {
        Self::new(upto, params, auto_precision_bits(upto, params))
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn precision_bits(&self) -> usize {
        self.precision_bits
    }

    /// Largest index `J` held by the table.
    pub fn upto(&self) -> usize {
        self.moments.len() - 1
    }

    pub fn moment(&self, j: usize) -> &BigFloat {
        &self.moments[j]
    }

    /// `c_j` for `1 <= j <= J`.
    pub fn cumulant(&self, j: usize) -> &BigFloat {
        assert!(j >= 1, "cumulants start at index 1");
        &self.cumulants[j]
    }

    pub fn moment_f64(&self, j: usize) -> f64 {
        big_to_f64(&self.moments[j])
    }

    pub fn cumulant_f64(&self, j: usize) -> f64 {
        big_to_f64(self.cumulant(j))
    }

    /// `c_j / m_j` at full working precision.
    pub fn connected_ratio(&self, j: usize) -> BigFloat {
        let p = self.precision_bits;
        self.cumulant(j).div(&self.moments[j], p, RM)
    }
}

impl Serialize for MomentTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("MomentTable", 4)?;
        st.serialize_field("params", &self.params)?;
        st.serialize_field("precision_bits", &self.precision_bits)?;
        let moments: Vec<String> = self.moments.iter().map(big_to_decimal).collect();
        let cumulants: Vec<String> = self.cumulants[1..].iter().map(big_to_decimal).collect();
        st.serialize_field("moments", &moments)?;
        st.serialize_field("cumulants", &cumulants)?;
        st.end()
    }
}
