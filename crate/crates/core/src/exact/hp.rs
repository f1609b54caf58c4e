//! Thin helpers over `astro-float`.

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};

pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

pub(crate) fn consts() -> Consts {
    Consts::new().expect("allocating the astro-float constants cache")
}

pub(crate) fn from_usize(x: usize, p: usize) -> BigFloat {
    BigFloat::from_u64(x as u64, p)
}

/// Nearest `f64` (to within one ulp).
pub fn big_to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let Some((words, _, sign, exponent, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    if words.iter().all(|&w| w == 0) {
        return 0.0;
    }
    // Value is 0.m * 2^exponent with the most significant word last; keep the
    // top 128 bits and round them once to the width of the target double.
    let top = words[words.len() - 1] as u128;
    let next = if words.len() > 1 { words[words.len() - 2] as u128 } else { 0 };
    let m = (top << 64) | next;
    let lz = m.leading_zeros() as i64;
    let m = m << lz;
    // m / 2^128 in [1/2, 1), so the value lies in [2^e, 2^(e+1)).
    let e = exponent as i64 - 1 - lz;
    if e > 1023 {
        return if sign == Sign::Neg { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    let bits = if e >= -1022 { 53 } else { e + 1075 };
    let magnitude = if bits <= 0 {
        0.0
    } else {
        let drop = 128 - bits as u32;
        let mut kept = m >> drop;
        let rest = m & ((1u128 << drop) - 1);
        let half = 1u128 << (drop - 1);
        if rest > half || (rest == half && kept & 1 == 1) {
            kept += 1;
        }
        // kept * 2^(e + 1 - bits) is exact: the scale factors are powers of two.
        let lsb = e + 1 - bits;
        (kept as f64) * 2f64.powi((lsb / 2) as i32) * 2f64.powi((lsb - lsb / 2) as i32)
    };
    if sign == Sign::Neg {
        -magnitude
    } else {
        magnitude
    }
}

/// Full-precision decimal rendering.
pub fn big_to_decimal(x: &BigFloat) -> String {
    let mut cc = consts();
    x.format(Radix::Dec, RM, &mut cc)
        .unwrap_or_else(|_| "NaN".to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversion_round_trips_doubles() {
        for v in [1.0, -2.5, 0.1, 1e-300, 3.0e300, 123456.789, -7.0e-20, 2.2250738585072014e-308] {
            assert_eq!(big_to_f64(&BigFloat::from_f64(v, 256)), v, "{v}");
        }
        // BigFloat::from_f64 halves subnormals, so build those from decimal.
        let mut cc = consts();
        for v in [1e-310, 5e-324, -3.7e-320] {
            let b = BigFloat::parse(&format!("{v:e}"), Radix::Dec, 256, RM, &mut cc);
            assert_eq!(big_to_f64(&b), v, "{v}");
        }
        assert_eq!(big_to_f64(&BigFloat::from_f64(0.0, 128)), 0.0);
    }

    #[test]
    fn conversion_of_a_high_precision_quotient() {
        let p = 256;
        let q = BigFloat::from_u64(1, p).div(&BigFloat::from_u64(3, p), p, RM);
        assert_eq!(big_to_f64(&q), 1.0 / 3.0);
        let s = big_to_decimal(&q);
        assert!(s.starts_with("3.33333333333333333333333333333"), "{s}");
    }
}
