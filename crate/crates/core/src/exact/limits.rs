//! Large-`n` limit laws.
//!
//! `|I_1|/n` tends to `R = exp(-Z/kappa)` and `|I_d|` to a Poisson mixture
//! with random intensity `(alpha/d) H`, `H = exp(-Z d/kappa)`, `Z ~ Gamma(alpha, 1)`.
//! The factorial moments of `|I_d|` tend to `(alpha/d)^k E[H^k]`, which pins
//! the `alpha/d` scale.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::{Error, Result};

/// `E[R^k] = (kappa/(k + kappa))^alpha`.
pub fn limit_moment_r(k: usize, kappa: f64, alpha: f64) -> f64 {
    (kappa / (k as f64 + kappa)).powf(alpha)
}

/// `E[H^k] = (kappa/(k d + kappa))^alpha`.
pub fn limit_moment_h(k: usize, d: usize, kappa: f64, alpha: f64) -> f64 {
    (kappa / ((k * d) as f64 + kappa)).powf(alpha)
}

fn check(d: usize, kappa: f64, alpha: f64) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidParameter("cluster size must be positive".into()));
    }
    if !(kappa > 0.0 && kappa.is_finite() && alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("need kappa, alpha > 0, got {kappa}, {alpha}")));
    }
    Ok(())
}

/// Intensity of the Poisson mixture.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixtureForm {
    /// `(alpha/d) H`, matching the limiting factorial moments.
    #[default]
    Corrected,
    /// `H` alone.
    Displayed,
}

impl MixtureForm {
    fn scale(self, d: usize, alpha: f64) -> f64 {
        match self {
            MixtureForm::Corrected => alpha / d as f64,
            MixtureForm::Displayed => 1.0,
        }
    }
}

const QUADRATURE_TOLERANCE: f64 = 1e-12;

/// `P(|I_d| = k)` in the limit: `E[L^k e^{-L}] / k!` with `L = (alpha/d) H`.
pub fn poisson_mixture_pmf(k: usize, d: usize, kappa: f64, alpha: f64) -> Result<f64> {
    poisson_mixture_pmf_with(k, d, kappa, alpha, MixtureForm::Corrected)
}

/// [`poisson_mixture_pmf`] for either intensity, integrated against the
/// Gamma density of `Z`.
pub fn poisson_mixture_pmf_with(k: usize, d: usize, kappa: f64, alpha: f64, form: MixtureForm) -> Result<f64> {
    check(d, kappa, alpha)?;
    let scale = form.scale(d, alpha);
    let ln_scale = scale.ln();
    let rate = d as f64 / kappa;
    let ln_k_fact = ln_gamma(k as f64 + 1.0);
    let ln_norm = ln_gamma(alpha);
    // Below alpha = 1 the density has a z^(alpha-1) spike at 0; with
    // z = t^(1/alpha) the factor z^(alpha-1) dz becomes dt/alpha.
    let power = alpha.min(1.0);
    let integrand = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let z = t.powf(1.0 / power);
        let h = scale * (-rate * z).exp();
        let log = (alpha - power) * z.ln() - power.ln() - z - ln_norm + k as f64 * (ln_scale - rate * z) - h - ln_k_fact;
        log.exp()
    };
    // Past z_max the Gamma tail is below 1e-17.
    let mut z_max = alpha + 40.0;
    while (alpha - 1.0) * z_max.ln() - z_max - ln_norm > (1e-17f64).ln() {
        z_max *= 1.5;
    }
    // The integrand is smooth away from 0 but concentrated near it when
    // k is large, so split the range.
    let breaks = [0.0f64, 1.0, 8.0, z_max].map(|z| z.powf(power));
    let mut total = 0.0;
    let mut error = 0.0;
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let out = quadrature::integrate(integrand, w[0], w[1], QUADRATURE_TOLERANCE);
        total += out.integral;
        error += out.error_estimate;
    }
    if !(error <= 1e-10) || !total.is_finite() {
        return Err(Error::Quadrature(error));
    }
    Ok(total)
}

/// Same quantity from the alternating series
/// `sum_j (-1)^j E[L^{k+j}] / (k! j!)`.
pub fn poisson_mixture_pmf_series(k: usize, d: usize, kappa: f64, alpha: f64) -> Result<f64> {
    poisson_mixture_pmf_series_with(k, d, kappa, alpha, MixtureForm::Corrected)
}

pub fn poisson_mixture_pmf_series_with(k: usize, d: usize, kappa: f64, alpha: f64, form: MixtureForm) -> Result<f64> {
    check(d, kappa, alpha)?;
    let scale = form.scale(d, alpha);
    let k_fact = gamma(k as f64 + 1.0);
    let mut sum = 0.0;
    let mut j_fact = 1.0;
    for j in 0..200usize {
        if j > 0 {
            j_fact *= j as f64;
        }
        let term = scale.powi((k + j) as i32) * limit_moment_h(k + j, d, kappa, alpha) / (k_fact * j_fact);
        sum += if j % 2 == 0 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limit_moment_values() {
        assert_eq!(limit_moment_r(0, 1.0, 1.0), 1.0);
        assert_eq!(limit_moment_r(1, 1.0, 1.0), 0.5);
        assert_eq!(limit_moment_h(0, 2, 1.0, 1.0), 1.0);
        assert!((limit_moment_h(1, 2, 1.0, 1.0) - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn pmf_uniform_case() {
        // alpha = 1 and kappa = d make H uniform on [0, 1].
        // Unscaled: P(0) = 1 - 1/e and P(1) = int_0^1 x e^{-x} dx = 1 - 2/e.
        let p0 = poisson_mixture_pmf_with(0, 2, 2.0, 1.0, MixtureForm::Displayed).unwrap();
        assert!((p0 - (1.0 - (-1.0f64).exp())).abs() < 1e-10, "{p0}");
        let p1 = poisson_mixture_pmf_with(1, 3, 3.0, 1.0, MixtureForm::Displayed).unwrap();
        assert!((p1 - (1.0 - 2.0 * (-1.0f64).exp())).abs() < 1e-10, "{p1}");
        // Scaled by 1/d: P(0) = d (1 - e^{-1/d}), P(1) = d (1 - (1 + 1/d) e^{-1/d}).
        let p0 = poisson_mixture_pmf(0, 2, 2.0, 1.0).unwrap();
        assert!((p0 - 2.0 * (1.0 - (-0.5f64).exp())).abs() < 1e-10, "{p0}");
        let p1 = poisson_mixture_pmf(1, 3, 3.0, 1.0).unwrap();
        assert!((p1 - 3.0 * (1.0 - (4.0 / 3.0) * (-1.0f64 / 3.0).exp())).abs() < 1e-10, "{p1}");
    }

    #[test]
    fn factorial_moments_of_the_mixture() {
        // sum_j (j)_k P(j) = (alpha/d)^k E[H^k].
        for (d, kappa, alpha) in [(2, 2.0, 1.0), (3, 0.5, 2.0), (2, 1.0, 0.5)] {
            for k in 1..=3usize {
                let moment: f64 = (k..80)
                    .map(|j| {
                        let falling: f64 = (0..k).map(|i| (j - i) as f64).product();
                        falling * poisson_mixture_pmf(j, d, kappa, alpha).unwrap()
                    })
                    .sum();
                let want = (alpha / d as f64).powi(k as i32) * limit_moment_h(k, d, kappa, alpha);
                assert!((moment - want).abs() < 1e-9 * want.max(1.0), "{d} {kappa} {alpha} k={k}: {moment} vs {want}");
            }
        }
    }

    #[test]
    fn pmf_normalized() {
        for (d, kappa, alpha) in [(2, 2.0, 1.0), (1, 1.0, 0.5), (3, 0.5, 2.0), (2, 1.0, 3.5)] {
            let total: f64 = (0..=50).map(|k| poisson_mixture_pmf(k, d, kappa, alpha).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-8, "{d} {kappa} {alpha}: {total}");
        }
    }

    #[test]
    fn quadrature_matches_series() {
        for (d, kappa, alpha) in [(2, 2.0, 1.0), (1, 1.0, 0.5), (3, 0.5, 2.0), (2, 1.0, 0.3), (4, 7.0, 1.7)] {
            for k in 0..8 {
                let q = poisson_mixture_pmf(k, d, kappa, alpha).unwrap();
                let s = poisson_mixture_pmf_series(k, d, kappa, alpha).unwrap();
                assert!((q - s).abs() < 1e-8, "k={k} d={d}: {q} vs {s}");
                let q = poisson_mixture_pmf_with(k, d, kappa, alpha, MixtureForm::Displayed).unwrap();
                let s = poisson_mixture_pmf_series_with(k, d, kappa, alpha, MixtureForm::Displayed).unwrap();
                assert!((q - s).abs() < 1e-8, "k={k} d={d}: {q} vs {s}");
            }
        }
    }

    #[test]
    fn pmf_rejects_bad_input() {
        assert!(poisson_mixture_pmf(0, 0, 1.0, 1.0).is_err());
        assert!(poisson_mixture_pmf(0, 1, -1.0, 1.0).is_err());
        assert!(poisson_mixture_pmf_series(0, 1, 1.0, 0.0).is_err());
    }
}
