//! Loop-measure quantities on `K_n`: d-gon masses, total mass, the generating
//! function of the soup size and the expected loop support.

use serde::Serialize;

use super::ModelParams;
use crate::graph::TransitionMatrix;
use crate::{Error, Result};

/// `nu` of one d-gon, `(n + kappa - 1)^(-d)`.
pub fn dgon_measure(d: usize, n: usize, kappa: f64) -> f64 {
    ((n - 1) as f64 + kappa).powi(-(d as i32))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LoopMass {
    /// `-ln det(I - P) = sum_k tr(P^k)/k`.
    pub exact: f64,
    /// `n/(n-1) (-ln(1 - q) - q)` with `q = (n-1)/(n-1+kappa)`, the large-`n`
    /// approximation that drops the `(-1)^k` eigenvalues.
    pub approximate: f64,
}

/// Total mass of the loop measure on `K_n`. Both forms grow like `ln(n/kappa)`.
pub fn loop_mass(n: usize, kappa: f64) -> LoopMass {
    let a = (n - 1) as f64;
    let lambda = a + kappa;
    let q = a / lambda;
    let ln_one_minus_q = (kappa / lambda).ln();
    LoopMass {
        exact: -ln_one_minus_q - a * (1.0 / lambda).ln_1p(),
        approximate: (n as f64 / a) * (-ln_one_minus_q - q),
    }
}

/// Mass of the loop measure for an arbitrary transition matrix, `-sum ln(1 - mu)`.
pub fn loop_mass_general(p: &TransitionMatrix) -> f64 {
    -p.eigenvalues().iter().map(|mu| (-mu).ln_1p()).sum::<f64>()
}

/// `E[theta^M] = (det(I - P)/det(I - theta P))^alpha` for the total soup size `M`.
pub fn size_gf(theta: f64, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let a = (params.n - 1) as f64;
    let lambda = a + params.kappa;
    let bound = lambda / a;
    if !(0.0..bound).contains(&theta) {
        return Err(Error::OutOfRange { theta, bound });
    }
    // Eigenvalues of P: a/lambda once, -1/lambda with multiplicity a.
    let log_det = |t: f64| (-t * a / lambda).ln_1p() + a * (t / lambda).ln_1p();
    Ok((params.alpha * (log_det(1.0) - log_det(theta))).exp())
}

/// [`size_gf`] on any graph, from the spectrum of its transition matrix.
pub fn size_gf_general(theta: f64, p: &TransitionMatrix, alpha: f64) -> Result<f64> {
    let bound = 1.0 / p.spectral_radius();
    if !(0.0..bound).contains(&theta) {
        return Err(Error::OutOfRange { theta, bound });
    }
    let log_det = |t: f64| p.eigenvalues().iter().map(|mu| (-t * mu).ln_1p()).sum::<f64>();
    Ok((alpha * (log_det(1.0) - log_det(theta))).exp())
}

/// `n (1 - (1 - 1/n)^x)`, the support size of `x` uniform draws from `n` vertices.
pub fn expected_support(n: usize, x: usize) -> f64 {
    let n = n as f64;
    n * -((x as f64) * (-1.0 / n).ln_1p()).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_transition, GraphSpec};
    use approx::assert_relative_eq;

    #[test]
    fn dgon_values() {
        assert_eq!(dgon_measure(2, 2, 1.0), 0.25);
        assert_relative_eq!(dgon_measure(3, 3, 1.0), 1.0 / 27.0, max_relative = 1e-15);
        // Fixed 2-gon on K_3: P_xy P_yx = (1/3)^2.
        let p = build_transition(&GraphSpec::complete(3, 1.0).unwrap()).unwrap();
        assert_relative_eq!(dgon_measure(2, 3, 1.0), p.entry(0, 1) * p.entry(1, 0), max_relative = 1e-15);
    }

    #[test]
    fn mass_values() {
        let m = loop_mass(2, 1.0);
        assert_relative_eq!(m.exact, (4.0f64 / 3.0).ln(), max_relative = 1e-14);
        assert_relative_eq!(m.approximate, 2.0 * (2f64.ln() - 0.5), max_relative = 1e-14);
        let g = GraphSpec::complete(7, 0.3).unwrap();
        let p = build_transition(&g.to_dense()).unwrap();
        assert_relative_eq!(loop_mass(7, 0.3).exact, loop_mass_general(&p), max_relative = 1e-12);
        // Trace series.
        let fast = build_transition(&g).unwrap();
        let series: f64 = (2..20_000u32).map(|k| fast.trace_power(k) / k as f64).sum();
        assert_relative_eq!(loop_mass(7, 0.3).exact, series, max_relative = 1e-12);
    }

    #[test]
    fn mass_grows_like_log() {
        // Both expressions sit about 1 below ln(n/kappa).
        let m = loop_mass(10_000, 1.0);
        let log = (10_000f64).ln();
        assert!((m.exact - (log - 1.0)).abs() < 1e-3);
        assert!((m.approximate - (log - 1.0)).abs() < 2e-3);
        let m = loop_mass(1_000_000_000, 1.0);
        assert!((m.exact / (1e9f64).ln() - 1.0).abs() < 0.05);
    }

    #[test]
    fn gf_values() {
        let p = ModelParams::new(2, 1.0, 1.0).unwrap();
        assert_relative_eq!(size_gf(1.0, &p).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(size_gf(0.5, &p).unwrap(), 0.8, max_relative = 1e-14);
        let p = ModelParams::new(5, 1.0, 1.5).unwrap();
        assert_relative_eq!(
            size_gf(0.0, &p).unwrap(),
            (-1.5 * loop_mass(5, 1.0).exact).exp(),
            max_relative = 1e-14
        );
        assert!(size_gf(5.0 / 4.0, &p).is_err());
        assert!(size_gf(-0.1, &p).is_err());
        let t = build_transition(&GraphSpec::complete(5, 1.0).unwrap().to_dense()).unwrap();
        for theta in [0.0, 0.5, 0.9, 1.2] {
            assert_relative_eq!(size_gf(theta, &p).unwrap(), size_gf_general(theta, &t, 1.5).unwrap(), max_relative = 1e-12);
        }
    }

    #[test]
    fn support_values() {
        assert_relative_eq!(expected_support(10, 2), 1.9, max_relative = 1e-14);
        assert_relative_eq!(expected_support(10, 100_000), 10.0, max_relative = 1e-14);
    }
}
