//! Mutual-information lower bounds for a source observed through auxiliary
//! Gaussian noise, and a jointly Gaussian test channel that meets them.
//!
//! All values are in nats per source sample.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Minimum sample count accepted by the Monte Carlo estimator.
pub const MIN_SAMPLES: usize = 10_000;

/// Auxiliary noise variances `tau <= tau_prime` and the distortion achieved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxNoiseParams {
    tau: f64,
    tau_prime: f64,
    distortion: f64,
}

impl AuxNoiseParams {
    pub fn new(tau: f64, tau_prime: f64, distortion: f64) -> Result<Self> {
        if !(tau >= 0.0) {
            return Err(Error::InvalidAuxParams("tau must be non-negative"));
        }
        if !(tau_prime >= tau && tau_prime.is_finite()) {
            return Err(Error::InvalidAuxParams(
                "tau_prime must be finite and at least tau",
            ));
        }
        if !(distortion > 0.0 && distortion <= 1.0) {
            return Err(Error::InvalidAuxParams("distortion must lie in (0, 1]"));
        }
        Ok(Self {
            tau,
            tau_prime,
            distortion,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn tau_prime(&self) -> f64 {
        self.tau_prime
    }

    pub fn distortion(&self) -> f64 {
        self.distortion
    }
}

/// `½ ln((1 + τ') / (D + τ'))`, written as a `log1p` so that small values
/// keep full relative precision.
pub fn mi_lower_bound(p: &AuxNoiseParams) -> f64 {
    let AuxNoiseParams {
        tau_prime: t,
        distortion: d,
        ..
    } = *p;
    0.5 * libm::log1p((1.0 - d) / (d + t))
}

/// `½ ln((1 + τ)(D + τ') / ((1 + τ')(D + τ)))`.
///
/// The ratio minus one is `(τ' - τ)(1 - D) / ((1 + τ')(D + τ))`.
pub fn mi_difference_lower_bound(p: &AuxNoiseParams) -> f64 {
    let AuxNoiseParams {
        tau: t,
        tau_prime: tp,
        distortion: d,
    } = *p;
    0.5 * libm::log1p((tp - t) * (1.0 - d) / ((1.0 + tp) * (d + t)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleMi {
    /// `I(W; U')`.
    pub at_tau_prime: f64,
    /// `I(W; U) - I(W; U')`, computed as `I(W; U | U')`.
    pub difference: f64,
}

/// Exact mutual informations of the linear-Gaussian test channel
/// `S = W + E`, `U = S + V`, `U' = U + ΔV` with independent zero-mean
/// Gaussian components of variances `1 - D`, `D`, `τ`, `τ' - τ`. The
/// estimator `W` has error `E` orthogonal to it, so its MSE is exactly `D`.
///
/// Conditional variances are obtained in precision form
/// (`1/var(X | Y) = 1/var(X) + 1/var(noise)`), which never subtracts.
pub fn gaussian_oracle_mi(p: &AuxNoiseParams) -> Result<OracleMi> {
    if !(p.distortion < 1.0) {
        return Err(Error::InvalidAuxParams("the test channel needs D < 1"));
    }
    let var_w = 1.0 - p.distortion;
    let var_e = p.distortion;
    let var_v = p.tau;
    let var_dv = p.tau_prime - p.tau;

    // U' given W keeps the error and both noises; unconditionally W adds on top.
    let cond_u_prime = var_e + var_v + var_dv;
    let at_tau_prime = 0.5 * libm::log1p(var_w / cond_u_prime);

    // I(W; U | U') = ½ ln(var(U | U') / var(U | U', W)).
    let var_u = var_w + var_e + var_v;
    let var_u_given_w = var_e + var_v;
    let prec_given_u_prime = 1.0 / var_u + 1.0 / var_dv;
    // 1/var(U | U', W) - 1/var(U | U') = 1/var(U | W) - 1/var(U) = var_w / (var_u · var_u_given_w)
    let excess = var_w / (var_u * var_u_given_w);
    let difference = 0.5 * libm::log1p(excess / prec_given_u_prime);

    Ok(OracleMi {
        at_tau_prime,
        difference,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub standard_error: f64,
    pub samples: usize,
}

/// Monte Carlo estimate of `I(W; U')` for the test channel of
/// [`gaussian_oracle_mi`], averaging the exact log density ratio
/// `ln p(u' | w) - ln p(u')` over `samples` draws from a ChaCha8 stream
/// seeded with `seed`.
pub fn monte_carlo_mi_estimate(
    p: &AuxNoiseParams,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    monte_carlo_mi_estimate_with(p, samples, ChaCha8Rng::seed_from_u64(seed))
}

/// [`monte_carlo_mi_estimate`] with a caller-supplied generator.
pub fn monte_carlo_mi_estimate_with<R: RngCore>(
    p: &AuxNoiseParams,
    samples: usize,
    mut rng: R,
) -> Result<MonteCarloEstimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            min: MIN_SAMPLES,
            actual: samples,
        });
    }
    if !(p.distortion < 1.0) {
        return Err(Error::InvalidAuxParams("the test channel needs D < 1"));
    }
    let sd_w = libm::sqrt(1.0 - p.distortion);
    let sd_noise = libm::sqrt(p.distortion + p.tau_prime);
    let var_cond = p.distortion + p.tau_prime;
    let var_marg = 1.0 + p.tau_prime;
    let log_norm = 0.5 * libm::log(var_marg / var_cond);

    // Welford accumulation of the per-sample log ratio
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 0..samples {
        let z_w: f64 = StandardNormal.sample(&mut rng);
        let z_n: f64 = StandardNormal.sample(&mut rng);
        let w = sd_w * z_w;
        let u = w + sd_noise * z_n;
        let r = u - w;
        let x = log_norm - r * r / (2.0 * var_cond) + u * u / (2.0 * var_marg);
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    let n = samples as f64;
    let variance = m2 / (n - 1.0);
    Ok(MonteCarloEstimate {
        estimate: mean,
        standard_error: libm::sqrt(variance / n),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(tau: f64, tau_prime: f64, d: f64) -> AuxNoiseParams {
        AuxNoiseParams::new(tau, tau_prime, d).unwrap()
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(mi_lower_bound(&params(0.0, 0.3, 1.0)), 0.0);
        assert!((mi_lower_bound(&params(0.0, 0.0, 0.25)) - 0.5 * libm::log(4.0)).abs() < 1e-15);
        // ½ ln(1.5/0.6) to 40 digits
        assert!((mi_lower_bound(&params(0.0, 0.5, 0.1)) - 0.458_145_365_937_077_5).abs() < 1e-15);
    }

    #[test]
    fn difference_examples() {
        assert_eq!(mi_difference_lower_bound(&params(0.4, 0.4, 0.2)), 0.0);
        assert_eq!(mi_difference_lower_bound(&params(0.1, 0.7, 1.0)), 0.0);
        // ½ ln(2.2)
        let v = mi_difference_lower_bound(&params(0.1, 0.5, 0.1));
        assert!((v - 0.394_228_680_182_135_1).abs() < 1e-15);
    }

    #[test]
    fn oracle_matches_bounds() {
        let p = params(0.1, 0.5, 0.1);
        let o = gaussian_oracle_mi(&p).unwrap();
        assert!((o.at_tau_prime - mi_lower_bound(&p)).abs() <= 1e-15);
        assert!((o.difference - mi_difference_lower_bound(&p)).abs() <= 1e-15);
        let same = gaussian_oracle_mi(&params(0.3, 0.3, 0.5)).unwrap();
        assert_eq!(same.difference, 0.0);
        assert!(gaussian_oracle_mi(&params(0.1, 0.2, 1.0)).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(AuxNoiseParams::new(-0.1, 0.2, 0.5).is_err());
        assert!(AuxNoiseParams::new(0.3, 0.2, 0.5).is_err());
        assert!(AuxNoiseParams::new(0.1, f64::INFINITY, 0.5).is_err());
        assert!(AuxNoiseParams::new(0.1, 0.2, 0.0).is_err());
        assert!(AuxNoiseParams::new(0.1, 0.2, 1.1).is_err());
    }

    #[test]
    fn monte_carlo_contract() {
        let p = params(0.0, 0.5, 0.1);
        assert!(matches!(
            monte_carlo_mi_estimate(&p, 100, 1),
            Err(Error::InsufficientSamples { .. })
        ));
        assert!(monte_carlo_mi_estimate(&params(0.0, 0.5, 1.0), 20_000, 1).is_err());
        let a = monte_carlo_mi_estimate(&p, 20_000, 7).unwrap();
        let b = monte_carlo_mi_estimate(&p, 20_000, 7).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        assert!((a.estimate - mi_lower_bound(&p)).abs() < 5.0 * a.standard_error);
    }
}
