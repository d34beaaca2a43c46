//! Constructive choices of the auxiliary noise variances and the relaxed
//! distortion vector.
//!
//! Each construction comes with a verifier for the identity its use relies
//! on, so callers can check a certificate instead of trusting it.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{DistortionVector, TauVector};
use crate::regions::parametric_brackets;

/// Below this, `1 - f·d_k` is treated as zero and the closed-form start of
/// the recursion is replaced by the infinite sentinel.
pub const SINGULAR_DENOMINATOR: f64 = 1e-12;

/// `τ_k = d_k` for every user but the last.
pub fn tau_for_pow2(d: &DistortionVector) -> TauVector {
    let v = d.as_slice();
    let tau = v[..v.len().saturating_sub(1)].to_vec();
    TauVector::new(tau).expect("distortion vectors are ordered and positive")
}

/// Factor used by the sub-recursion that follows the users with `d_k > 1/K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitFactor {
    /// Keep the factor `K` after the split, so every post-split inequality
    /// except the last holds with equality at factor `K`.
    #[default]
    Full,
    /// Treat the remaining `K - r` users as a system of their own and run the
    /// recursion with factor `K - r`; the inequalities then hold with slack at
    /// factor `K`.
    Reduced,
}

/// Output of [`tau_for_kfactor`].
#[derive(Debug, Clone, PartialEq)]
pub struct KfactorCertificate {
    pub tau: TauVector,
    /// `α_k = d_k (1 + τ_k) / (d_{k+1} + τ_k)`, with the limit `d_k` for an
    /// infinite `τ_k`.
    pub alpha: Vec<f64>,
    /// Signed residuals of the K-factor inequalities, see [`verify_kfactor`].
    pub residuals: Vec<f64>,
    /// Number of leading users with `d_k > 1/K`.
    pub split_index: usize,
    pub factor: SplitFactor,
}

impl KfactorCertificate {
    /// Checks the certificate's claims with residual tolerance `rel_tol`
    /// relative to `1/(K d_k)` and an additive tolerance `alpha_tol` on the
    /// `α_k <= 1/(K-k)` bounds (1-based `k`).
    pub fn holds(&self, d: &DistortionVector, rel_tol: f64, alpha_tol: f64) -> bool {
        let users = d.len();
        let v = d.as_slice();
        let r = self.split_index;
        let scale = |k: usize| 1.0 / (users as f64 * v[k]);
        let equalities = self.factor == SplitFactor::Full || r == 0;
        let residuals_ok = self.residuals.iter().enumerate().all(|(k, &res)| {
            let tol = rel_tol * scale(k);
            if k + 1 == users || k < r || !equalities {
                res >= -tol
            } else {
                res.abs() <= tol
            }
        });
        let alpha_ok = self
            .alpha
            .iter()
            .enumerate()
            .skip(r)
            .all(|(k, &a)| a <= 1.0 / (users - k - 1) as f64 + alpha_tol);
        residuals_ok && alpha_ok
    }
}

fn alpha(d: &[f64], tau: &[f64], k: usize) -> f64 {
    if tau[k].is_infinite() {
        d[k]
    } else {
        d[k] * (1.0 + tau[k]) / (d[k + 1] + tau[k])
    }
}

/// Auxiliary variances certifying that the `K`-scaled outer bound contains the
/// parametric one at `d`.
///
/// Users with `d_k > 1/K` get the infinite sentinel; the rest are set by the
/// closed-form start `τ = (f-1) d / (1 - f d)` followed by
/// `τ_{k+1} = d_{k+1} (1 - α_k) / (α_k - d_{k+1})`, where `f` is `K` or
/// `K - r` depending on `factor`. A tie `d_k = 1/K` goes to the recursion.
pub fn tau_for_kfactor(d: &DistortionVector, factor: SplitFactor) -> Result<KfactorCertificate> {
    let v = d.as_slice();
    let users = v.len();
    let k_f = users as f64;
    let split = v.iter().take_while(|&&x| x > 1.0 / k_f).count();
    let mut tau = alloc::vec![0.0; users.saturating_sub(1)];
    for t in tau.iter_mut().take(split) {
        *t = TauVector::INFINITE;
    }

    if split + 1 < users {
        let f = match factor {
            SplitFactor::Full => k_f,
            SplitFactor::Reduced => (users - split) as f64,
        };
        let denom = 1.0 - f * v[split];
        tau[split] = if denom < SINGULAR_DENOMINATOR {
            TauVector::INFINITE
        } else {
            (f - 1.0) * v[split] / denom
        };
        for k in split..users - 2 {
            let a = alpha(v, &tau, k);
            let gap = a - v[k + 1];
            if !(gap > 0.0) {
                return Err(Error::DegenerateDenominator { index: k, gap });
            }
            let next = v[k + 1] * (1.0 - a) / gap;
            // the recursion lands in [0, τ_k]; rounding can overshoot by an ulp
            tau[k + 1] = next.clamp(0.0, tau[k]);
        }
    }

    let alpha = (0..users.saturating_sub(1))
        .map(|k| alpha(v, &tau, k))
        .collect();
    let tau = TauVector::new(tau)?;
    let residuals = verify_kfactor(users, d, &tau)?;
    Ok(KfactorCertificate {
        tau,
        alpha,
        residuals,
        split_index: split,
        factor,
    })
}

/// Residuals `bracket_k - 1/(K d_k)` of the K-factor inequalities, where
/// `bracket_k` is the parametric bracket at `tau`. Infinite entries of `tau`
/// enter through their limits.
pub fn verify_kfactor(users: usize, d: &DistortionVector, tau: &TauVector) -> Result<Vec<f64>> {
    if d.len() != users {
        return Err(Error::DimensionMismatch {
            expected: users,
            actual: d.len(),
        });
    }
    tau.check_users(users)?;
    let k_f = users as f64;
    Ok(parametric_brackets(d.as_slice(), tau)
        .into_iter()
        .zip(d.as_slice())
        .map(|(bracket, &dk)| bracket - 1.0 / (k_f * dk))
        .collect())
}

/// Relaxed distortions together with their binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedVector {
    pub d_star: Vec<f64>,
    pub labels: Vec<bool>,
}

impl RelaxedVector {
    pub fn label_count(&self) -> usize {
        self.labels.iter().filter(|&&b| b).count()
    }
}

/// The relaxation recursion: starting from `D*_0 = 1`, user `k` inherits
/// `D*_{k-1}` when `2^(1+s) d_k >= D*_{k-1}` and otherwise gets
/// `2^(1+s) d_k` and a label, where `s` counts the labels so far.
pub fn relaxed_vector(d: &DistortionVector) -> RelaxedVector {
    let v = d.as_slice();
    let mut d_star = Vec::with_capacity(v.len());
    let mut labels = Vec::with_capacity(v.len());
    let mut prev = 1.0;
    let mut count: i32 = 0;
    for &dk in v {
        let scaled = libm::ldexp(dk, 1 + count);
        if scaled >= prev {
            labels.push(false);
        } else {
            prev = scaled;
            count += 1;
            labels.push(true);
        }
        d_star.push(prev);
    }
    RelaxedVector { d_star, labels }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelBudget {
    pub labels: usize,
    /// `log2(d_0) - log2(d_{K-1}) + 1`.
    pub bound: f64,
    pub holds: bool,
}

/// Label count against its logarithmic budget.
pub fn label_budget(labels: &[bool], d: &DistortionVector) -> Result<LabelBudget> {
    if labels.len() != d.len() {
        return Err(Error::LengthMismatch {
            expected: d.len(),
            actual: labels.len(),
        });
    }
    let v = d.as_slice();
    let count = labels.iter().filter(|&&b| b).count();
    let bound = libm::log2(v[0]) - libm::log2(v[v.len() - 1]) + 1.0;
    Ok(LabelBudget {
        labels: count,
        bound,
        holds: count as f64 <= bound,
    })
}

/// Auxiliary variances that collapse the parametric bound onto the relaxed
/// vector: labelled users take `τ_k = d_k`, the others repeat `τ_{k-1}`, and
/// the chain starts from an infinite `τ_0` so that unlabelled leading users
/// contribute exactly `ΔN_k`.
pub fn tau_for_relaxed(d: &DistortionVector, labels: &[bool]) -> Result<TauVector> {
    tau_for_relaxed_with_start(d, labels, TauVector::INFINITE)
}

/// [`tau_for_relaxed`] with an explicit starting value `τ_0`.
///
/// Any finite start weakens the bound on the unlabelled prefix; with
/// `τ_0 = 1` the collapsed sum can drop below `Σ ΔN_k (D*_k)^(-1/b)`.
pub fn tau_for_relaxed_with_start(
    d: &DistortionVector,
    labels: &[bool],
    start: f64,
) -> Result<TauVector> {
    if relaxed_vector(d).labels != labels {
        return Err(Error::InconsistentLabels);
    }
    let v = d.as_slice();
    let mut prev = start;
    let tau = v[..v.len() - 1]
        .iter()
        .zip(labels)
        .map(|(&dk, &b)| {
            if b {
                prev = dk;
            }
            prev
        })
        .collect();
    TauVector::new(tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn dv(v: &[f64]) -> DistortionVector {
        DistortionVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn pow2_tau_examples() {
        assert_eq!(tau_for_pow2(&dv(&[0.5, 0.3, 0.1])).as_slice(), &[0.5, 0.3]);
        assert!(tau_for_pow2(&dv(&[0.4])).is_empty());
        assert_eq!(tau_for_pow2(&dv(&[0.2, 0.2])).as_slice(), &[0.2]);
    }

    #[test]
    fn kfactor_two_users() {
        let d = dv(&[0.25, 0.1]);
        let cert = tau_for_kfactor(&d, SplitFactor::Full).unwrap();
        assert_eq!(cert.split_index, 0);
        assert!((cert.tau.at(0) - 0.5).abs() < 1e-15);
        // 1/(2·0.25) = 1.5/0.75
        assert!(cert.residuals[0].abs() < 1e-15);
        assert!((cert.alpha[0] - 0.25 * 1.5 / 0.6).abs() < 1e-15);
        assert!(cert.holds(&d, 1e-9, 1e-12));
    }

    #[test]
    fn kfactor_split_case() {
        let d = dv(&[0.6, 0.1]);
        let cert = tau_for_kfactor(&d, SplitFactor::Full).unwrap();
        assert_eq!(cert.split_index, 1);
        assert!(cert.tau.at(0).is_infinite());
        // bracket_1 -> 1/d_2 in the limit
        assert!((cert.residuals[1] - (1.0 / 0.1 - 1.0 / 0.2)).abs() < 1e-12);
        assert!(cert.residuals[0] >= 0.0);
        assert!(cert.holds(&d, 1e-9, 1e-12));
    }

    #[test]
    fn kfactor_three_users_matches_high_precision_recursion() {
        // τ1 = 6, α1 = 21/62, τ2 = 41/43 from a 40-digit evaluation.
        let d = dv(&[0.3, 0.2, 0.1]);
        let cert = tau_for_kfactor(&d, SplitFactor::Full).unwrap();
        assert_eq!(cert.split_index, 0);
        assert!((cert.tau.at(0) - 6.0).abs() < 1e-13);
        assert!((cert.alpha[0] - 0.338_709_677_419_354_8).abs() < 1e-14);
        assert!((cert.tau.at(1) - 0.953_488_372_093_023_3).abs() < 1e-13);
        assert!((cert.alpha[1] - 0.370_860_927_152_317_9).abs() < 1e-14);
        assert!(cert.residuals[0].abs() < 1e-13);
        assert!(cert.residuals[1].abs() < 1e-13);
        assert!((cert.residuals[2] - 5.654_761_904_761_905).abs() < 1e-12);
        assert!(cert.holds(&d, 1e-9, 1e-12));
    }

    #[test]
    fn kfactor_reduced_split_keeps_inequalities() {
        let d = dv(&[0.9, 0.2, 0.15, 0.05]);
        let cert = tau_for_kfactor(&d, SplitFactor::Reduced).unwrap();
        assert_eq!(cert.split_index, 1);
        // at factor K the post-split inequalities hold with slack 1/((K-r)d) - 1/(Kd)
        for k in 1..3 {
            let expected = 1.0 / (3.0 * d.as_slice()[k]) - 1.0 / (4.0 * d.as_slice()[k]);
            assert!((cert.residuals[k] - expected).abs() < 1e-12 * expected);
        }
        assert!(cert.holds(&d, 1e-9, 1e-12));
        let full = tau_for_kfactor(&d, SplitFactor::Full).unwrap();
        assert!(full.residuals[1].abs() < 1e-12 && full.residuals[2].abs() < 1e-12);
    }

    #[test]
    fn kfactor_near_singular_start_uses_sentinel() {
        let d = dv(&[0.5 * (1.0 - 1e-14), 0.1]);
        let cert = tau_for_kfactor(&d, SplitFactor::Full).unwrap();
        assert_eq!(cert.split_index, 0);
        assert!(cert.tau.at(0).is_infinite());
        assert!(cert.holds(&d, 1e-9, 1e-12));
    }

    #[test]
    fn kfactor_single_user() {
        let d = dv(&[0.5]);
        let cert = tau_for_kfactor(&d, SplitFactor::Full).unwrap();
        assert!(cert.tau.is_empty());
        assert_eq!(cert.residuals, vec![0.0]);
    }

    #[test]
    fn verify_kfactor_examples() {
        let r = verify_kfactor(2, &dv(&[0.4, 0.4]), &TauVector::zeros(2)).unwrap();
        assert!((r[0] - 1.25).abs() < 1e-15);
        assert_eq!(
            verify_kfactor(1, &dv(&[0.5]), &TauVector::zeros(1)).unwrap(),
            vec![0.0]
        );
        assert!(verify_kfactor(3, &dv(&[0.5]), &TauVector::zeros(1)).is_err());
    }

    #[test]
    fn relaxed_examples() {
        let r = relaxed_vector(&dv(&[0.5, 0.3]));
        assert_eq!(r.labels, vec![false, true]);
        assert_eq!(r.d_star, vec![1.0, 0.6]);
        let r = relaxed_vector(&dv(&[0.1, 0.04]));
        assert_eq!(r.labels, vec![true, true]);
        assert_eq!(r.d_star, vec![0.2, 0.16]);
        let r = relaxed_vector(&dv(&[1.0; 5]));
        assert!(r.labels.iter().all(|&b| !b));
        assert!(r.d_star.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn label_budget_examples() {
        let d = dv(&[0.5, 0.3]);
        let b = label_budget(&relaxed_vector(&d).labels, &d).unwrap();
        assert_eq!(b.labels, 1);
        assert!((b.bound - 1.736_965_594_166_206).abs() < 1e-12);
        assert!(b.holds);
        let d = dv(&[0.1, 0.04]);
        let b = label_budget(&relaxed_vector(&d).labels, &d).unwrap();
        assert_eq!(b.labels, 2);
        assert!((b.bound - 2.321_928_094_887_362).abs() < 1e-12);
        let d = dv(&[0.3; 4]);
        let b = label_budget(&relaxed_vector(&d).labels, &d).unwrap();
        assert_eq!((b.labels, b.bound), (1, 1.0));
    }

    #[test]
    fn relaxed_tau_examples() {
        let d = dv(&[0.5, 0.3]);
        let tau = tau_for_relaxed(&d, &[false, true]).unwrap();
        assert!(tau.at(0).is_infinite());
        let literal = tau_for_relaxed_with_start(&d, &[false, true], 1.0).unwrap();
        assert_eq!(literal.as_slice(), &[1.0]);

        let d = dv(&[0.1, 0.04]);
        assert_eq!(
            tau_for_relaxed(&d, &[true, true]).unwrap().as_slice(),
            &[0.1]
        );

        let d = dv(&[0.9, 0.8, 0.7]);
        let literal = tau_for_relaxed_with_start(&d, &[false; 3], 1.0).unwrap();
        assert_eq!(literal.as_slice(), &[1.0, 1.0]);

        assert!(matches!(
            tau_for_relaxed(&dv(&[0.1, 0.04]), &[false, true]),
            Err(Error::InconsistentLabels)
        ));
    }

    #[test]
    fn unit_start_breaks_the_per_term_bound() {
        // d = [1, 0.01, 0.01]: B = [0, 1, 0], D* = [1, 0.02, 0.02]
        // bracket for user 1 is (1.01 / 0.02)(1.01 / 2) = 25.5025 < 50
        let d = dv(&[1.0, 0.01, 0.01]);
        let relaxed = relaxed_vector(&d);
        assert_eq!(relaxed.labels, vec![false, true, false]);
        let unit = tau_for_relaxed_with_start(&d, &relaxed.labels, 1.0).unwrap();
        let b = parametric_brackets(d.as_slice(), &unit);
        assert!((b[1] - 25.5025).abs() < 1e-12);
        assert!(b[1] < 1.0 / relaxed.d_star[1]);
        let inf = tau_for_relaxed(&d, &relaxed.labels).unwrap();
        let b = parametric_brackets(d.as_slice(), &inf);
        for (bk, ds) in b.iter().zip(&relaxed.d_star) {
            assert!(*bk >= 1.0 / ds);
        }
    }
}
