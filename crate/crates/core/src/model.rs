//! Domain types shared by every evaluator.
//!
//! Users are indexed from 0 in this crate: user `0` is the weakest receiver
//! (largest noise variance) and user `K - 1` the strongest. All quantities
//! are at the variance level; the source has unit variance.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Channel parameters as they arrive from a configuration file, before any
/// validation.
#[derive(Debug, Clone, PartialEq)]
pub struct RawChannel {
    pub noise: Vec<f64>,
    pub power: f64,
    pub bandwidth: f64,
}

impl RawChannel {
    pub fn new(noise: Vec<f64>, power: f64, bandwidth: f64) -> Self {
        Self {
            noise,
            power,
            bandwidth,
        }
    }

    /// Strict validation: the noise variances must already be non-increasing.
    pub fn validate(&self) -> Result<BroadcastChannel> {
        self.check_scalars()?;
        for pair in self.noise.windows(2).enumerate() {
            let (index, w) = pair;
            if w[0] < w[1] {
                return Err(Error::UnsortedNoise {
                    index,
                    prev: w[0],
                    next: w[1],
                });
            }
        }
        Ok(BroadcastChannel {
            noise: self.noise.clone(),
            power: self.power,
            bandwidth: self.bandwidth,
        })
    }

    /// Reorders users by non-increasing noise variance.
    ///
    /// Returns the canonical channel together with the permutation:
    /// `perm[i]` is the position in the raw input of canonical user `i`.
    /// The sort is stable, so users with equal variances keep their order.
    pub fn canonicalize(&self) -> Result<(BroadcastChannel, Vec<usize>)> {
        self.check_scalars()?;
        let mut perm: Vec<usize> = (0..self.noise.len()).collect();
        perm.sort_by(|&a, &b| self.noise[b].total_cmp(&self.noise[a]));
        let noise = perm.iter().map(|&i| self.noise[i]).collect();
        Ok((
            BroadcastChannel {
                noise,
                power: self.power,
                bandwidth: self.bandwidth,
            },
            perm,
        ))
    }

    fn check_scalars(&self) -> Result<()> {
        if self.noise.is_empty() {
            return Err(Error::NoUsers);
        }
        for (index, &value) in self.noise.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonPositiveVariance { index, value });
            }
        }
        if !(self.power > 0.0 && self.power.is_finite()) {
            return Err(Error::NonPositivePower(self.power));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(Error::NonPositiveBandwidth(self.bandwidth));
        }
        Ok(())
    }
}

/// A degraded Gaussian broadcast channel with `K` users.
///
/// Noise variances are non-increasing, `N[0] >= N[1] >= ... >= N[K-1] > 0`.
/// `bandwidth` is the number of channel uses per source sample.
#[derive(Debug, Clone, PartialEq)]
pub struct BroadcastChannel {
    noise: Vec<f64>,
    power: f64,
    bandwidth: f64,
}

impl BroadcastChannel {
    /// Validates already-sorted parameters; see [`RawChannel::validate`].
    pub fn new(noise: Vec<f64>, power: f64, bandwidth: f64) -> Result<Self> {
        RawChannel::new(noise, power, bandwidth).validate()
    }

    pub fn users(&self) -> usize {
        self.noise.len()
    }

    pub fn noise(&self) -> &[f64] {
        &self.noise
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Right-hand side shared by every region inequality, `P + N[0]`.
    pub fn budget(&self) -> f64 {
        self.power + self.noise[0]
    }

    /// Noise increment `N[k] - N[k+1]`, with the variance past the strongest
    /// user taken as zero.
    pub fn delta_noise(&self, k: usize) -> Result<f64> {
        let len = self.users();
        if k >= len {
            return Err(Error::IndexOutOfRange { index: k, len });
        }
        let next = self.noise.get(k + 1).copied().unwrap_or(0.0);
        Ok(self.noise[k] - next)
    }

    /// All `K` noise increments.
    pub fn delta_noises(&self) -> Vec<f64> {
        let n = &self.noise;
        (0..n.len())
            .map(|k| n[k] - n.get(k + 1).copied().unwrap_or(0.0))
            .collect()
    }

    pub(crate) fn check_dim(&self, actual: usize) -> Result<()> {
        if actual != self.users() {
            return Err(Error::DimensionMismatch {
                expected: self.users(),
                actual,
            });
        }
        Ok(())
    }
}

/// Free-function form of [`BroadcastChannel::delta_noise`].
pub fn delta_noise(channel: &BroadcastChannel, k: usize) -> Result<f64> {
    channel.delta_noise(k)
}

/// Per-user mean-squared errors, `1 >= d[0] >= ... >= d[K-1] > 0`.
///
/// Zero distortion is rejected here; see
/// [`regions::membership_with_limits`](crate::regions::membership_with_limits)
/// for queries that need the `d -> 0` limit.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionVector(Vec<f64>);

impl DistortionVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_distortions(&values)?;
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for DistortionVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Validates `values` as a distortion vector for a `users`-user system.
pub fn validate_distortions(values: &[f64], users: usize) -> Result<DistortionVector> {
    if values.len() != users {
        return Err(Error::LengthMismatch {
            expected: users,
            actual: values.len(),
        });
    }
    DistortionVector::new(values.to_vec())
}

pub(crate) fn check_distortions(values: &[f64]) -> Result<()> {
    for (index, &value) in values.iter().enumerate() {
        if !(value > 0.0 && value <= 1.0) {
            return Err(Error::OutOfRange { index, value });
        }
    }
    for (index, w) in values.windows(2).enumerate() {
        if w[0] < w[1] {
            return Err(Error::NotMonotone {
                index,
                prev: w[0],
                next: w[1],
            });
        }
    }
    Ok(())
}

/// Auxiliary noise parameters `tau[0] >= ... >= tau[K-2] >= 0` indexing the
/// parametric outer bound. The last user's parameter is always zero and is
/// not stored.
///
/// `f64::INFINITY` is accepted as an explicit "effectively infinite" value;
/// evaluators substitute the analytic limit for every factor that contains it.
#[derive(Debug, Clone, PartialEq)]
pub struct TauVector(Vec<f64>);

impl TauVector {
    pub const INFINITE: f64 = f64::INFINITY;

    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, &t) in values.iter().enumerate() {
            if t.is_nan() {
                return Err(Error::InvalidTau {
                    index,
                    reason: "not a number",
                });
            }
            if t < 0.0 {
                return Err(Error::InvalidTau {
                    index,
                    reason: "negative",
                });
            }
        }
        for (index, w) in values.windows(2).enumerate() {
            if w[0] < w[1] {
                return Err(Error::InvalidTau {
                    index: index + 1,
                    reason: "not non-increasing",
                });
            }
        }
        Ok(Self(values))
    }

    /// The all-zero vector for a `users`-user channel.
    pub fn zeros(users: usize) -> Self {
        Self(alloc::vec![0.0; users.saturating_sub(1)])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `tau[k]` for `k < len`, zero for the implicit last entry.
    pub fn at(&self, k: usize) -> f64 {
        self.0.get(k).copied().unwrap_or(0.0)
    }

    pub(crate) fn check_users(&self, users: usize) -> Result<()> {
        if self.0.len() + 1 != users {
            return Err(Error::DimensionMismatch {
                expected: users.saturating_sub(1),
                actual: self.0.len(),
            });
        }
        Ok(())
    }
}
