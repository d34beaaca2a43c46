//! Achievability side: broadcast capacity arithmetic, the successive
//! refinement rate maps, the half-bit genie allocation, and the constant
//! factor gap certificates.
//!
//! Rates are in nats per channel use unless a name says otherwise.

use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::model::{BroadcastChannel, DistortionVector};
use crate::regions::{membership, MembershipResult, RegionKind};
use crate::tau::{relaxed_vector, tau_for_kfactor, tau_for_relaxed, SplitFactor};

/// Per-user incremental message rates, in nats per channel use.
#[derive(Debug, Clone, PartialEq)]
pub struct RateVector(Vec<f64>);

impl RateVector {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        for (index, &value) in rates.iter().enumerate() {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::NegativeRate { index, value });
            }
        }
        Ok(Self(rates))
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

    pub fn to_bits(&self) -> Vec<f64> {
        self.0.iter().map(|r| r / LN_2).collect()
    }
}

/// `Σ ΔN_k exp(2 Σ_{j<=k} R_j)`; the rates are achievable iff this is at
/// most `P + N[0]`.
pub fn capacity_lhs(channel: &BroadcastChannel, rates: &RateVector) -> Result<f64> {
    channel.check_dim(rates.len())?;
    let mut cumulative = 0.0;
    Ok(channel
        .delta_noises()
        .iter()
        .zip(rates.as_slice())
        .map(|(&dn, &r)| {
            cumulative += r;
            if dn == 0.0 {
                0.0
            } else {
                dn * libm::exp(2.0 * cumulative)
            }
        })
        .sum())
}

/// Layer rates that make the successive refinement code hit `d` exactly:
/// `R_k = (ln d_{k-1} - ln d_k) / (2b)` with `d_{-1} = 1`.
pub fn rates_from_distortions(bandwidth: f64, d: &DistortionVector) -> RateVector {
    let mut prev = 0.0;
    let rates = d
        .as_slice()
        .iter()
        .map(|&dk| {
            let ln = libm::log(dk);
            let r = ((prev - ln) / (2.0 * bandwidth)).max(0.0);
            prev = ln;
            r
        })
        .collect();
    RateVector(rates)
}

/// Inverse of [`rates_from_distortions`]: `d_k = exp(-2b Σ_{j<=k} R_j)`.
///
/// Fails when the cumulative rate is so large that a distortion underflows
/// to zero.
pub fn distortions_from_rates(bandwidth: f64, rates: &RateVector) -> Result<DistortionVector> {
    let mut cumulative = 0.0;
    let d = rates
        .as_slice()
        .iter()
        .map(|&r| {
            cumulative += r;
            libm::exp(-2.0 * bandwidth * cumulative)
        })
        .collect();
    DistortionVector::new(d)
}

/// Inner-bound membership computed on the channel side: map `d` to rates and
/// test them against the capacity region.
pub fn inner_membership_via_rates(
    channel: &BroadcastChannel,
    d: &DistortionVector,
    tol: f64,
) -> Result<MembershipResult> {
    let rates = rates_from_distortions(channel.bandwidth(), d);
    let lhs = capacity_lhs(channel, &rates)?;
    let budget = channel.budget();
    Ok(MembershipResult {
        lhs,
        budget,
        slack: budget - lhs,
        member: lhs <= budget + tol,
    })
}

fn half_log2_snr(channel: &BroadcastChannel, k: usize) -> f64 {
    0.5 * libm::log2(1.0 + channel.power() / channel.noise()[k])
}

/// Broadcast rates that leave each user half a bit per channel use short of
/// its single-user capacity:
/// `R_k = max(½log2(1+P/N_k) - ½log2(1+P/N_{k-1}) - ½, 0)` bits, with the
/// term for the (nonexistent) user before the first taken as zero.
pub fn genie_rates(channel: &BroadcastChannel) -> RateVector {
    let rates = (0..channel.users())
        .map(|k| {
            let prev = if k == 0 {
                0.0
            } else {
                half_log2_snr(channel, k - 1)
            };
            let bits = (half_log2_snr(channel, k) - prev - 0.5).max(0.0);
            bits * LN_2
        })
        .collect();
    RateVector(rates)
}

/// Per-user residuals, in bits per channel use, of
/// `Σ_{i<=k} R_i + k/2 >= ½log2(1+P/N_k)` for the genie allocation
/// (1-based `k`). Every residual is non-negative; it is zero for users
/// below which no clamping happened.
pub fn genie_p2p_check(channel: &BroadcastChannel) -> Vec<f64> {
    let bits = genie_rates(channel).to_bits();
    let mut total = 0.0;
    bits.iter()
        .enumerate()
        .map(|(k, &r)| {
            total += r;
            total + 0.5 * (k + 1) as f64 - half_log2_snr(channel, k)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapMode {
    /// Scale user `k` (0-based) by `2^(k+1)`; needs `d_k >= 2 d_{k+1}`.
    Pow2,
    /// Scale every user by `K`, clamped at 1.
    Kfactor,
    /// Replace `d` by its relaxed vector.
    Relaxed,
}

impl GapMode {
    pub fn as_str(self) -> &'static str {
        match self {
            GapMode::Pow2 => "pow2",
            GapMode::Kfactor => "kfactor",
            GapMode::Relaxed => "relaxed",
        }
    }
}

/// Constant-factor certificate: an outer-bound point, its scaled image, and
/// the proof that the image is achievable by separation.
#[derive(Debug, Clone, PartialEq)]
pub struct GapCertificate {
    pub mode: GapMode,
    pub input: Vec<f64>,
    pub scaled: Vec<f64>,
    /// `scaled[k] / input[k]`.
    pub factors: Vec<f64>,
    /// The outer region the input was checked against.
    pub outer_region: RegionKind,
    pub outer: MembershipResult,
    /// `None` when the scaled vector is not a valid distortion vector.
    pub inner: Option<MembershipResult>,
    /// Set in `Pow2` mode when the `2^k` image loses ordering or leaves
    /// `(0, 1]`; the relaxed mode covers those inputs.
    pub requires_relaxed: bool,
}

/// Builds the certificate for `d` under `mode`.
///
/// The input must lie in the outer region matching the mode: the `2^k`
/// bound for `Pow2`; the `K` bound for `Kfactor` when no coordinate exceeds
/// `1/K`, and otherwise the parametric bound at the constructed K-factor
/// variances; the parametric bound at the relaxed variances for `Relaxed`.
pub fn gap_certificate(
    channel: &BroadcastChannel,
    d: &DistortionVector,
    mode: GapMode,
    tol: f64,
) -> Result<GapCertificate> {
    channel.check_dim(d.len())?;
    let v = d.as_slice();
    let users = v.len();
    let (outer_region, scaled) = match mode {
        GapMode::Pow2 => {
            let scaled = v
                .iter()
                .enumerate()
                .map(|(k, &x)| libm::ldexp(x, k as i32 + 1))
                .collect();
            (RegionKind::OuterPow2, scaled)
        }
        GapMode::Kfactor => {
            let k_f = users as f64;
            let scaled: Vec<f64> = v.iter().map(|&x| (k_f * x).min(1.0)).collect();
            let cert = tau_for_kfactor(d, SplitFactor::Full)?;
            let region = if cert.split_index == 0 {
                RegionKind::OuterK
            } else {
                RegionKind::Parametric(cert.tau)
            };
            (region, scaled)
        }
        GapMode::Relaxed => {
            let relaxed = relaxed_vector(d);
            let tau = tau_for_relaxed(d, &relaxed.labels)?;
            (RegionKind::Parametric(tau), relaxed.d_star)
        }
    };

    let outer = membership(&outer_region, channel, d, tol)?;
    if !outer.member {
        return Err(Error::ModePreconditionFailed(match mode {
            GapMode::Pow2 => "input lies outside the 2^k outer bound",
            GapMode::Kfactor => "input lies outside the K-factor outer bound",
            GapMode::Relaxed => "input lies outside the relaxed-tau outer bound",
        }));
    }

    let factors = scaled.iter().zip(v).map(|(s, x)| s / x).collect();
    let (inner, requires_relaxed) = match DistortionVector::new(scaled.clone()) {
        Ok(image) => (
            Some(membership(&RegionKind::Inner, channel, &image, tol)?),
            false,
        ),
        Err(_) if mode == GapMode::Pow2 => (None, true),
        Err(e) => return Err(e),
    };

    Ok(GapCertificate {
        mode,
        input: v.to_vec(),
        scaled,
        factors,
        outer_region,
        outer,
        inner,
        requires_relaxed,
    })
}
