//! Region inequalities, membership tests, and boundary tracing.
//!
//! Every region in this module has the form `lhs(d) <= P + N[0]` over ordered
//! distortion vectors, with `lhs` strictly decreasing in each coordinate whose
//! coefficient is nonzero. That monotonicity is what makes the bisection in
//! [`boundary_solve`] valid.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{check_distortions, BroadcastChannel, DistortionVector, TauVector};

/// Additive slack tolerance used when none is given.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Lower end of the bisection bracket for the strongest user.
pub const DISTORTION_FLOOR: f64 = 1e-300;

/// Which inequality to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum RegionKind {
    /// Separation inner bound: terms `ΔN_k d_k^(-1/b)`.
    Inner,
    /// Outer bound with per-user scaling `2^(k+1)` (0-based `k`).
    OuterPow2,
    /// Outer bound with uniform scaling `K`.
    OuterK,
    /// Outer bound for one choice of auxiliary noise variances.
    Parametric(TauVector),
    /// Every user at its single-user optimum.
    PointToPoint,
}

impl RegionKind {
    /// Evaluates the left-hand side on a raw vector.
    ///
    /// `d` must have one strictly positive entry per user; ordering and the
    /// upper limit of 1 are not checked, so scaled vectors such as `2^k d_k`
    /// can be fed in directly.
    pub fn lhs(&self, channel: &BroadcastChannel, d: &[f64]) -> Result<f64> {
        channel.check_dim(d.len())?;
        check_positive(d)?;
        Ok(match self {
            RegionKind::Inner => separation_sum(channel, d, |_| 1.0),
            RegionKind::OuterPow2 => separation_sum(channel, d, |k| libm::ldexp(1.0, k as i32 + 1)),
            RegionKind::OuterK => {
                let users = channel.users() as f64;
                separation_sum(channel, d, |_| users)
            }
            RegionKind::Parametric(tau) => {
                tau.check_users(channel.users())?;
                parametric_sum(channel, d, tau)
            }
            RegionKind::PointToPoint => point_to_point_lhs(channel, d),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            RegionKind::Inner => "inner",
            RegionKind::OuterPow2 => "outer-pow2",
            RegionKind::OuterK => "outer-k",
            RegionKind::Parametric(_) => "parametric",
            RegionKind::PointToPoint => "p2p",
        }
    }
}

fn check_positive(d: &[f64]) -> Result<()> {
    for (index, &value) in d.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::OutOfRange { index, value });
        }
    }
    Ok(())
}

/// `Σ ΔN_k (scale(k) d_k)^(-1/b)`. Zero increments contribute nothing even
/// when the power term overflows.
fn separation_sum(channel: &BroadcastChannel, d: &[f64], scale: impl Fn(usize) -> f64) -> f64 {
    let exponent = -1.0 / channel.bandwidth();
    channel
        .delta_noises()
        .iter()
        .zip(d)
        .enumerate()
        .filter(|(_, (&dn, _))| dn != 0.0)
        .map(|(k, (&dn, &dk))| dn * libm::pow(scale(k) * dk, exponent))
        .sum()
}

/// `(x + t) / (y + t)`, or its limit 1 when `t` is infinite.
#[inline]
pub(crate) fn noise_ratio(x: f64, y: f64, t: f64) -> f64 {
    if t.is_infinite() {
        1.0
    } else {
        (x + t) / (y + t)
    }
}

/// The bracket of user `k` in the parametric bound, regrouped as
///
/// `(1 + τ_k)/(d_k + τ_k) · Π_{j<k} (d_{j+1} + τ_j)/(d_j + τ_j)`
///
/// so that each factor has a finite limit when its `τ` is infinite.
pub fn parametric_brackets(d: &[f64], tau: &TauVector) -> Vec<f64> {
    let mut prefix = 1.0;
    let mut out = Vec::with_capacity(d.len());
    for k in 0..d.len() {
        if k > 0 {
            prefix *= noise_ratio(d[k], d[k - 1], tau.at(k - 1));
        }
        out.push(noise_ratio(1.0, d[k], tau.at(k)) * prefix);
    }
    out
}

fn parametric_sum(channel: &BroadcastChannel, d: &[f64], tau: &TauVector) -> f64 {
    let exponent = 1.0 / channel.bandwidth();
    channel
        .delta_noises()
        .iter()
        .zip(parametric_brackets(d, tau))
        .filter(|(&dn, _)| dn != 0.0)
        .map(|(&dn, bracket)| dn * libm::pow(bracket, exponent))
        .sum()
}

/// User `k` alone meets its single-user optimum iff
/// `(N[0] - N[k]) + N[k] d_k^(-1/b) <= P + N[0]`; the worst user decides.
fn point_to_point_lhs(channel: &BroadcastChannel, d: &[f64]) -> f64 {
    let n = channel.noise();
    let exponent = -1.0 / channel.bandwidth();
    n.iter()
        .zip(d)
        .map(|(&nk, &dk)| (n[0] - nk) + nk * libm::pow(dk, exponent))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Separation inner bound LHS.
pub fn inner_lhs(channel: &BroadcastChannel, d: &DistortionVector) -> Result<f64> {
    RegionKind::Inner.lhs(channel, d.as_slice())
}

pub fn outer_pow2_lhs(channel: &BroadcastChannel, d: &DistortionVector) -> Result<f64> {
    RegionKind::OuterPow2.lhs(channel, d.as_slice())
}

pub fn outer_k_lhs(channel: &BroadcastChannel, d: &DistortionVector) -> Result<f64> {
    RegionKind::OuterK.lhs(channel, d.as_slice())
}

pub fn parametric_outer_lhs(
    channel: &BroadcastChannel,
    d: &DistortionVector,
    tau: &TauVector,
) -> Result<f64> {
    tau.check_users(channel.users())?;
    Ok(parametric_sum(channel, d.as_slice(), tau))
}

/// Best distortion user `k` could reach with the channel to itself,
/// `(1 + P/N[k])^(-b)`.
pub fn point_to_point_distortion(channel: &BroadcastChannel, k: usize) -> Result<f64> {
    let len = channel.users();
    if k >= len {
        return Err(Error::IndexOutOfRange { index: k, len });
    }
    Ok(libm::pow(
        1.0 + channel.power() / channel.noise()[k],
        -channel.bandwidth(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembershipResult {
    pub lhs: f64,
    pub budget: f64,
    pub slack: f64,
    pub member: bool,
}

impl MembershipResult {
    fn new(lhs: f64, budget: f64, tol: f64) -> Self {
        Self {
            lhs,
            budget,
            slack: budget - lhs,
            member: lhs <= budget + tol,
        }
    }
}

/// Membership with an additive slack tolerance `tol`.
pub fn membership(
    region: &RegionKind,
    channel: &BroadcastChannel,
    d: &DistortionVector,
    tol: f64,
) -> Result<MembershipResult> {
    let lhs = region.lhs(channel, d.as_slice())?;
    Ok(MembershipResult::new(lhs, channel.budget(), tol))
}

/// Membership for vectors that may contain zero distortions.
///
/// The strongest user always carries the positive coefficient `N[K-1]`, and
/// ordering forces it to zero whenever any coordinate is zero, so such a
/// vector lies outside every region: the result reports an infinite `lhs`.
pub fn membership_with_limits(
    region: &RegionKind,
    channel: &BroadcastChannel,
    d: &[f64],
    tol: f64,
) -> Result<MembershipResult> {
    channel.check_dim(d.len())?;
    if d.contains(&0.0) {
        let mut ordered = d.to_vec();
        for x in &mut ordered {
            if *x == 0.0 {
                *x = f64::MIN_POSITIVE;
            }
        }
        check_distortions(&ordered)?;
        return Ok(MembershipResult::new(f64::INFINITY, channel.budget(), tol));
    }
    let d = DistortionVector::new(d.to_vec())?;
    membership(region, channel, &d, tol)
}

/// Which constraint fixed a boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binding {
    Budget,
    Ordering,
    Infeasible,
}

impl Binding {
    pub fn as_str(self) -> &'static str {
        match self {
            Binding::Budget => "budget",
            Binding::Ordering => "ordering",
            Binding::Infeasible => "infeasible",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub value: f64,
    pub binding: Binding,
}

/// Smallest `d_k` that keeps the vector inside `region` and ordered.
///
/// `fixed` holds the other `K - 1` coordinates in user order. The search
/// bracket is `[d_{k+1}, d_{k-1}]` (with `DISTORTION_FLOOR` and 1 at the
/// ends), bisected geometrically until the endpoints are adjacent to within
/// a few ulps. When the lower end of the bracket already satisfies the budget
/// the ordering constraint is reported as binding. `tol` only widens the
/// feasibility test at the upper end; the returned budget-bound point
/// satisfies `lhs <= P + N[0]` exactly.
pub fn boundary_solve(
    region: &RegionKind,
    channel: &BroadcastChannel,
    fixed: &[f64],
    k: usize,
    tol: f64,
) -> Result<BoundaryPoint> {
    let users = channel.users();
    if k >= users {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: users,
        });
    }
    if fixed.len() + 1 != users {
        return Err(Error::DimensionMismatch {
            expected: users - 1,
            actual: fixed.len(),
        });
    }
    let mut v = Vec::with_capacity(users);
    v.extend_from_slice(&fixed[..k]);
    v.push(f64::NAN);
    v.extend_from_slice(&fixed[k..]);

    let lo = if k + 1 < users {
        v[k + 1]
    } else {
        DISTORTION_FLOOR
    };
    let hi = if k > 0 { v[k - 1] } else { 1.0 };
    v[k] = hi;
    check_distortions(&v)?;
    if lo > hi {
        return Err(Error::NotMonotone {
            index: k,
            prev: hi,
            next: lo,
        });
    }

    let budget = channel.budget();
    let mut excess = |x: f64| -> Result<f64> {
        v[k] = x;
        Ok(region.lhs(channel, &v)? - budget)
    };

    let f_hi = excess(hi)?;
    if f_hi > tol {
        return Err(Error::NoSolution("budget exceeded at the ordering limit"));
    }
    let f_lo = excess(lo)?;
    if f_lo <= 0.0 {
        return Ok(BoundaryPoint {
            value: lo,
            binding: Binding::Ordering,
        });
    }
    if f_hi > 0.0 {
        return Ok(BoundaryPoint {
            value: hi,
            binding: Binding::Budget,
        });
    }
    if f_hi > f_lo {
        return Err(Error::NotMonotoneRegion);
    }

    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..4096 {
        let mid = libm::sqrt(lo) * libm::sqrt(hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if excess(mid)? <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(BoundaryPoint {
        value: hi,
        binding: Binding::Budget,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub free: f64,
    /// `None` at grid points where no ordered vector meets the budget.
    pub solved: Option<f64>,
    pub binding: Binding,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    pub samples: Vec<BoundarySample>,
    pub region: RegionKind,
    pub channel: BroadcastChannel,
}

/// Two-user trace: user 1's distortion runs over `grid`, user 0's is solved.
pub fn trace_boundary(
    region: &RegionKind,
    channel: &BroadcastChannel,
    grid: &[f64],
    tol: f64,
) -> Result<BoundaryCurve> {
    channel.check_dim(2)?;
    trace_boundary_with(region, channel, &[1.0, 1.0], 1, 0, grid, tol)
}

/// General trace: coordinate `free` runs over `grid`, `solve` is solved, and
/// the remaining coordinates come from `base`.
pub fn trace_boundary_with(
    region: &RegionKind,
    channel: &BroadcastChannel,
    base: &[f64],
    free: usize,
    solve: usize,
    grid: &[f64],
    tol: f64,
) -> Result<BoundaryCurve> {
    let users = channel.users();
    channel.check_dim(base.len())?;
    for index in [free, solve] {
        if index >= users {
            return Err(Error::IndexOutOfRange { index, len: users });
        }
    }
    if free == solve {
        return Err(Error::IndexOutOfRange {
            index: free,
            len: users,
        });
    }
    let mut samples = Vec::with_capacity(grid.len());
    let mut point = base.to_vec();
    for (index, &x) in grid.iter().enumerate() {
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::OutOfRange { index, value: x });
        }
        point[free] = x;
        let fixed: Vec<f64> = point
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != solve)
            .map(|(_, &v)| v)
            .collect();
        let sample = match boundary_solve(region, channel, &fixed, solve, tol) {
            Ok(p) => BoundarySample {
                free: x,
                solved: Some(p.value),
                binding: p.binding,
            },
            Err(Error::NoSolution(_) | Error::NotMonotone { .. }) => BoundarySample {
                free: x,
                solved: None,
                binding: Binding::Infeasible,
            },
            Err(e) => return Err(e),
        };
        samples.push(sample);
    }
    Ok(BoundaryCurve {
        samples,
        region: region.clone(),
        channel: channel.clone(),
    })
}

/// `points` values spaced evenly in `ln` between `lo` and `hi`, endpoints
/// included exactly.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let (a, b) = (libm::log(lo), libm::log(hi));
            let step = (b - a) / (points - 1) as f64;
            (0..points)
                .map(|i| match i {
                    0 => lo,
                    i if i == points - 1 => hi,
                    i => libm::exp(a + step * i as f64),
                })
                .collect()
        }
    }
}
