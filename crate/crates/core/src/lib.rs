//! Inner and outer bounds on the distortion region of a Gaussian source sent
//! to several receivers over a degraded Gaussian broadcast channel.
//!
//! Users are indexed from 0 in order of decreasing noise variance. The crate
//! is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod lemma;
pub mod model;
pub mod regions;
pub mod separation;
pub mod tau;

pub use error::{Error, Result};
pub use model::{BroadcastChannel, DistortionVector, RawChannel, TauVector};
pub use regions::{Binding, BoundaryPoint, MembershipResult, RegionKind};
pub use separation::{GapCertificate, GapMode, RateVector};
pub use tau::{KfactorCertificate, SplitFactor};
