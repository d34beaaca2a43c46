//! File formats and batch jobs behind the `distortion-bounds` binary.

pub mod channel;
pub mod fig2;
pub mod output;
