use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use distortion_bounds::BroadcastChannel;
use serde::{Deserialize, Serialize};

/// On-disk channel description: `{"noise": [...], "power": P, "bandwidth": b}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub noise: Vec<f64>,
    pub power: f64,
    pub bandwidth: f64,
}

impl ChannelSpec {
    /// Two users with noise 10 and 1, power 50, two channel uses per sample.
    pub fn two_user_default() -> Self {
        Self {
            noise: vec![10.0, 1.0],
            power: 50.0,
            bandwidth: 2.0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("malformed channel JSON")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading channel file {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn build(&self) -> Result<BroadcastChannel> {
        BroadcastChannel::new(self.noise.clone(), self.power, self.bandwidth)
            .context("invalid channel")
    }
}
