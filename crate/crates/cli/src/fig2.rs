//! Boundary curves of the two-user example channel: one outer curve per
//! auxiliary variance, the separation inner curve, and the corner where both
//! users reach their single-user optimum.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use anyhow::{Context, Result};
use distortion_bounds::regions::{
    log_grid, point_to_point_distortion, trace_boundary, BoundaryCurve,
};
use distortion_bounds::{BroadcastChannel, RegionKind, TauVector};
use serde_json::json;

use crate::output::{json_f64, write_curve_csv};

pub const DEFAULT_TAUS: [f64; 6] = [0.0, 0.05, 0.2, 1.0, 5.0, f64::INFINITY];
pub const DEFAULT_POINTS: usize = 200;

#[derive(Debug, Clone)]
pub struct Fig2 {
    pub grid: Vec<f64>,
    pub outer: Vec<(f64, BoundaryCurve)>,
    pub inner: BoundaryCurve,
    /// Single-user optima `(d_1, d_2)`.
    pub corner: (f64, f64),
}

/// Traces every curve over a log grid on `[d_2 corner, 1]`.
pub fn compute(channel: &BroadcastChannel, taus: &[f64], points: usize, tol: f64) -> Result<Fig2> {
    anyhow::ensure!(channel.users() == 2, "fig2 needs a two-user channel");
    let corner = (
        point_to_point_distortion(channel, 0)?,
        point_to_point_distortion(channel, 1)?,
    );
    let grid = log_grid(corner.1, 1.0, points);
    let outer = taus
        .iter()
        .map(|&t| {
            let region = RegionKind::Parametric(TauVector::new(vec![t])?);
            Ok((t, trace_boundary(&region, channel, &grid, tol)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let inner = trace_boundary(&RegionKind::Inner, channel, &grid, tol)?;
    Ok(Fig2 {
        grid,
        outer,
        inner,
        corner,
    })
}

/// `outer_tau_<v>.csv` with `v` printed the way Rust prints the float.
pub fn outer_file_name(tau: f64) -> String {
    format!("outer_tau_{tau}.csv")
}

pub fn write(fig: &Fig2, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let csv = |name: &str, curve: &BoundaryCurve| -> Result<()> {
        let path = dir.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        write_curve_csv(curve, BufWriter::new(file))
    };
    for (tau, curve) in &fig.outer {
        csv(&outer_file_name(*tau), curve)?;
    }
    csv("inner.csv", &fig.inner)?;
    let p2p = json!({ "d1": json_f64(fig.corner.0), "d2": json_f64(fig.corner.1) });
    let path = dir.join("p2p.json");
    fs::write(&path, serde_json::to_string_pretty(&p2p)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_names() {
        let names: Vec<String> = DEFAULT_TAUS.iter().map(|&t| outer_file_name(t)).collect();
        assert_eq!(
            names,
            [
                "outer_tau_0.csv",
                "outer_tau_0.05.csv",
                "outer_tau_0.2.csv",
                "outer_tau_1.csv",
                "outer_tau_5.csv",
                "outer_tau_inf.csv"
            ]
        );
    }
}
