use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use distortion_bounds::lemma::{
    gaussian_oracle_mi, mi_difference_lower_bound, mi_lower_bound, monte_carlo_mi_estimate,
    AuxNoiseParams,
};
use distortion_bounds::regions::{
    log_grid, membership, trace_boundary_with, BoundaryCurve, DEFAULT_TOLERANCE,
};
use distortion_bounds::separation::{
    capacity_lhs, distortions_from_rates, gap_certificate, genie_p2p_check, genie_rates,
    rates_from_distortions,
};
use distortion_bounds::tau::{
    label_budget, relaxed_vector, tau_for_kfactor, tau_for_pow2, tau_for_relaxed,
};
use distortion_bounds::{
    BroadcastChannel, DistortionVector, GapMode, RateVector, RegionKind, SplitFactor, TauVector,
};
use distortion_bounds_cli::channel::ChannelSpec;
use distortion_bounds_cli::fig2;
use distortion_bounds_cli::output::{json_f64, json_labels, json_vec, write_curve_csv};
use serde_json::{json, Value};

/// Inner and outer bounds on the distortion region of a Gaussian source
/// broadcast over a degraded Gaussian channel.
///
/// Users are numbered from 1 (noisiest) to K (least noisy). Without
/// `--channel` the two-user channel N = [10, 1], P = 50, b = 2 is used.
#[derive(Debug, Parser)]
#[command(name = "distortion-bounds", version)]
struct Cli {
    /// Channel JSON: {"noise":[...],"power":P,"bandwidth":b}
    #[arg(long, global = true)]
    channel: Option<PathBuf>,
    /// Output directory; files are written there instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Additive slack tolerance for membership tests
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
    /// Seed for Monte Carlo estimates
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Region {
    Inner,
    OuterPow2,
    OuterK,
    Parametric,
    P2p,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Pow2,
    Kfactor,
    Relaxed,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Split {
    Full,
    Reduced,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test a distortion vector against one region (exit 0 inside, 3 outside)
    Check {
        #[arg(long, value_enum)]
        region: Region,
        /// Distortions, comma separated, noisiest user first
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        d: Vec<f64>,
        /// Auxiliary variances for the parametric region (K-1 values, `inf` allowed)
        #[arg(long, value_delimiter = ',')]
        tau: Vec<f64>,
    },
    /// Trace a boundary curve as CSV
    Boundary {
        #[arg(long, value_enum)]
        region: Region,
        #[arg(long, value_delimiter = ',')]
        tau: Vec<f64>,
        /// User whose distortion runs over the grid
        #[arg(long, default_value_t = 2)]
        free: usize,
        /// User whose distortion is solved for
        #[arg(long, default_value_t = 1)]
        solve: usize,
        /// Values of the other users (all K entries; free and solved ones are ignored)
        #[arg(long, value_delimiter = ',')]
        base: Vec<f64>,
        /// Explicit grid; overrides --points/--lo/--hi
        #[arg(long, value_delimiter = ',')]
        grid: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Lower grid end; defaults to the free user's single-user optimum
        #[arg(long)]
        lo: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        hi: f64,
    },
    /// Write the two-user boundary curves for a set of auxiliary variances
    Fig2 {
        #[arg(long, value_delimiter = ',', default_values_t = fig2::DEFAULT_TAUS)]
        taus: Vec<f64>,
        #[arg(long, default_value_t = fig2::DEFAULT_POINTS)]
        points: usize,
    },
    /// Relaxed distortion vector and its labels
    Relax {
        #[arg(long, value_delimiter = ',')]
        d: Vec<f64>,
    },
    /// Separation rates for a distortion vector, or distortions for rates
    Rates {
        #[arg(
            long,
            value_delimiter = ',',
            conflicts_with = "rates",
            required_unless_present = "rates"
        )]
        d: Vec<f64>,
        /// Rates in nats per source sample
        #[arg(long, value_delimiter = ',')]
        rates: Vec<f64>,
    },
    /// Layered rates of the genie-aided scheme
    Genie,
    /// Constant-factor gap certificate
    Gap {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, value_delimiter = ',')]
        d: Vec<f64>,
    },
    /// Auxiliary variances built from a distortion vector
    Tau {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, value_delimiter = ',')]
        d: Vec<f64>,
        /// Number of users; must match the length of --d
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = Split::Full)]
        split: Split,
    },
    /// Mutual-information bounds for auxiliary Gaussian noise
    Mi {
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        tau_prime: f64,
        /// Distortion D in (0, 1]
        #[arg(long)]
        d: f64,
        /// Monte Carlo sample count (requires --seed)
        #[arg(long)]
        samples: Option<usize>,
    },
}

enum Outcome {
    Done,
    Outside,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Outside) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let spec = match &cli.channel {
        Some(path) => ChannelSpec::load(path)?,
        None => ChannelSpec::two_user_default(),
    };
    match &cli.command {
        Command::Check { region, d, tau } => {
            let channel = spec.build()?;
            let region = region_kind(*region, tau)?;
            let m = membership(&region, &channel, &distortions(d)?, cli.tol)?;
            emit_json(
                cli,
                "check",
                &json!({
                    "region": region.name(),
                    "lhs": json_f64(m.lhs),
                    "budget": json_f64(m.budget),
                    "slack": json_f64(m.slack),
                    "member": m.member,
                }),
            )?;
            Ok(if m.member {
                Outcome::Done
            } else {
                Outcome::Outside
            })
        }
        Command::Boundary {
            region,
            tau,
            free,
            solve,
            base,
            grid,
            points,
            lo,
            hi,
        } => {
            let channel = spec.build()?;
            let region = region_kind(*region, tau)?;
            let curve = boundary(
                &channel, &region, *free, *solve, base, grid, *points, *lo, *hi, cli.tol,
            )?;
            match &cli.out {
                Some(dir) => {
                    let path = prepare(dir, "boundary.csv")?;
                    write_curve_csv(&curve, BufWriter::new(File::create(&path)?))?;
                }
                None => write_curve_csv(&curve, io::stdout().lock())?,
            }
            Ok(Outcome::Done)
        }
        Command::Fig2 { taus, points } => {
            let channel = spec.build()?;
            let fig = fig2::compute(&channel, taus, *points, cli.tol)?;
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("fig2"));
            fig2::write(&fig, &dir)?;
            eprintln!("wrote {} curves to {}", fig.outer.len() + 1, dir.display());
            Ok(Outcome::Done)
        }
        Command::Relax { d } => {
            let d = distortions(d)?;
            let relaxed = relaxed_vector(&d);
            let budget = label_budget(&relaxed.labels, &d)?;
            emit_json(
                cli,
                "relax",
                &json!({
                    "d_star": json_vec(&relaxed.d_star),
                    "labels": json_labels(&relaxed.labels),
                    "label_count": budget.labels,
                    "label_bound": json_f64(budget.bound),
                }),
            )?;
            Ok(Outcome::Done)
        }
        Command::Rates { d, rates } => {
            let channel = spec.build()?;
            let (d, r) = if rates.is_empty() {
                let d = distortions(d)?;
                let r = rates_from_distortions(channel.bandwidth(), &d);
                (d, r)
            } else {
                let r = RateVector::new(rates.clone())?;
                (distortions_from_rates(channel.bandwidth(), &r)?, r)
            };
            let lhs = capacity_lhs(&channel, &r)?;
            emit_json(
                cli,
                "rates",
                &json!({
                    "d": json_vec(d.as_slice()),
                    "rates_nats": json_vec(r.as_slice()),
                    "rates_bits": json_vec(&r.to_bits()),
                    "capacity_lhs": json_f64(lhs),
                    "budget": json_f64(channel.budget()),
                    "achievable": lhs <= channel.budget() + cli.tol,
                }),
            )?;
            Ok(Outcome::Done)
        }
        Command::Genie => {
            let channel = spec.build()?;
            let r = genie_rates(&channel);
            emit_json(
                cli,
                "genie",
                &json!({
                    "rates_bits": json_vec(&r.to_bits()),
                    "rates_nats": json_vec(r.as_slice()),
                    "p2p_residuals_bits": json_vec(&genie_p2p_check(&channel)),
                }),
            )?;
            Ok(Outcome::Done)
        }
        Command::Gap { mode, d } => {
            let channel = spec.build()?;
            let cert = gap_certificate(&channel, &distortions(d)?, gap_mode(*mode), cli.tol)?;
            emit_json(
                cli,
                "gap",
                &json!({
                    "input": json_vec(&cert.input),
                    "scaled": json_vec(&cert.scaled),
                    "factors": json_vec(&cert.factors),
                    "inner_slack": cert.inner.map_or(Value::Null, |m| json_f64(m.slack)),
                    "mode": cert.mode.as_str(),
                    "outer_region": cert.outer_region.name(),
                    "outer_slack": json_f64(cert.outer.slack),
                    "requires_relaxed": cert.requires_relaxed,
                }),
            )?;
            Ok(Outcome::Done)
        }
        Command::Tau { mode, d, k, split } => {
            let d = distortions(d)?;
            if let Some(k) = k {
                if *k != d.len() {
                    bail!("--k {k} does not match {} distortions", d.len());
                }
            }
            let report = match mode {
                Mode::Pow2 => json!({ "tau": json_vec(tau_for_pow2(&d).as_slice()) }),
                Mode::Kfactor => {
                    let factor = match split {
                        Split::Full => SplitFactor::Full,
                        Split::Reduced => SplitFactor::Reduced,
                    };
                    let cert = tau_for_kfactor(&d, factor)?;
                    json!({
                        "tau": json_vec(cert.tau.as_slice()),
                        "alpha": json_vec(&cert.alpha),
                        "residuals": json_vec(&cert.residuals),
                        "split_index": cert.split_index,
                    })
                }
                Mode::Relaxed => {
                    let relaxed = relaxed_vector(&d);
                    let tau = tau_for_relaxed(&d, &relaxed.labels)?;
                    json!({
                        "tau": json_vec(tau.as_slice()),
                        "labels": json_labels(&relaxed.labels),
                        "d_star": json_vec(&relaxed.d_star),
                    })
                }
            };
            emit_json(cli, "tau", &report)?;
            Ok(Outcome::Done)
        }
        Command::Mi {
            tau,
            tau_prime,
            d,
            samples,
        } => {
            let p = AuxNoiseParams::new(*tau, *tau_prime, *d)?;
            let mut report = json!({
                "lower_bound": json_f64(mi_lower_bound(&p)),
                "difference_lower_bound": json_f64(mi_difference_lower_bound(&p)),
            });
            if *d < 1.0 {
                let oracle = gaussian_oracle_mi(&p)?;
                report["oracle"] = json!({
                    "mi": json_f64(oracle.at_tau_prime),
                    "difference": json_f64(oracle.difference),
                });
            }
            if let Some(n) = samples {
                let Some(seed) = cli.seed else {
                    bail!("--samples needs an explicit --seed");
                };
                let est = monte_carlo_mi_estimate(&p, *n, seed)?;
                report["monte_carlo"] = json!({
                    "estimate": json_f64(est.estimate),
                    "standard_error": json_f64(est.standard_error),
                    "samples": est.samples,
                    "seed": seed,
                });
            }
            emit_json(cli, "mi", &report)?;
            Ok(Outcome::Done)
        }
    }
}

fn distortions(d: &[f64]) -> Result<DistortionVector> {
    if d.is_empty() {
        bail!("--d is required");
    }
    DistortionVector::new(d.to_vec()).context("invalid distortion vector")
}

fn region_kind(region: Region, tau: &[f64]) -> Result<RegionKind> {
    if !tau.is_empty() && !matches!(region, Region::Parametric) {
        bail!("--tau only applies to the parametric region");
    }
    Ok(match region {
        Region::Inner => RegionKind::Inner,
        Region::OuterPow2 => RegionKind::OuterPow2,
        Region::OuterK => RegionKind::OuterK,
        Region::P2p => RegionKind::PointToPoint,
        Region::Parametric => RegionKind::Parametric(TauVector::new(tau.to_vec())?),
    })
}

fn gap_mode(mode: Mode) -> GapMode {
    match mode {
        Mode::Pow2 => GapMode::Pow2,
        Mode::Kfactor => GapMode::Kfactor,
        Mode::Relaxed => GapMode::Relaxed,
    }
}

#[allow(clippy::too_many_arguments)]
fn boundary(
    channel: &BroadcastChannel,
    region: &RegionKind,
    free: usize,
    solve: usize,
    base: &[f64],
    grid: &[f64],
    points: usize,
    lo: Option<f64>,
    hi: f64,
    tol: f64,
) -> Result<BoundaryCurve> {
    let users = channel.users();
    for (name, user) in [("--free", free), ("--solve", solve)] {
        if user == 0 || user > users {
            bail!("{name} must be a user number in 1..={users}");
        }
    }
    let base = if base.is_empty() {
        if users != 2 {
            bail!("--base is required with more than two users");
        }
        vec![1.0; 2]
    } else {
        base.to_vec()
    };
    let grid = if grid.is_empty() {
        let lo = match lo {
            Some(lo) => lo,
            None => distortion_bounds::regions::point_to_point_distortion(channel, free - 1)?,
        };
        if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
            bail!("grid limits must satisfy 0 < lo <= hi <= 1");
        }
        log_grid(lo, hi, points)
    } else {
        if grid
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            bail!("--grid must be strictly increasing");
        }
        grid.to_vec()
    };
    Ok(trace_boundary_with(
        region,
        channel,
        &base,
        free - 1,
        solve - 1,
        &grid,
        tol,
    )?)
}

fn prepare(dir: &Path, name: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir.join(name))
}

fn emit_json(cli: &Cli, name: &str, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match &cli.out {
        Some(dir) => {
            let path = prepare(dir, &format!("{name}.json"))?;
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        }
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
