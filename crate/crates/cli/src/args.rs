//! Flag definitions and grid/system descriptor parsing.
//!
//! Precedence for shared settings: explicit flag, then config file, then
//! the `RECLAB_SEED` environment variable (seed only), then the default.
//! The resolved values are echoed into the manifest.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use reclab_core::rational::rat_from_str;
use reclab_core::systems::{MarkovShift, MetricSystem};
use reclab_core::Error as CoreError;

use crate::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "reclab",
    version,
    about = "Return-time statistics laboratory: hitting counts, Poisson limits, Chen-Stein bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Empirical and exact hitting-count laws against the Poisson law.
    PoissonCheck(PoissonCheckArgs),
    /// Exact Bowen-ball periods tau/n over sampled centers and an n-grid.
    PeriodScan(PeriodScanArgs),
    /// Brin-Katok and recurrence-rate entropy estimators over an n-grid.
    Entropy(EntropyArgs),
    /// Chen-Stein bound against the exact TV distance for cylinder targets.
    SteinBound(SteinBoundArgs),
    /// Inner/boundary cylinder approximation gap over a depth grid.
    ApproxGap(ApproxGapArgs),
    /// Ball-intersecting cylinder counts and Hamming cluster bounds.
    ClusterCount(ClusterCountArgs),
    /// Exact or bracketed alpha/phi mixing coefficients over a gap grid.
    Mixing(MixingArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::PoissonCheck(_) => "poisson-check",
            Command::PeriodScan(_) => "period-scan",
            Command::Entropy(_) => "entropy",
            Command::SteinBound(_) => "stein-bound",
            Command::ApproxGap(_) => "approx-gap",
            Command::ClusterCount(_) => "cluster-count",
            Command::Mixing(_) => "mixing",
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    /// Master seed (fallback: config file, then RECLAB_SEED, then 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Flat TOML config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory for manifest/CSV/JSON artifacts.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Artifact filename prefix (default: the command name).
    #[arg(long)]
    pub prefix: Option<String>,
    /// Worker threads for the harness; results are identical for all N.
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Config-file counterpart of [`CommonArgs`] plus per-command overrides.
#[derive(Debug, Default, Deserialize)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub trials: Option<u64>,
    pub t: Option<f64>,
}

/// Fully resolved shared settings, echoed into the manifest.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedCommon {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub prefix: String,
    pub workers: usize,
}

impl CommonArgs {
    pub fn resolve(&self, command_name: &str) -> CliResult<(ResolvedCommon, FileConfig)> {
        let file: FileConfig = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?
            }
            None => FileConfig::default(),
        };
        let env_seed = std::env::var("RECLAB_SEED")
            .ok()
            .map(|s| {
                s.parse::<u64>()
                    .map_err(|_| CliError::Config(format!("RECLAB_SEED = {s:?} is not a u64")))
            })
            .transpose()?;
        let seed = self.seed.or(file.seed).or(env_seed).unwrap_or(0);
        let out_dir =
            self.out_dir.clone().or_else(|| file.out_dir.clone()).unwrap_or_else(|| {
                PathBuf::from("reclab-out")
            });
        let workers = self.workers.or(file.workers).unwrap_or(1);
        if workers == 0 {
            return Err(CliError::Config("workers must be >= 1".into()));
        }
        let prefix = self.prefix.clone().unwrap_or_else(|| command_name.to_string());
        Ok((ResolvedCommon { seed, out_dir, prefix, workers }, file))
    }
}

#[derive(Debug, Args)]
pub struct PoissonCheckArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// System: fair-coin | golden-mean | markov | doubling | tent | gauss.
    #[arg(long, default_value = "fair-coin")]
    pub system: String,
    /// Markov matrix rows, e.g. "0.7,0.3;0.6,0.4" (exact decimals/fractions).
    #[arg(long)]
    pub matrix: Option<String>,
    /// Cylinder target: comma-separated words, e.g. "0001" or "00,01".
    #[arg(long)]
    pub word: Option<String>,
    /// Cylinder target family over the n-grid: "zeros-one" is 0..01.
    #[arg(long)]
    pub word_family: Option<String>,
    /// Ball radius (metric systems).
    #[arg(long)]
    pub eps: Option<f64>,
    /// Ball center: a number, or "random" to resample per trial.
    #[arg(long)]
    pub center: Option<String>,
    /// Word/ball length grid, e.g. "8" or "4,8,12" or "4..12".
    #[arg(long, default_value = "8")]
    pub n: String,
    /// Kac parameter t.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Count cap K (default max(32, ceil(8t))).
    #[arg(long)]
    pub cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PeriodScanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value = "doubling")]
    pub system: String,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Ball length grid.
    #[arg(long, default_value = "8,16,24")]
    pub n: String,
    /// Number of Lebesgue-random centers.
    #[arg(long, default_value_t = 100)]
    pub centers: u64,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value = "doubling")]
    pub system: String,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value = "16,32")]
    pub n: String,
    #[arg(long, default_value_t = 50)]
    pub centers: u64,
    /// Recurrence-time cap.
    #[arg(long, default_value_t = 1 << 24)]
    pub cap: u64,
}

#[derive(Debug, Args)]
pub struct SteinBoundArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value = "fair-coin")]
    pub system: String,
    #[arg(long)]
    pub matrix: Option<String>,
    /// Word family over the n-grid (default zeros-one: 0..01).
    #[arg(long, default_value = "zeros-one")]
    pub word_family: String,
    #[arg(long, default_value = "4,6,8,10,12")]
    pub n: String,
    #[arg(long)]
    pub t: Option<f64>,
    /// Count cap for the exact-law TV computation.
    #[arg(long)]
    pub cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ApproxGapArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 6)]
    pub ball_n: usize,
    #[arg(long, default_value = "0.37")]
    pub center: String,
    /// Approximation depth grid N.
    #[arg(long, default_value = "8..20")]
    pub depth: String,
    #[arg(long)]
    pub t: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ClusterCountArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// doubling (ball-intersecting counts) or a shift (Hamming clusters).
    #[arg(long, default_value = "doubling")]
    pub system: String,
    #[arg(long)]
    pub matrix: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value = "0.37")]
    pub center: String,
    /// Depth / word-length grid.
    #[arg(long, default_value = "10..40")]
    pub n: String,
    /// Exponential rate delta in the e^{delta n} reference curve.
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Hamming radius for shift clusters.
    #[arg(long, default_value_t = 0.25)]
    pub beta: f64,
}

#[derive(Debug, Args)]
pub struct MixingArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value = "markov")]
    pub system: String,
    #[arg(long, default_value = "0.7,0.3;0.3,0.7")]
    pub matrix: Option<String>,
    /// Past cylinder depth.
    #[arg(long, default_value_t = 1)]
    pub depth_past: usize,
    /// Future cylinder depth.
    #[arg(long, default_value_t = 1)]
    pub depth_future: usize,
    /// Gap grid.
    #[arg(long, default_value = "1..10")]
    pub k: String,
    /// alpha or phi.
    #[arg(long, default_value = "alpha")]
    pub kind: String,
}

/// Parse a grid: `"12"`, `"4,8,12"`, or `"4..12"` (inclusive).
pub fn parse_grid(s: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::Config(format!("cannot parse grid {s:?}"));
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',')
        .map(|part| part.trim().parse().map_err(|_| bad()))
        .collect()
}

/// Parse `"0.7,0.3;0.6,0.4"` into exact rational rows.
pub fn parse_matrix(s: &str) -> CliResult<MarkovShift> {
    let rows = s
        .split(';')
        .map(|row| row.split(',').map(|e| rat_from_str(e)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MarkovShift::new(rows)?)
}

/// Shift-valued system descriptors.
pub fn parse_shift(system: &str, matrix: Option<&str>) -> CliResult<MarkovShift> {
    match system {
        "fair-coin" => Ok(MarkovShift::fair_coin()),
        "golden-mean" => Ok(MarkovShift::golden_mean()),
        "markov" => {
            let m = matrix.ok_or_else(|| {
                CliError::Config("--system markov requires --matrix".into())
            })?;
            parse_matrix(m)
        }
        other => Err(CliError::Core(CoreError::Validation(format!(
            "unknown shift system {other:?} (want fair-coin, golden-mean or markov)"
        )))),
    }
}

/// Metric-map system descriptors.
pub fn parse_metric(system: &str) -> CliResult<MetricSystem> {
    match system {
        "doubling" => Ok(MetricSystem::doubling()),
        "tent" => Ok(MetricSystem::tent()),
        "gauss" => Ok(MetricSystem::gauss()),
        other => Err(CliError::Core(CoreError::Validation(format!(
            "unknown metric system {other:?} (want doubling, tent or gauss)"
        )))),
    }
}

pub fn is_metric(system: &str) -> bool {
    matches!(system, "doubling" | "tent" | "gauss")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_parse() {
        assert_eq!(parse_grid("12").unwrap(), vec![12]);
        assert_eq!(parse_grid("4,8,12").unwrap(), vec![4, 8, 12]);
        assert_eq!(parse_grid("4..6").unwrap(), vec![4, 5, 6]);
        assert_eq!(parse_grid("4..=6").unwrap(), vec![4, 5, 6]);
        assert!(parse_grid("x").is_err());
        assert!(parse_grid("6..4").is_err());
    }

    #[test]
    fn matrices_parse_exactly() {
        let shift = parse_matrix("0.7,0.3;0.6,0.4").unwrap();
        assert_eq!(shift.stationary_f64()[0], 2.0 / 3.0);
        assert!(parse_matrix("1,0;0,1").is_err()); // reducible
    }
}
