//! Parameter resolution: command-line flags override config-file values,
//! unknown config keys are rejected, and the fully resolved set is echoed
//! into every output's provenance block.

use clap::Args;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Every tunable parameter, shared by all subcommands. Flags win over the
/// config file; unset values fall back to per-subcommand defaults.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Side length S (vertices).
    #[arg(long)]
    pub size: Option<i64>,
    /// Horizontal box count K (box is [0,K*S) x [0,L*S)).
    #[arg(long)]
    pub k: Option<i64>,
    /// Vertical box count L.
    #[arg(long)]
    pub l: Option<i64>,
    /// Inverse temperature gamma >= 0.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Metric grid resolution m (grid points (i/m, j/m)).
    #[arg(long)]
    pub m: Option<usize>,
    /// Replica count n >= 1.
    #[arg(long)]
    pub replicas: Option<usize>,
    /// Quantile probability p in (0,1].
    #[arg(long)]
    pub p: Option<f64>,
    /// Quantile probability q in (0,1].
    #[arg(long)]
    pub q: Option<f64>,
    /// Comma-separated tail thresholds u.
    #[arg(long, value_delimiter = ',')]
    pub u_grid: Option<Vec<f64>>,
    /// Comma-separated gluing thresholds y.
    #[arg(long, value_delimiter = ',')]
    pub y_grid: Option<Vec<f64>>,
    /// Comma-separated scale list.
    #[arg(long, value_delimiter = ',')]
    pub scales: Option<Vec<i64>>,
    /// Smallest dyadic exponent t (power-law fit).
    #[arg(long)]
    pub t_min: Option<u32>,
    /// Largest dyadic exponent t (power-law fit).
    #[arg(long)]
    pub t_max: Option<u32>,
    /// Stretch shape parameter a (gluing).
    #[arg(long)]
    pub a: Option<i64>,
    /// Stretch shape parameter b (gluing).
    #[arg(long)]
    pub b: Option<i64>,
    /// Gluing multiplicity k.
    #[arg(long)]
    pub glue_k: Option<i64>,
    /// Crossing spec: lr, bt, easy or hard.
    #[arg(long)]
    pub spec: Option<String>,
    /// Normalizer override for the metric subcommand.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Draw the left-right geodesic in renders.
    #[arg(long)]
    pub geodesic: Option<bool>,
    /// Master seed (64-bit).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker thread count (fallback: LFPP_THREADS, then all cores).
    #[arg(long)]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Output directory.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// TOML config file; flags override its values.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Params {
    /// Fills unset fields from `other` (the config file layer).
    pub fn merged_over(mut self, other: Params) -> Params {
        macro_rules! take {
            ($f:ident) => {
                if self.$f.is_none() {
                    self.$f = other.$f;
                }
            };
        }
        take!(size);
        take!(k);
        take!(l);
        take!(gamma);
        take!(m);
        take!(replicas);
        take!(p);
        take!(q);
        take!(u_grid);
        take!(y_grid);
        take!(scales);
        take!(t_min);
        take!(t_max);
        take!(a);
        take!(b);
        take!(glue_k);
        take!(spec);
        take!(kappa);
        take!(geodesic);
        take!(seed);
        self
    }
}

/// A usage error: printed as one line, exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage<T>(msg: impl Into<String>) -> Result<T, anyhow::Error> {
    Err(UsageError(msg.into()).into())
}

/// Loads and merges the optional config file; rejects unknown keys.
pub fn resolve(params: Params) -> Result<Params, anyhow::Error> {
    let merged = match &params.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                UsageError(format!("cannot read config file {}: {e}", path.display()))
            })?;
            let file: Params = toml::from_str(&text)
                .map_err(|e| UsageError(format!("invalid config file {}: {e}", path.display())))?;
            params.merged_over(file)
        }
        None => params,
    };
    if let Some(g) = merged.gamma {
        if g < 0.0 || g.is_nan() {
            return usage(format!("--gamma must be nonnegative, got {g}"));
        }
    }
    if merged.replicas == Some(0) {
        return usage("--replicas must be at least 1");
    }
    for (name, v) in [
        ("--size", merged.size),
        ("--k", merged.k),
        ("--l", merged.l),
    ] {
        if let Some(v) = v {
            if v < 1 {
                return usage(format!("{name} must be positive, got {v}"));
            }
        }
    }
    for (name, v) in [("--p", merged.p), ("--q", merged.q)] {
        if let Some(v) = v {
            if !(v > 0.0 && v <= 1.0) {
                return usage(format!("{name} must lie in (0, 1], got {v}"));
            }
        }
    }
    Ok(merged)
}

/// The provenance view of a resolved parameter set: the science parameters
/// that determine output bytes, sorted by key. Execution details (threads,
/// paths) stay out so reruns with different thread counts emit identical CSV.
pub fn provenance_pairs(used: &[(&str, String)]) -> Vec<(String, String)> {
    let mut v: Vec<(String, String)> = used
        .iter()
        .map(|(k, val)| (k.to_string(), val.clone()))
        .collect();
    v.sort();
    v
}
