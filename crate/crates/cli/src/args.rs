use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use devar_core::assoc::Method;

use crate::io::parse_delimiter;

#[derive(Debug, Parser)]
#[command(name = "devar", version, about = "Devariation-adjusted RV association testing")]
pub struct Cli {
    /// Worker threads (default: all available cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test association between two data files.
    Test(TestArgs),
    /// Draw one dataset from the latent factor model.
    Simulate(SimulateArgs),
    /// Monte Carlo power sweep.
    Power(SweepArgs),
    /// Monte Carlo Type I error sweep (joint signal switched off).
    Typei(SweepArgs),
    /// Evaluate an asymptotic power formula or critical value.
    Theory(TheoryArgs),
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    #[arg(long, default_value = "devrv", value_parser = parse_method)]
    pub method: Method,
    #[arg(long, default_value_t = 999)]
    pub perms: usize,
    #[arg(long, env = "DEVAR_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Nuisance covariates; an intercept is added if absent.
    #[arg(long)]
    pub covariates: Option<PathBuf>,
    /// Covariance of X for the gold method.
    #[arg(long)]
    pub sigma_x: Option<PathBuf>,
    #[arg(long)]
    pub sigma_y: Option<PathBuf>,
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    pub delimiter: u8,
    /// Input files start with a header row.
    #[arg(long)]
    pub header: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML or JSON generator config; omitted fields take baseline values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the config seed.
    #[arg(long, env = "DEVAR_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// TOML or JSON sweep config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory for the CSV table and JSON sidecar.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Reduced replicate counts (200 power, 2000 Type I).
    #[arg(long)]
    pub fast: bool,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub perms: Option<usize>,
    #[arg(long, env = "DEVAR_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    pub methods: Option<Vec<Method>>,
    /// Allows replicate counts below the floor.
    #[arg(long)]
    pub allow_low_replicates: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Formula {
    Scenario1,
    Scenario3,
    LowerBound,
    CriticalRv,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    #[arg(long, value_enum)]
    pub formula: Formula,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub rj: usize,
    #[arg(long)]
    pub rix: Option<usize>,
    #[arg(long)]
    pub riy: Option<usize>,
    #[arg(long)]
    pub cx: Option<f64>,
    #[arg(long)]
    pub cy: Option<f64>,
    #[arg(long)]
    pub sigma_j: Option<f64>,
    #[arg(long)]
    pub sigma_ix: Option<f64>,
    #[arg(long)]
    pub sigma_iy: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub tau_x: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau_y: f64,
    #[arg(long, default_value_t = 3.0)]
    pub mu4_x: f64,
    #[arg(long, default_value_t = 3.0)]
    pub mu4_y: f64,
    #[arg(long)]
    pub n: Option<usize>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: devar_core::DevarError| e.to_string())
}
