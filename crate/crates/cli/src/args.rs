use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Parser)]
#[command(name = "ptfsense", version, about = "Noise sensitivity and surface area experiments for polynomial threshold functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Estimate Pr(f(X) != f(Z)) for the eps-noisy copy Z.
    EstimateGns(CommonArgs),
    /// Estimate Pr(f(X) != f((1 + eps) X)).
    EstimateRadial(CommonArgs),
    /// Estimate Pr(f(X) != f(X + eps Y)).
    EstimateWiggle(CommonArgs),
    /// Extrapolate Gaussian surface area from boundary crossings.
    EstimateSurface(CommonArgs),
    /// Count sign changes along random great circles.
    SignChanges(SignChangeArgs),
    /// Compare estimates against the closed-form bounds.
    VerifyBounds(CommonArgs),
    /// Noise sensitivity against its bound over an eps grid.
    Sweep(CommonArgs),
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::EstimateGns(c)
            | Command::EstimateRadial(c)
            | Command::EstimateWiggle(c)
            | Command::EstimateSurface(c)
            | Command::VerifyBounds(c)
            | Command::Sweep(c) => c,
            Command::SignChanges(s) => &s.common,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["poly", "family"])))]
pub struct CommonArgs {
    /// Polynomial JSON file: {"n": int, "terms": [{"coeff": float, "exps": [int, ...]}]}.
    #[arg(long, value_name = "FILE")]
    pub poly: Option<PathBuf>,

    /// Family spec, e.g. ball:r=1.0,n=2 or prodlin:n=3,d=3,seed=7.
    #[arg(long, value_name = "SPEC")]
    pub family: Option<String>,

    #[arg(long)]
    pub eps: Option<f64>,

    /// Comma-separated, strictly decreasing.
    #[arg(long, value_delimiter = ',', value_name = "A,B,C")]
    pub eps_grid: Option<Vec<f64>>,

    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads; affects wall time only.
    #[arg(long, env = crate::WORKERS_ENV)]
    pub workers: Option<usize>,

    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SignChangeArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Include per-circle reports for the first K circles.
    #[arg(long, default_value_t = 0, value_name = "K")]
    pub audit: usize,
}
