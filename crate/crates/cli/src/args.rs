//! Command-line definitions.

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "grained",
    version,
    about = "Count and estimate ]B,C]-grained integers with exactly k prime factors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact κ (ordered tuples) and π (distinct products) at one x.
    Exact(ExactArgs),
    /// Enclosure of κ at one x by one method.
    Estimate(EstimateArgs),
    /// Enclosures over a ξ grid, as CSV or JSON.
    Sweep(SweepArgs),
    /// Run a verification and exit 1 if any check fails.
    Verify(VerifyArgs),
}

/// `B` with either `C` or `α`.
#[derive(Debug, Clone, Args)]
pub struct GrainArgs {
    /// Lower prime bound B (integer expression, e.g. 1100e6).
    #[arg(long = "B", value_name = "EXPR")]
    pub b: String,
    /// Upper prime bound C (integer expression, e.g. 2^37-1).
    #[arg(long = "C", value_name = "EXPR", conflicts_with = "alpha", required_unless_present = "alpha")]
    pub c: Option<String>,
    /// C = B^(1+α); or `<s>exp` for C = ⌊B^s⌋.
    #[arg(long, value_name = "ALPHA")]
    pub alpha: Option<String>,
}

/// Position: `x` directly or `ξ` with `x = B^(k+ξα)`.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct PointArgs {
    /// The bound x (real expression).
    #[arg(long, value_name = "EXPR")]
    pub x: Option<String>,
    /// ξ with x = B^(k+ξα).
    #[arg(long, value_name = "XI", allow_hyphen_values = true)]
    pub xi: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Lambda,
    Nu,
    Eta,
    Kappa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Riemann,
    Dusart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Normalize {
    Absolute,
    PerX,
    RelativeToKappaTilde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyTarget {
    Pnt,
    Sturm,
    Sandwich,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub grain: GrainArgs,
    /// Number of prime factors.
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub grain: GrainArgs,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, value_enum, default_value = "eta")]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value = "riemann")]
    pub mode: ModeArg,
    /// Relative tolerance of the nested quadrature.
    #[arg(long, default_value = "1e-8")]
    pub rel_tol: String,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub grain: GrainArgs,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    /// ξ grid start:stop:step.
    #[arg(long, value_name = "GRID", allow_hyphen_values = true)]
    pub xi: String,
    /// Methods, comma separated or repeated.
    #[arg(long = "method", value_enum, value_delimiter = ',', default_value = "lambda,eta")]
    pub methods: Vec<MethodArg>,
    #[arg(long, value_enum, default_value = "riemann")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "absolute")]
    pub normalize: Normalize,
    #[arg(long, default_value = "1e-8")]
    pub rel_tol: String,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub target: VerifyTarget,
    /// pnt: largest x checked.
    #[arg(long, default_value = "1e7")]
    pub max: String,
    #[arg(long, value_enum, default_value = "riemann")]
    pub mode: ModeArg,
    /// sturm, sandwich: k values (`3..7`, `3..=7`, `2,3`).
    #[arg(long)]
    pub k: Option<String>,
    /// sandwich: lower prime bound.
    #[arg(long = "B", value_name = "EXPR")]
    pub b: Option<String>,
    #[arg(long = "C", value_name = "EXPR", conflicts_with = "alpha")]
    pub c: Option<String>,
    #[arg(long, value_name = "ALPHA")]
    pub alpha: Option<String>,
    /// sandwich: number of x points per k.
    #[arg(long, default_value_t = 60)]
    pub points: usize,
    #[arg(long, default_value = "1e-8")]
    pub rel_tol: String,
    #[arg(long)]
    pub json: bool,
}
