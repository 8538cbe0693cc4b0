use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "blockortho", version, about = "Standard and general block orthogonal polynomials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tables of P_{i;n} with H and Z.
    Table(TableArgs),
    /// Run every consistency check and report pass/fail per check.
    Verify(VerifyArgs),
    /// Sign changes of P_{i;n} in the first measure's domain.
    Roots(RootsArgs),
    /// Projectors onto P_i and its complement, by both routes.
    Projector(ProjectorArgs),
    /// Existence of a third block orthogonal subspace for gamma weights.
    ThreeSubspace(ThreeSubspaceArgs),
    /// Normalized moments of the selected measures.
    Moments(MomentsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// exp(-x^2) and exp(-2x^2).
    Hermite,
    /// x^(z-1) exp(-x) and x^(z-1) exp(-2x).
    Laguerre,
}

#[derive(Debug, Clone, Args)]
pub struct MeasureArgs {
    #[arg(long, value_enum)]
    pub pair: Option<Preset>,
    /// Gamma parameter of the laguerre pair.
    #[arg(long, default_value = "1")]
    pub z: String,
    /// Tabulated moments (CSV `n,mu_n` or JSON) for the first measure.
    #[arg(long = "moments-file")]
    pub moments_file: Option<PathBuf>,
    /// Tabulated moments for the second measure.
    #[arg(long = "moments-file2")]
    pub moments_file2: Option<PathBuf>,
    /// Domain of tabulated measures as `lo,hi`.
    #[arg(long, default_value = "-inf,inf", allow_hyphen_values = true)]
    pub domain: String,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct BackendArgs {
    /// Rational arithmetic (the default).
    #[arg(long, conflicts_with = "float")]
    pub exact: bool,
    /// f64 arithmetic.
    #[arg(long)]
    pub float: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub measures: MeasureArgs,
    #[command(flatten)]
    pub backend: BackendArgs,
    #[arg(long = "N")]
    pub n: usize,
    /// A single block index; every i < N when omitted.
    #[arg(long)]
    pub i: Option<usize>,
    /// monic, orthonormal or det-normalized.
    #[arg(long, default_value = "monic")]
    pub normalization: String,
    #[arg(long)]
    pub csv: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub measures: MeasureArgs,
    #[command(flatten)]
    pub backend: BackendArgs,
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long)]
    pub i: Option<usize>,
    #[arg(long)]
    pub no_integrals: bool,
    #[arg(long)]
    pub no_zeros: bool,
    #[arg(long)]
    pub no_projectors: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RootsArgs {
    #[command(flatten)]
    pub measures: MeasureArgs,
    #[command(flatten)]
    pub backend: BackendArgs,
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long)]
    pub i: usize,
    /// A single degree; every n in i..N when omitted.
    #[arg(long = "n")]
    pub degree: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    /// Through the first measure's orthogonal polynomials.
    Q,
    /// Through the second measure and the i = 0 connection matrices.
    Second,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct ProjectorArgs {
    #[command(flatten)]
    pub measures: MeasureArgs,
    #[command(flatten)]
    pub backend: BackendArgs,
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long)]
    pub i: usize,
    #[arg(long, value_enum, default_value = "both")]
    pub route: Route,
}

#[derive(Debug, Clone, Args)]
pub struct ThreeSubspaceArgs {
    /// Gamma parameter of (,)_12.
    #[arg(long, required_unless_present = "symmetric12")]
    pub z12: Option<String>,
    #[arg(long)]
    pub z23: String,
    #[arg(long)]
    pub z13: String,
    /// Use the even weight exp(-x^2) for (,)_12 instead of a gamma weight.
    #[arg(long, conflicts_with = "z12")]
    pub symmetric12: bool,
}

#[derive(Debug, Clone, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub measures: MeasureArgs,
    #[command(flatten)]
    pub backend: BackendArgs,
    /// Highest moment order.
    #[arg(long, default_value_t = 10)]
    pub order: usize,
}
