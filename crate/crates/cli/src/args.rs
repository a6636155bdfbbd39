//! Command-line syntax.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::settings::StreetFlags;

#[derive(Debug, Parser)]
#[command(name = "vlab", version, about = "Experiments on arrays of staggered vortex streets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the stream function on a grid (CSV, JSON or SVG contour plot).
    Field(FieldArgs),
    /// Co-moving stagnation points of one period cell.
    Stagnation(StagnationArgs),
    /// Trace the separatrices of the central saddles.
    Separatrix(SeparatrixArgs),
    /// Streamline topology class from separatrices and saddle levels.
    Topology(TopologyArgs),
    /// Translation speed U_N as a function of the truncation.
    Equilibrium(EquilibriumArgs),
    /// Critical separations h_1 > h_2 > ... at fixed b.
    Bifurcate(BifurcateArgs),
    /// Bifurcation curves h_k(b) over a grid of b.
    Curves(CurvesArgs),
    /// Fit h_k = h_inf + c / delta^k to a long bifurcation sequence.
    Scaling(ScalingArgs),
    /// Integrate a finite array in time.
    Evolve(EvolveArgs),
    /// Summary of the headline results for one b.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FrameKind {
    /// Frame moving with the streets.
    Comoving,
    /// Frame at rest.
    Lab,
}

impl std::str::FromStr for FrameKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Plain `key = value` file; keys are flag names with `_` for `-`.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Output format; inferred from the --out extension when absent.
    #[arg(long)]
    pub format: Option<Format>,
    /// Truncation half-count N: streets -N..=N enter every lattice sum [default: 150].
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct Street {
    /// Row spacing a [default: 1].
    #[arg(long)]
    pub a: Option<f64>,
    /// Separation b of the two rows of a street.
    #[arg(long)]
    pub b: Option<f64>,
    /// Street-to-street separation h.
    #[arg(long)]
    pub h: Option<f64>,
    /// Circulation magnitude [default: 1].
    #[arg(long)]
    pub gamma: Option<f64>,
}

impl Street {
    pub fn flags(&self, n: Option<usize>) -> StreetFlags {
        StreetFlags { a: self.a, b: self.b, h: self.h, gamma: self.gamma, n }
    }
}

#[derive(Debug, Clone, Args)]
pub struct WindowArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub y_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub y_max: Option<f64>,
    /// Grid nodes along x [default: 241].
    #[arg(long)]
    pub nx: Option<usize>,
    /// Grid nodes along y [default: 241].
    #[arg(long)]
    pub ny: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub street: Street,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Reference frame of the stream function [default: comoving].
    #[arg(long)]
    pub frame: Option<FrameKind>,
    /// Number of thin contour levels in SVG output [default: 40].
    #[arg(long)]
    pub levels: Option<usize>,
    /// Also write the velocity at every node (CSV/JSON).
    #[arg(long)]
    pub velocity: bool,
}

#[derive(Debug, Clone, Args)]
pub struct StagnationArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub street: Street,
    /// Lower end of the search band [default: (b - h)/2].
    #[arg(long, allow_hyphen_values = true)]
    pub y_min: Option<f64>,
    /// Upper end of the search band [default: (b + h)/2].
    #[arg(long, allow_hyphen_values = true)]
    pub y_max: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SeparatrixArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub street: Street,
    /// Arc length allowed per branch [default: 40 (a + h)].
    #[arg(long)]
    pub arc_budget: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct TopologyArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub street: Street,
}

#[derive(Debug, Clone, Args)]
pub struct EquilibriumArgs {
    #[command(flatten)]
    pub common: Common,
    /// Separation b of the two rows of a street.
    #[arg(long)]
    pub b: Option<f64>,
    /// Comma-separated street separations.
    #[arg(long, value_name = "LIST")]
    pub h: Option<String>,
    /// Row spacing a [default: 1].
    #[arg(long)]
    pub a: Option<f64>,
    /// Circulation magnitude [default: 1].
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct BifurcateArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub street: Street,
    /// Number of critical separations [default: 3].
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Largest accepted uncertainty of any h_k [default: 1e-8].
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct CurvesArgs {
    #[command(flatten)]
    pub common: Common,
    /// Curves h_1 ... h_kmax [default: 5].
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Comma-separated b values [default: 23 points from 0.05 to 0.5].
    #[arg(long, value_name = "LIST")]
    pub b_grid: Option<String>,
    /// b at which each curve is extrapolated [default: 0.5].
    #[arg(long)]
    pub extrapolate_to: Option<f64>,
    /// Trailing points used by the extrapolation [default: 2].
    #[arg(long)]
    pub extrapolate_points: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub street: Street,
    /// Length of the sequence [default: 100].
    #[arg(long)]
    pub kmax: Option<usize>,
    /// First k of the fit window [default: 20].
    #[arg(long)]
    pub fit_lo: Option<usize>,
    /// Last k of the fit window [default: 60].
    #[arg(long)]
    pub fit_hi: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub street: Street,
    /// Number of streets, odd [default: 11].
    #[arg(long)]
    pub streets: Option<usize>,
    /// Vortices in each row of a street [default: 10].
    #[arg(long)]
    pub per_row: Option<usize>,
    /// Final time in units of a^2/Gamma [default: 12].
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Comma-separated snapshot times [default: 0,4,8,12].
    #[arg(long, value_name = "LIST")]
    pub snapshots: Option<String>,
    /// rk45-adaptive or rk4-fixed [default: rk45-adaptive, rk4-fixed when only --dt is given].
    #[arg(long)]
    pub scheme: Option<String>,
    /// Fixed step (rk4-fixed) or initial step (rk45-adaptive) [default: 0.01].
    #[arg(long)]
    pub dt: Option<f64>,
    /// Absolute position tolerance of rk45-adaptive, in units of a [default: 1e-10].
    #[arg(long)]
    pub tol: Option<f64>,
    /// Directory receiving the snapshot files [default: current directory].
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Also dump co-moving stream-function grids (CSV and SVG) per snapshot.
    #[arg(long)]
    pub grid: bool,
    #[command(flatten)]
    pub window: WindowArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub common: Common,
    /// Separation b of the two rows of a street [default: 0.2805].
    #[arg(long)]
    pub b: Option<f64>,
}
