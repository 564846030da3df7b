//! Command-line surface.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "flowlab",
    version,
    about = "Flow-variable analysis of 2D wave fields: vortices, winding, \
             node regularity, core regularization, circle spectral evolution",
    after_help = "Input paths accept '-' for standard input. Reports go to \
                  --out or standard output. Exit codes: 0 ok (possibly with \
                  warnings), 1 usage, 2 malformed input, 3 numerical failure."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Detect nodes, classify their regularity, and integrate user loops
    /// over a complex field file.
    Analyze(AnalyzeArgs),
    /// Classify a list of family exponents and report balance residuals.
    AlphaScan(AlphaScanArgs),
    /// Regularized-core diagnostics: curl comparison, circulation table,
    /// penalty balance at the core.
    Regularize(RegularizeArgs),
    /// Spectral evolution of e^{i alpha phi} on the circle and its density
    /// drift, against the stationary flow solution.
    Smolin(SmolinArgs),
    /// Generate a synthetic wave field from a spec file.
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Complex field JSON ('-' for stdin)
    #[arg(long)]
    pub field: String,
    /// Optional JSON array of loops to integrate
    #[arg(long)]
    pub loops: Option<String>,
    /// Density floor; defaults to 1e-12 * max(rho)
    #[arg(long)]
    pub eps_rho: Option<f64>,
    /// Half-width of the FinitePositive band around alpha = 1
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Report destination (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the derived flow bundle here
    #[arg(long)]
    pub flow_out: Option<PathBuf>,
    /// Write a radial density profile CSV here
    #[arg(long)]
    pub rho_profile: Option<PathBuf>,
    /// Profile centre as "x,y"
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.0, 0.0])]
    pub profile_center: Vec<f64>,
    #[arg(long, default_value_t = 64)]
    pub profile_bins: usize,
}

#[derive(Args, Debug)]
pub struct AlphaScanArgs {
    /// Comma-separated family exponents
    #[arg(long, value_delimiter = ',', required = true)]
    pub alphas: Vec<f64>,
    /// Points per grid side
    #[arg(long, default_value_t = 257)]
    pub grid_n: usize,
    /// Grid covers [-half, half]^2
    #[arg(long, default_value_t = 1.0)]
    pub half_extent: f64,
    /// Balance annulus as "rmin,rmax"
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.2, 1.0])]
    pub annulus: Vec<f64>,
    /// Classifier band half-width
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RegularizeArgs {
    /// Model JSON {"alpha", "r0", "rho0", "lambda"} ('-' for stdin)
    #[arg(long)]
    pub model: String,
    #[arg(long, default_value_t = 513)]
    pub grid_n: usize,
    #[arg(long, default_value_t = 2.2)]
    pub half_extent: f64,
    /// Circle radii for the circulation table
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
    pub radii: Vec<f64>,
    /// Annulus "rmin,rmax" for the curl comparison
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.1, 2.0])]
    pub curl_annulus: Vec<f64>,
    /// Write a radial profile CSV of the discrete curl here
    #[arg(long)]
    pub omega_profile: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    pub profile_bins: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SmolinArgs {
    /// Comma-separated winding parameters
    #[arg(long, value_delimiter = ',', required = true)]
    pub alpha: Vec<f64>,
    /// Comma-separated sample times (must include 0)
    #[arg(long, value_delimiter = ',', required = true)]
    pub times: Vec<f64>,
    /// Mode cutoff N (modes -N..=N)
    #[arg(long, default_value_t = 512)]
    pub modes: usize,
    /// Angle samples; defaults to 4N + 2 (alias-free for the density)
    #[arg(long)]
    pub nphi: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Generator spec JSON ('-' for stdin)
    #[arg(long)]
    pub spec: String,
    /// Field file destination (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}
