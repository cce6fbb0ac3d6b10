use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "cohomlab",
    version,
    about = "Operator algebra checks, solvers and scaling experiments"
)]
pub struct Cli {
    /// JSON config file (schema in docs/config.md)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for summary.json, rows.csv and solver output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for sampled points; overrides the config file
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Suppress stdout
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check brackets, Casimir centrality and the V0 power identity
    VerifyAlgebra(ModelArgs),
    /// Solve the twisted or map equation for a sampled right-hand side
    Solve(SolveArgs),
    /// Sobolev scaling of the counterexample family
    LowerBound(ExperimentArgs),
    /// Main-term and remainder bounds for the u^β split
    Remainder(ExperimentArgs),
    /// Cosine lower bound and phase defect on I_ν
    CosBound(ExperimentArgs),
    /// Tame-direction ratio against the u-direction contrast
    TameCheck(ExperimentArgs),
    /// Cocycle family and transfer-function divergence
    Obstruction(ObstructionArgs),
    /// Classify root pairs E_φ and Ē_φ
    Roots(RootsArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Model kind, e.g. ind_p, ind_p_fourier, sl2r2_fourier; all catalogued models when absent
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Fourier axis k of x_k for ind_p_fourier
    #[arg(long)]
    pub axis: Option<usize>,
    /// Representation parameter t
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Second model parameter of the sl2r4 models
    #[arg(long = "s-param", allow_negative_numbers = true)]
    pub s_param: Option<f64>,
    /// "+" or "-"
    #[arg(long)]
    pub sign: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// GridFunction JSON holding g
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub j: Option<usize>,
    #[arg(long)]
    pub i: Option<usize>,
    /// Twist parameter; selects the twisted equation
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Map step; selects the map equation
    #[arg(long = "L")]
    pub l: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub j: Option<usize>,
    #[arg(long)]
    pub i: Option<usize>,
    #[arg(long)]
    pub sign: Option<String>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long)]
    pub sigma: Option<usize>,
    /// twist or map
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long = "L")]
    pub l: Option<f64>,
    /// Comma-separated t values
    #[arg(long, value_delimiter = ',')]
    pub schedule: Option<Vec<f64>>,
    #[arg(long)]
    pub beta: Option<u32>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Tame direction, e.g. u3,1
    #[arg(long)]
    pub direction: Option<String>,
    #[arg(long = "s-max")]
    pub s_max: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct ObstructionArgs {
    /// Defaults to 3
    #[arg(long)]
    pub n: Option<usize>,
    /// 1 (same row) or 2 (same column); defaults to 1
    #[arg(long)]
    pub case: Option<u32>,
    /// Comma-separated indices i_k ≥ 3; defaults to 3..=n
    #[arg(long, value_delimiter = ',')]
    pub indices: Option<Vec<usize>>,
}

#[derive(Args, Debug, Clone)]
pub struct RootsArgs {
    /// Defaults to 3
    #[arg(long)]
    pub n: Option<usize>,
    /// Root as "i,j" for e_i − e_j; every root when absent
    #[arg(long)]
    pub phi: Option<String>,
}
