use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qmcbound_core::analysis::TCoefficient;
use qmcbound_core::rounding::DEFAULT_T;
use qmcbound_core::{EdMethod, Method, Relaxation, ScalingConvention, SubsetPolicy};
use serde::{Deserialize, Serialize};

use crate::instance::Lattice;

#[derive(Debug, Parser)]
#[command(name = "qmcbound", version, about = "Certified lower bounds for Quantum Max Cut and Heisenberg models")]
pub struct Cli {
    /// Print the result JSON on stdout instead of a table.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

/// Everything needed to reproduce one run; written into every result file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub version: String,
    pub command: Command,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Command {
    /// Write a generated instance (.json, otherwise edge list).
    Generate(GenerateArgs),
    /// Solve a relaxation and report its lower bound.
    Solve(SolveArgs),
    /// Exact ground energy by diagonalization.
    Exact(ExactArgs),
    /// Round a Pauli level-1 solution into product/singlet states.
    Round(RoundArgs),
    /// Parameter sweeps: Shastry-Sutherland or Erdős–Rényi ratio studies.
    Sweep(SweepArgs),
    /// Solve the approximation-ratio LP for a threshold t.
    RatioLp(RatioLpArgs),
    /// Run the built-in invariant suites; exits nonzero on any failure.
    Verify(VerifyArgs),
    /// Per-edge relaxation values for plotting.
    Heatmap(HeatmapArgs),
    /// Replay a RunConfig (or a result file carrying one).
    Run(RunArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub lattice: Lattice,
    /// Linear size (square, ss).
    #[arg(long = "L", alias = "l", default_value_t = 4)]
    pub l: usize,
    #[arg(long)]
    pub periodic: bool,
    /// Kagome unit cells along a1.
    #[arg(long, default_value_t = 2)]
    pub cx: usize,
    /// Kagome unit cells along a2.
    #[arg(long, default_value_t = 3)]
    pub cy: usize,
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Seeds the ER sampler and the disorder draw.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Shastry-Sutherland grid coupling.
    #[arg(long, default_value_t = 1.0)]
    pub j: f64,
    /// Shastry-Sutherland diagonal coupling.
    #[arg(long, default_value_t = 1.0)]
    pub jd: f64,
    /// Relative Gaussian weight disorder.
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long, default_value = "ipm")]
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ModelArgs {
    #[arg(long, default_value = "soc")]
    pub relaxation: Relaxation,
    #[arg(long, default_value = "all")]
    pub triples: SubsetPolicy,
    #[arg(long, default_value = "two-edge")]
    pub quads: SubsetPolicy,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SolveArgs {
    /// Instance file or generator spec (e.g. `square:L=4,periodic`).
    pub instance: String,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Scaling used in the printed table; the JSON carries both.
    #[arg(long, default_value = "varbench")]
    pub scaling: ScalingConvention,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ExactArgs {
    pub instance: String,
    #[arg(long, default_value = "lanczos")]
    pub ed_method: EdMethod,
    /// Diagonalize the full space instead of magnetization sectors.
    #[arg(long)]
    pub no_sectors: bool,
    #[arg(long, default_value_t = 1e-9)]
    pub ed_tol: f64,
    #[arg(long, default_value = "varbench")]
    pub scaling: ScalingConvention,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RoundArgs {
    pub instance: String,
    /// Result file from `solve --relaxation soc-p1`; solved inline when absent.
    #[arg(long)]
    pub result: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_T)]
    pub t: f64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value = "varbench")]
    pub scaling: ScalingConvention,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Ss,
    Er,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(value_enum)]
    pub kind: SweepKind,
    /// Shastry-Sutherland linear size.
    #[arg(long = "L", alias = "l", default_value_t = 4)]
    pub l: usize,
    /// Ratio grid `start:stop:step` or a comma list of J/J_D values.
    #[arg(long, default_value = "0.3:0.7:0.02")]
    pub ratios: String,
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    /// Number of disorder seeds (ss) or random instances (er).
    #[arg(long, default_value_t = 1)]
    pub seeds: usize,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Skip the Pauli level-1 solve (ss).
    #[arg(long)]
    pub no_p1: bool,
    /// Skip exact energies (ss).
    #[arg(long)]
    pub no_exact: bool,
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 0.2)]
    pub p: f64,
    /// Relaxation for ER ratios.
    #[arg(long, default_value = "soc")]
    pub relaxation: Relaxation,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// CSV (ss) or JSON (er) output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RatioLpArgs {
    #[arg(long, default_value_t = DEFAULT_T)]
    pub t: f64,
    /// Use the flat beta/4 coefficient for neighbour-of-matching edges.
    #[arg(long)]
    pub flat: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

impl RatioLpArgs {
    pub fn coefficient(&self) -> TCoefficient {
        if self.flat {
            TCoefficient::Flat
        } else {
            TCoefficient::Tight
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    Symmetry,
    Marginals,
    ClosedForms,
    Rounding,
    Sandwich,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Random points per sampled property.
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct HeatmapArgs {
    pub instance: String,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// CSV path; a JSON colour-scale file is written beside it.
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
}
