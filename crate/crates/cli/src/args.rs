//! Command-line flags. Every flag is optional so that unset flags fall back to
//! the config file and then to the command's defaults.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use complexity_lab::ensembles::{ArchKind, Normalization};
use serde::Serialize;

use crate::config::{parse_count, parse_serde};

#[derive(Parser, Debug)]
#[command(
    name = "complexity-lab",
    version,
    about = "Random quantum circuits, Haar geometry and brute-force circuit complexity",
    arg_required_else_help = true
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Args, Debug, Default)]
pub struct GlobalArgs {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed from which every random stream is derived.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for the manifest and result files [default: out].
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Suppress the human-readable summary.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Monte Carlo ball volumes against exact laws and Szarek bounds.
    Vol(VolArgs),
    /// Spectral gaps of design Hamiltonians.
    Gap(GapArgs),
    /// A single random-walk trace with optional complexity columns.
    Walk(WalkArgs),
    /// Brute-force ε-complexity of random targets.
    Complexity(ComplexityArgs),
    /// Recurrence times, conditional recurrence profile or saturation scan.
    Recur(RecurArgs),
    /// Equidistribution certificate for a walk at fixed depth.
    EquidCert(EquidArgs),
    /// Maximal-inequality test for stochastic local Hamiltonians.
    SlhStability(SlhArgs),
    /// Closed-form bound calculators.
    Bounds(BoundsArgs),
    /// Re-run a saved configuration or manifest.
    Run {
        /// Path to a run configuration (for example a manifest.json).
        path: PathBuf,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Vol(_) => "vol",
            Command::Gap(_) => "gap",
            Command::Walk(_) => "walk",
            Command::Complexity(_) => "complexity",
            Command::Recur(_) => "recur",
            Command::EquidCert(_) => "equid-cert",
            Command::SlhStability(_) => "slh-stability",
            Command::Bounds(_) => "bounds",
            Command::Run { .. } => "run",
        }
    }
}

#[derive(Args, Serialize, Debug, Default, Clone)]
pub struct ArchArgs {
    /// rqc1d, grqc_haar, grqc_gateset, slh or haar.
    #[arg(long, value_parser = parse_serde::<ArchKind>)]
    pub kind: Option<ArchKind>,
    /// Number of sites.
    #[arg(long)]
    pub n: Option<usize>,
    /// Local dimension.
    #[arg(long)]
    pub q: Option<usize>,
    /// chain, cycle, complete or star.
    #[arg(long)]
    pub graph: Option<String>,
    /// Built-in gateset name or path to a gateset file.
    #[arg(long)]
    pub gateset: Option<String>,
    /// SLH time step.
    #[arg(long)]
    pub dt: Option<f64>,
    /// SLH basis normalization: casimir_unit or killing2q2.
    #[arg(long, value_parser = parse_serde::<Normalization>)]
    pub normalization: Option<Normalization>,
}

#[derive(Args, Serialize, Debug, Default)]
pub struct VolArgs {
    /// state or unitary.
    #[arg(long)]
    pub space: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub d: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_count)]
    pub samples: Option<usize>,
}

#[derive(Args, Serialize, Debug, Default)]
pub struct GapArgs {
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    /// chain, cycle, complete or star.
    #[arg(long)]
    pub graph: Option<String>,
}

#[derive(Args, Serialize, Debug, Default)]
pub struct WalkArgs {
    #[command(flatten)]
    pub arch: ArchArgs,
    #[arg(long, value_parser = parse_count)]
    pub t_max: Option<usize>,
    /// Complexity columns to add (gateset walks only).
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Search depth for the complexity columns.
    #[arg(long)]
    pub depth: Option<usize>,
}

#[derive(Args, Serialize, Debug, Default)]
pub struct ComplexityArgs {
    #[arg(long)]
    pub gateset: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub graph: Option<String>,
    /// unitary or state.
    #[arg(long)]
    pub space: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    #[arg(long)]
    pub r_max: Option<usize>,
    /// exact or net.
    #[arg(long)]
    pub mode: Option<String>,
    /// Net radius for `--mode net`.
    #[arg(long)]
    pub net_radius: Option<f64>,
    /// Number of Haar-random targets.
    #[arg(long, value_parser = parse_count)]
    pub targets: Option<usize>,
}

#[derive(Args, Serialize, Debug, Default)]
pub struct RecurrenceArgs {
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub r1: Option<u32>,
    #[arg(long)]
    pub r2: Option<u32>,
    #[arg(long, value_parser = parse_count)]
    pub t_max: Option<usize>,
    #[arg(long = "realizations", value_parser = parse_count)]
    #[serde(rename = "n_realizations")]
    pub n_realizations: Option<usize>,
    #[arg(long)]
    pub tau_block: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub delta1: Option<f64>,
    #[arg(long)]
    pub delta2: Option<f64>,
    #[arg(long, value_parser = parse_count)]
    pub volume_samples: Option<usize>,
}

#[derive(Args, Serialize, Debug, Default)]
pub struct RecurArgs {
    #[command(flatten)]
    pub arch: ArchArgs,
    #[command(flatten)]
    #[serde(rename = "recurrence")]
    pub recurrence: RecurrenceArgs,
    /// times, conditional or saturation.
    #[arg(long)]
    pub experiment: Option<String>,
    /// Complexity search depth; 0 classifies by distance to the identity only.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Set the block length to the first doubling depth with a unitary
    /// equidistribution certificate.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub certify_tau: Option<bool>,
    /// Walk samples per certification attempt.
    #[arg(long, value_parser = parse_count)]
    pub certify_samples: Option<usize>,
    /// Haar centers per certification attempt.
    #[arg(long)]
    pub certify_centers: Option<usize>,
    /// Conditioning time for the conditional profile.
    #[arg(long)]
    pub t: Option<usize>,
    /// Offsets T of the conditional profile.
    #[arg(long, value_delimiter = ',')]
    pub t_grid: Option<Vec<usize>>,
    #[arg(long)]
    pub r_large: Option<u32>,
    /// Complexity thresholds of the saturation scan.
    #[arg(long, value_delimiter = ',')]
    pub rs: Option<Vec<u32>>,
    /// Window lengths K of the saturation scan.
    #[arg(long, value_delimiter = ',')]
    pub ks: Option<Vec<usize>>,
    /// First time of the saturation window.
    #[arg(long)]
    pub start: Option<usize>,
}

#[derive(Args, Serialize, Debug, Default)]
pub struct EquidArgs {
    #[command(flatten)]
    pub arch: ArchArgs,
    /// unitary or state.
    #[arg(long)]
    pub space: Option<String>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub centers: Option<usize>,
    #[arg(long, value_parser = parse_count)]
    pub samples: Option<usize>,
}

#[derive(Args, Serialize, Debug, Default)]
pub struct SlhArgs {
    #[command(flatten)]
    pub arch: ArchArgs,
    /// Time horizon.
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub x: Option<Vec<f64>>,
    #[arg(long = "realizations", value_parser = parse_count)]
    #[serde(rename = "realizations")]
    pub realizations: Option<usize>,
    /// Also fit the trace decay rate with this many realizations.
    #[arg(long, value_parser = parse_count)]
    pub drift_realizations: Option<usize>,
}

#[derive(Args, Serialize, Debug, Default)]
pub struct BoundInputArgs {
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub gateset_size: Option<f64>,
    #[arg(long)]
    pub c_g: Option<f64>,
    #[arg(long)]
    pub gamma_sk: Option<f64>,
    #[arg(long)]
    pub a_sk: Option<f64>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub big_delta: Option<f64>,
    #[arg(long)]
    pub delta1: Option<f64>,
    #[arg(long)]
    pub delta2: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub r1: Option<f64>,
    #[arg(long)]
    pub r2: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub tau_s: Option<f64>,
    #[arg(long)]
    pub tau_slh: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
}

#[derive(Args, Serialize, Debug, Default)]
pub struct BoundsArgs {
    /// Formula name, or `all`.
    #[arg(long)]
    pub formula: Option<String>,
    #[command(flatten)]
    #[serde(rename = "inputs")]
    pub inputs: BoundInputArgs,
}
