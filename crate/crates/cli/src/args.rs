use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Real-valued flags also accept `2^-k` and `a/b`.
fn real(s: &str) -> Result<f64, String> {
    crate::config::parse_real(s).map_err(|_| format!("not a number: {s:?}"))
}

/// Mated-CRT map simulator.
///
/// Every numeric flag may also be given in a `key = value` file passed with
/// `--config`; flags win over the file, the file wins over built-in defaults.
#[derive(Debug, Parser)]
#[command(name = "mcrt", version)]
pub struct Cli {
    /// Configuration file of `key = value` lines (TOML syntax).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a Brownian pair or a lattice walk and save it.
    Sample(SampleArgs),
    /// Build the map of a window and write its edge list.
    Build(BuildArgs),
    /// Potential theory on a map: resistance, Green's function, harmonic extension.
    Solve(SolveArgs),
    /// Tutte-embed a map with its outer face on the unit circle.
    Embed(EmbedArgs),
    /// Simple random walk estimates.
    Walk(WalkArgs),
    /// Run a scaling experiment and write its report.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PathArgs {
    /// LQG parameter in (0, 2) [default: √2].
    #[arg(long, value_parser = real)]
    pub gamma: Option<f64>,
    /// Time horizon T [default: 1, or 1024 steps for lattice walks].
    #[arg(long, value_parser = real)]
    pub horizon: Option<f64>,
    /// Grid step [default: ε/64, or 1 for lattice walks].
    #[arg(long, value_parser = real)]
    pub mesh: Option<f64>,
    /// Master seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// `brownian` or `lattice` [default: brownian].
    #[arg(long)]
    pub kind: Option<String>,
}

/// Where a command gets its map from: a saved edge list, a saved path, or a fresh sample.
#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    /// Edge-list CSV written by `build`.
    #[arg(long, value_name = "FILE", conflicts_with = "path")]
    pub graph: Option<PathBuf>,
    /// Path file written by `sample` (`.bin` or CSV).
    #[arg(long, value_name = "FILE")]
    pub path: Option<PathBuf>,
    /// Cell size ε [default: 1/64, or 1 for lattice walks].
    #[arg(long, value_parser = real)]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    pub sample: PathArgs,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub sample: PathArgs,
    /// Output file; `.bin` selects the binary format, anything else CSV.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Edge-list CSV output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// JSON summary output [default: stdout].
    #[arg(long, value_name = "FILE")]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// `resistance`, `green` or `harmonic` [default: resistance].
    #[arg(long)]
    pub task: Option<String>,
    /// Source vertex, 1-based [default: the central interior vertex].
    #[arg(long)]
    pub source: Option<usize>,
    /// Boundary data CSV (`vertex,value`, 1-based) for `harmonic`.
    #[arg(long, value_name = "FILE")]
    pub boundary_values: Option<PathBuf>,
    /// Test function sampled at the embedded boundary for `harmonic` when no
    /// boundary file is given [default: re-z].
    #[arg(long)]
    pub function: Option<String>,
    /// Mean-value residual bound [default: 1e-9].
    #[arg(long, value_parser = real)]
    pub tolerance: Option<f64>,
    /// Output file (JSON, or CSV for `harmonic`) [default: stdout].
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Mean-value residual bound [default: 1e-9].
    #[arg(long, value_parser = real)]
    pub tolerance: Option<f64>,
    /// Coordinates CSV output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// SVG drawing of the embedded map.
    #[arg(long, value_name = "FILE")]
    pub svg: Option<PathBuf>,
    /// JSON summary output [default: stdout].
    #[arg(long, value_name = "FILE")]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WalkArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// `hitting`, `exit` or `return` [default: exit].
    #[arg(long)]
    pub mode: Option<String>,
    /// Start vertex, 1-based [default: the central interior vertex].
    #[arg(long)]
    pub start: Option<usize>,
    /// Target vertices for `hitting`, comma separated, 1-based.
    #[arg(long, value_delimiter = ',')]
    pub target: Option<Vec<usize>>,
    /// Number of walks [default: 1000].
    #[arg(long)]
    pub trials: Option<usize>,
    /// Seed for the walks [default: the map seed].
    #[arg(long)]
    pub walk_seed: Option<u64>,
    /// Step budget per walk [default: 10^7].
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Walk length for `return` [default: 100].
    #[arg(long)]
    pub steps: Option<usize>,
    /// `exact` or `monte-carlo` for `return` [default: exact].
    #[arg(long)]
    pub method: Option<String>,
    /// Estimate JSON output [default: stdout].
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Per-trial CSV log (`hitting` only).
    #[arg(long, value_name = "FILE")]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// degree-tail, green-growth, max-edge, energy, holder or mesh-refinement.
    pub name: String,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Cells per window (degree-tail).
    #[arg(long)]
    pub window: Option<usize>,
    /// Window sizes in cells, comma separated (green-growth).
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Cell sizes, comma separated; `2^-k` is accepted.
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<String>>,
    /// Cell size (mesh-refinement).
    #[arg(long, value_parser = real)]
    pub epsilon: Option<f64>,
    /// Grid steps per cell at each level, comma separated (mesh-refinement).
    #[arg(long, value_delimiter = ',')]
    pub mesh_factors: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Sampled vertex pairs per window (holder).
    #[arg(long)]
    pub pairs: Option<usize>,
    /// Hölder exponent of the boundary data (holder).
    #[arg(long, value_parser = real)]
    pub chi: Option<f64>,
    /// Test function (energy).
    #[arg(long)]
    pub function: Option<String>,
    #[arg(long, value_parser = real)]
    pub gamma: Option<f64>,
    #[arg(long, value_parser = real)]
    pub horizon: Option<f64>,
    /// `brownian` or `lattice` (mesh-refinement).
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report JSON output [default: stdout].
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Flat CSV table of the report rows.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    /// Log-log SVG plot of the main series.
    #[arg(long, value_name = "FILE")]
    pub svg: Option<PathBuf>,
}
