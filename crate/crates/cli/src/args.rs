use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ncvem_core::assembly::SolverChoice;

#[derive(Debug, Parser)]
#[command(
    name = "ncvem",
    version,
    about = "Nonconforming virtual element solver for the Poisson problem"
)]
pub struct Cli {
    /// Print machine-readable JSON on standard output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for element-level parallelism (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for random mesh generators and randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write zero wall-clock times so outputs are byte-reproducible.
    #[arg(long, global = true)]
    pub no_timing: bool,
    /// Accept orders above the default caps (4 in 2D, 3 in 3D).
    #[arg(long, global = true)]
    pub allow_high_order: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate or check meshes.
    #[command(subcommand)]
    Mesh(MeshCommand),
    /// Solve a manufactured problem and write the solution.
    Solve(SolveArgs),
    /// Run a convergence study over several resolutions.
    Converge(ConvergeArgs),
    /// Check that polynomial solutions of degree ≤ k are reproduced.
    PatchTest(PatchTestArgs),
    /// Randomized checks of the virtual element / mimetic stabilization equivalence.
    MfdCheck(MfdCheckArgs),
    /// Dump the local matrices of one cell.
    ElementDump(ElementDumpArgs),
}

#[derive(Debug, Subcommand)]
pub enum MeshCommand {
    Gen {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        res: usize,
        #[arg(long)]
        out: PathBuf,
    },
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        /// Minimum face-to-cell diameter ratio.
        #[arg(long, default_value_t = 0.1)]
        rho: f64,
    },
}

/// A mesh file or a generator kind and resolution.
#[derive(Debug, Args)]
pub struct MeshSource {
    #[arg(long, conflicts_with = "kind")]
    pub mesh: Option<PathBuf>,
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub res: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SolverArg {
    Auto,
    Dense,
    Cg,
}

impl From<SolverArg> for SolverChoice {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Auto => SolverChoice::Auto,
            SolverArg::Dense => SolverChoice::Dense,
            SolverArg::Cg => SolverChoice::ConjugateGradient,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: MeshSource,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub problem: String,
    #[arg(long, default_value = "vem-identity")]
    pub stab: String,
    #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
    pub solver: SolverArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(long)]
    pub problem: String,
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [4, 8, 16, 32])]
    pub res: Vec<usize>,
    #[arg(long, default_value = "vem-identity")]
    pub stab: String,
    #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
    pub solver: SolverArg,
    /// Allowed deviation of the energy rate.
    #[arg(long)]
    pub energy_tol: Option<f64>,
    /// Allowed deviation of the L² rate.
    #[arg(long)]
    pub l2_tol: Option<f64>,
    /// CSV output; rates go to the same path with a `.json` extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PatchTestArgs {
    #[command(flatten)]
    pub source: MeshSource,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value = "vem-identity")]
    pub stab: String,
    /// Maximum DoF error, scaled by the polynomial's DoF magnitude.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct MfdCheckArgs {
    #[command(flatten)]
    pub source: MeshSource,
    /// Order to test; all orders up to the cap when omitted.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Full per-trial report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ElementDumpArgs {
    #[command(flatten)]
    pub source: MeshSource,
    #[arg(long, default_value_t = 0)]
    pub cell: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value = "vem-identity")]
    pub stab: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
