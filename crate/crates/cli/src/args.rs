use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Cut densities, cut norms and testability experiments on weighted graphs.
///
/// Every parameter flag may instead be given in the `--config` JSON object
/// under its long name (e.g. `{"q": 3, "balance": "c:0.2"}`); flags win.
#[derive(Debug, Parser)]
#[command(name = "cutdens", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// JSON object of parameter defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Master seed; falls back to the config file, then $CUTDENS_SEED, then 0.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// `off` lifts every enumeration size limit.
    #[arg(long, global = true)]
    pub guards: Option<String>,

    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Output format: json or csv.
    #[arg(long, global = true)]
    pub out: Option<String>,

    /// Write to this file instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,

    /// Only validate the parameters and list every problem found.
    #[arg(long, global = true)]
    pub check: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Homomorphism, injective or induced density of a pattern.
    Hom(HomArgs),
    /// Sampling concentration of a graph parameter.
    SampleTest(SampleTestArgs),
    /// Cut-norm of a graph's stepfunction or of a stepfunction graphon.
    Cutnorm(CutnormArgs),
    /// Permutation cut distance of two graphs.
    Cutdist(PairArgs),
    /// Hausdorff distance of the quotient sets of two graphs.
    Hausdorff(HausdorffArgs),
    /// Exact (balanced) minimum cut density.
    Density(DensityArgs),
    /// Ground-state or microcanonical ground-state energy.
    Energy(EnergyArgs),
    /// Continuous relaxation of the balanced minimum cut.
    Qp(QpArgs),
    /// Cut-norm decay of Wigner noise.
    NoiseSweep(NoiseSweepArgs),
    /// Spectral gap and q-variance of noisy blown-up matrices.
    Spectral(SequenceArgs),
    /// Limit graph of a noisy sequence, optionally with convergence rows.
    LimitGraph(SequenceArgs),
    /// The pendant-clique family on which the weighted cut density is not
    /// testable.
    MuDemo(MuDemoArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Hom(_) => "hom",
            Command::SampleTest(_) => "sample-test",
            Command::Cutnorm(_) => "cutnorm",
            Command::Cutdist(_) => "cutdist",
            Command::Hausdorff(_) => "hausdorff",
            Command::Density(_) => "density",
            Command::Energy(_) => "energy",
            Command::Qp(_) => "qp",
            Command::NoiseSweep(_) => "noise-sweep",
            Command::Spectral(_) => "spectral",
            Command::LimitGraph(_) => "limit-graph",
            Command::MuDemo(_) => "mu-demo",
        }
    }
}

#[derive(Debug, Args)]
pub struct HomArgs {
    /// Host graph JSON `{"alpha": [...], "beta": [[...]]}`.
    #[arg(long, alias = "G")]
    pub graph: Option<String>,
    /// Pattern JSON `{"k": 3, "edges": [[0,1], ...]}`.
    #[arg(long)]
    pub pattern: Option<String>,
    /// t, tinj or tind.
    #[arg(long)]
    pub kind: Option<String>,
}

#[derive(Debug, Args)]
pub struct SampleTestArgs {
    #[arg(long, alias = "G")]
    pub graph: Option<String>,
    /// Sample size.
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub reps: Option<String>,
    /// Shorthand for the cut-density parameter: f<q>, mu<q>, or with a `c`
    /// suffix (f2c) the balanced version with `--c`.
    #[arg(long)]
    pub param: Option<String>,
    #[arg(long)]
    pub c: Option<String>,
    /// Cluster count for a cut-density parameter.
    #[arg(long)]
    pub q: Option<String>,
    /// f or mu.
    #[arg(long)]
    pub functional: Option<String>,
    /// none, c:<x> or a:<x,...>.
    #[arg(long)]
    pub balance: Option<String>,
    /// Use a homomorphism density of this pattern instead.
    #[arg(long)]
    pub pattern: Option<String>,
    #[arg(long)]
    pub kind: Option<String>,
}

#[derive(Debug, Args)]
pub struct CutnormArgs {
    #[arg(long, alias = "G")]
    pub graph: Option<String>,
    /// Stepfunction JSON `{"breaks": [...], "values": [[...]]}`.
    #[arg(long)]
    pub graphon: Option<String>,
    /// exact or heuristic.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub restarts: Option<String>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long, alias = "G")]
    pub graph: Option<String>,
    #[arg(long)]
    pub other: Option<String>,
}

#[derive(Debug, Args)]
pub struct HausdorffArgs {
    #[arg(long, alias = "G")]
    pub graph: Option<String>,
    #[arg(long)]
    pub other: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub balance: Option<String>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long, alias = "G")]
    pub graph: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub functional: Option<String>,
    #[arg(long)]
    pub balance: Option<String>,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    #[arg(long, alias = "G")]
    pub graph: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    /// Coupling matrix JSON; defaults to the cut coupling.
    #[arg(long)]
    pub coupling: Option<String>,
    /// Magnetic field, comma separated; defaults to zero.
    #[arg(long)]
    pub field: Option<String>,
    /// Cluster proportions for the microcanonical energy.
    #[arg(long)]
    pub a: Option<String>,
}

#[derive(Debug, Args)]
pub struct QpArgs {
    #[arg(long, alias = "G")]
    pub graph: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub c: Option<String>,
    #[arg(long)]
    pub starts: Option<String>,
    #[arg(long)]
    pub max_iters: Option<String>,
    #[arg(long)]
    pub tol: Option<String>,
    /// Also compute the exact minimum and compare.
    #[arg(long)]
    pub with_exact: bool,
    /// Also check the spectrum of the Kronecker product.
    #[arg(long)]
    pub kron: bool,
}

#[derive(Debug, Args)]
pub struct NoiseSweepArgs {
    /// uniform, rademacher or gaussian:<sigma>.
    #[arg(long)]
    pub noise: Option<String>,
    #[arg(long = "K")]
    pub k: Option<String>,
    #[arg(long)]
    pub ns: Option<String>,
    #[arg(long)]
    pub seeds: Option<String>,
    /// Pattern matrix JSON; when given, `K` is checked against it.
    #[arg(long)]
    pub pattern: Option<String>,
    #[arg(long)]
    pub ratios: Option<String>,
}

#[derive(Debug, Args)]
pub struct SequenceArgs {
    /// Pattern matrix JSON `[[...], ...]`.
    #[arg(long)]
    pub pattern: Option<String>,
    #[arg(long)]
    pub ratios: Option<String>,
    #[arg(long)]
    pub noise: Option<String>,
    #[arg(long = "K")]
    pub k: Option<String>,
    #[arg(long)]
    pub ns: Option<String>,
    /// 0/1 entries with the block probabilities instead of additive noise.
    #[arg(long)]
    pub bernoulli: bool,
}

#[derive(Debug, Args)]
pub struct MuDemoArgs {
    #[arg(long)]
    pub ns: Option<String>,
}
