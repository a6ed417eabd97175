//! `infocov`: seed selection, evaluation, graph generation and benchmarks for
//! information coverage maximization.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "INFOCOV_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "infocov",
    version,
    about = "Information coverage maximization under IC and LT diffusion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Select seeds with one or more algorithms for each budget k.
    Select(SelectArgs),
    /// Estimate the coverage of a given seed set.
    Evaluate(EvaluateArgs),
    /// Write a synthetic or fixture graph as an edge list.
    Generate(GenerateArgs),
    /// Select, then evaluate every selection on held-out replications.
    Benchmark(BenchmarkArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Ic,
    Lt,
}

impl From<ModelArg> for infocov::Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Ic => infocov::Model::Ic,
            ModelArg::Lt => infocov::Model::Lt,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    LazyGreedy,
    PlainGreedy,
    EffectiveDegree,
    OutDegree,
    Random,
    Exhaustive,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::LazyGreedy => "lazy-greedy",
            Algorithm::PlainGreedy => "plain-greedy",
            Algorithm::EffectiveDegree => "effective-degree",
            Algorithm::OutDegree => "out-degree",
            Algorithm::Random => "random",
            Algorithm::Exhaustive => "exhaustive",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum EvaluatorArg {
    /// Monte Carlo with --replications cascades.
    Mc,
    /// Exhaustive live-arc enumeration (small graphs only).
    Exact,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum GeneratorKind {
    ErdosRenyi,
    ScaleFree,
    Fixture,
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// Edge-list file: `src dst [ic_prob [lt_weight]]` per line.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value = "ic")]
    pub model: ModelArg,
    /// Parameter scheme applied after loading: uniform:<p>, trivalency[:<seed>] or wc.
    /// Plain `trivalency` draws with --seed.
    #[arg(long)]
    pub weights: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct EstimatorArgs {
    /// Weight of informed nodes, in [0, 1].
    #[arg(long = "lambda", default_value_t = 1.0)]
    pub lambda: f64,
    /// Monte Carlo replications per estimate.
    #[arg(long, default_value_t = infocov::coverage::DEFAULT_REPLICATIONS)]
    pub replications: usize,
    /// Master seed. Held-out evaluation uses seed + 1.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct SelectArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    /// Comma-separated list of algorithms.
    #[arg(long = "algo", value_enum, value_delimiter = ',', required = true)]
    pub algorithms: Vec<Algorithm>,
    /// Comma-separated list of budgets.
    #[arg(long = "k", value_delimiter = ',', required = true)]
    pub k: Vec<usize>,
    /// Objective used inside the greedy selectors and for reported values.
    #[arg(long, value_enum, default_value = "mc")]
    pub evaluator: EvaluatorArg,
    /// Add wall-clock columns. Output is then no longer reproducible byte for byte.
    #[arg(long)]
    pub timings: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct BenchmarkArgs {
    #[command(flatten)]
    pub select: SelectArgs,
    /// JSON summary with configuration echo, graph hash and all rows.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    /// File of whitespace-separated node labels.
    #[arg(long)]
    pub seeds: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: GeneratorKind,
    /// Node count (erdos-renyi, scale-free).
    #[arg(long)]
    pub n: Option<usize>,
    /// Edge probability (erdos-renyi).
    #[arg(long)]
    pub p: Option<f64>,
    /// Initial nodes and edges per new node (scale-free).
    #[arg(long)]
    pub m0: Option<usize>,
    /// Fixture name (fixture).
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let threads: usize = value
            .parse()
            .map_err(|_| anyhow::anyhow!("{THREADS_ENV}: `{value}` is not a thread count"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Select(args) => commands::select(&args),
        Command::Evaluate(args) => commands::evaluate(&args),
        Command::Generate(args) => commands::generate(&args),
        Command::Benchmark(args) => commands::benchmark(&args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let text = e.to_string();
            eprintln!(
                "{}",
                text.lines().next().unwrap_or("error: invalid arguments")
            );
            return ExitCode::from(2);
        }
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
