use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "callpath", version, about = "Call-path extraction over large call graphs")]
pub struct Cli {
    /// Suppress summaries and log output; primary results still go to stdout.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    /// Output format. Commands reject formats they cannot produce.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
    Markdown,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a JSONL call graph and optionally write it back normalized.
    Import(ImportArgs),
    /// Generate a seeded synthetic call graph as JSONL.
    Generate(GenerateArgs),
    /// Convert a graph into a CGS1 store file.
    BuildStore(BuildStoreArgs),
    /// Print forward and backward closure sizes.
    Reach(ReachArgs),
    /// Find a call path between two methods.
    Path(PathArgs),
    /// Run a benchmark scenario file.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct ImportArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("edge_model").required(true).args(["edge_prob", "out_degree"])))]
pub struct GenerateArgs {
    #[arg(long)]
    pub nodes: u32,
    #[arg(long)]
    pub edge_prob: Option<f64>,
    #[arg(long)]
    pub out_degree: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub hubs: u32,
    #[arg(long, default_value_t = 1)]
    pub hub_indegree: u32,
    #[arg(long, default_value = "interface")]
    pub hub_kind: String,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub acyclic: bool,
    /// Defaults to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BuildStoreArgs {
    /// JSONL graph or existing store.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("endpoints").required(true).multiple(true).args(["node", "from", "to"])))]
pub struct ReachArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Report both closures of one node.
    #[arg(long, conflicts_with_all = ["from", "to"])]
    pub node: Option<String>,
    /// Initial node of a pair; classify together with --to.
    #[arg(long, requires = "to")]
    pub from: Option<String>,
    #[arg(long, requires = "from")]
    pub to: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Uni,
    Balanced,
    Postpone,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FrontierArg {
    #[value(alias = "paper")]
    Larger,
    Smaller,
}

#[derive(Args, Debug)]
pub struct PathArgs {
    /// JSONL graph or CGS1 store; detected by content.
    #[arg(long)]
    pub graph: PathBuf,
    /// `Class.method` name or numeric node id.
    #[arg(long)]
    pub from: String,
    #[arg(long)]
    pub to: String,
    #[arg(long, value_enum, default_value = "postpone")]
    pub algo: AlgoArg,
    /// Backward rounds a postponed node is held (postpone only; default 3).
    #[arg(long)]
    pub delay: Option<u32>,
    /// Probe class kinds without postponing (postpone only).
    #[arg(long)]
    pub probe_only: bool,
    #[arg(long, value_enum)]
    pub frontier: Option<FrontierArg>,
    /// Comma-separated class kinds that trigger postponement (postpone only).
    #[arg(long)]
    pub postpone_kinds: Option<String>,
    /// Print the step-indexed event log.
    #[arg(long)]
    pub trace: bool,
    /// Store cache capacity in nodes.
    #[arg(long)]
    pub cache_size: Option<usize>,
    /// Injected latency per store cache miss, in microseconds.
    #[arg(long)]
    pub latency_us: Option<u64>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Report file; format follows --format or the extension, else CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run cells concurrently; timing columns are left empty.
    #[arg(long)]
    pub parallel: bool,
}
