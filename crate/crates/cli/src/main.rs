//! Batch entry point: ingest conversation data, sample snapshots, and run
//! the activity, wiener and hijack analyses to plot-ready files.

mod artifacts;
mod grouping;
mod pipeline;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use convograph::hijack::Scenario;
use convograph::sampler::SamplingPolicy;
use convograph::synth::Topology;

use pipeline::{AnalysisConfig, AnalysisKind, CliError, InputFormat, SynthConfig, SynthKind};

#[derive(Parser)]
#[command(
    name = "convograph",
    version,
    about = "Temporal conversation-graph analytics: activity fits, wiener series, hashtag takeovers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and assemble conversations, reporting sizes and drops
    Ingest(IoArgs),
    /// Aggregate completion curve and saturation fit
    Activity(IoArgs),
    /// Wiener index series per conversation plus a box-plot summary
    Wiener(IoArgs),
    /// Hashtag takeover classification and timing histogram
    Hijack(IoArgs),
    /// Generate a synthetic corpus in the canonical flat format
    Synth(SynthArgs),
    /// Run every analysis over one input
    All(IoArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Canonical,
    TwitterV2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ScenarioArg {
    Hijacking,
    FailedHijacking,
    NoHijacking,
    Mixed,
}

fn parse_policy(s: &str) -> Result<SamplingPolicy, String> {
    s.parse::<SamplingPolicy>().map_err(|e| e.to_string())
}

fn parse_topology(s: &str) -> Result<Topology, String> {
    s.parse::<Topology>().map_err(|e| e.to_string())
}

#[derive(Args)]
struct IoArgs {
    /// Input file(s) of line-delimited records
    #[arg(long, required = true, num_args = 1.., env = "CONVOGRAPH_INPUT")]
    input: Vec<PathBuf>,

    /// Input record format
    #[arg(long, value_enum, default_value_t = FormatArg::Canonical, env = "CONVOGRAPH_FORMAT")]
    format: FormatArg,

    /// Snapshot sampling policy: volume:K or time:DUR (e.g. time:6h)
    #[arg(long, value_parser = parse_policy, default_value = "volume:5", env = "CONVOGRAPH_SAMPLE")]
    sample: SamplingPolicy,

    /// Minimum posts per retained conversation
    #[arg(long, default_value_t = 50, env = "CONVOGRAPH_MIN_SIZE")]
    min_size: usize,

    /// Minimum hashtag usages for hijack eligibility
    #[arg(long, default_value_t = 5, env = "CONVOGRAPH_MIN_USE")]
    min_use: usize,

    /// Completion-rate bins for histograms and summaries
    #[arg(long, default_value_t = 20, env = "CONVOGRAPH_BINS")]
    bins: usize,

    /// Completion-rate grid step for the activity curve
    #[arg(long, default_value_t = 1e-5, env = "CONVOGRAPH_RESOLUTION")]
    resolution: f64,

    /// Output directory for artifacts
    #[arg(long, default_value = "out", env = "CONVOGRAPH_OUT")]
    out: PathBuf,

    /// Seed echoed into the manifest for reproducible pipelines
    #[arg(long, default_value_t = 0, env = "CONVOGRAPH_SEED")]
    seed: u64,

    /// Worker threads for per-conversation analyses (0 = all cores)
    #[arg(long, default_value_t = 0, env = "CONVOGRAPH_JOBS")]
    jobs: usize,

    /// Records buffered in memory before grouping spills to disk
    #[arg(long, default_value_t = 1_000_000, env = "CONVOGRAPH_MEMORY_CAP")]
    memory_cap: usize,
}

#[derive(Args)]
struct SynthArgs {
    /// Conversations to generate
    #[arg(long, default_value_t = 100, env = "CONVOGRAPH_CONVS")]
    convs: usize,

    /// Posts per conversation
    #[arg(long, default_value_t = 100, env = "CONVOGRAPH_POSTS")]
    posts: usize,

    /// Saturation rate driving the timestamps
    #[arg(long, default_value_t = 32.5, env = "CONVOGRAPH_ALPHA")]
    alpha: f64,

    /// Reply topology: star|path|uniform|recency:BIAS
    #[arg(long, value_parser = parse_topology, default_value = "uniform", env = "CONVOGRAPH_TOPOLOGY")]
    topology: Topology,

    /// Script hijack scenarios instead of plain topology corpora
    #[arg(long, value_enum, env = "CONVOGRAPH_SCENARIO")]
    scenario: Option<ScenarioArg>,

    /// Output directory for artifacts
    #[arg(long, default_value = "out", env = "CONVOGRAPH_OUT")]
    out: PathBuf,

    /// Base RNG seed; conversation i uses seed + i
    #[arg(long, default_value_t = 0, env = "CONVOGRAPH_SEED")]
    seed: u64,
}

impl IoArgs {
    fn into_config(self) -> AnalysisConfig {
        AnalysisConfig {
            inputs: self.input,
            format: match self.format {
                FormatArg::Canonical => InputFormat::Canonical,
                FormatArg::TwitterV2 => InputFormat::TwitterV2,
            },
            policy: self.sample,
            min_size: self.min_size,
            min_use: self.min_use,
            bins: self.bins,
            resolution: self.resolution,
            out: self.out,
            seed: self.seed,
            jobs: self.jobs,
            memory_cap: self.memory_cap,
        }
    }
}

impl SynthArgs {
    fn into_config(self) -> SynthConfig {
        let kind = match self.scenario {
            None => SynthKind::Plain(self.topology),
            Some(ScenarioArg::Mixed) => SynthKind::Mixed,
            Some(ScenarioArg::Hijacking) => SynthKind::Scenario(Scenario::Hijacking),
            Some(ScenarioArg::FailedHijacking) => SynthKind::Scenario(Scenario::FailedHijacking),
            Some(ScenarioArg::NoHijacking) => SynthKind::Scenario(Scenario::NoHijacking),
        };
        SynthConfig {
            convs: self.convs,
            posts: self.posts,
            alpha: self.alpha,
            kind,
            out: self.out,
            seed: self.seed,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let result: Result<(), CliError> = match cli.command {
        Command::Ingest(args) => pipeline::run_analysis(AnalysisKind::Ingest, &args.into_config()),
        Command::Activity(args) => {
            pipeline::run_analysis(AnalysisKind::Activity, &args.into_config())
        }
        Command::Wiener(args) => pipeline::run_analysis(AnalysisKind::Wiener, &args.into_config()),
        Command::Hijack(args) => pipeline::run_analysis(AnalysisKind::Hijack, &args.into_config()),
        Command::All(args) => pipeline::run_analysis(AnalysisKind::All, &args.into_config()),
        Command::Synth(args) => pipeline::run_synth(&args.into_config()),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
