//! Subcommand orchestration: ingest -> sample -> analyses, with a run
//! manifest written for every invocation.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use convograph::activity::{aggregate_curve, fit_saturation};
use convograph::hijack::{classify, takeover_histogram, HijackReport, Scenario};
use convograph::ingest::{
    assemble, parse_canonical_line, parse_twitter_v2_line, AssembleStats, Conversation, RawPost,
};
use convograph::sampler::{sample, SamplingPolicy};
use convograph::synth::{gen_hijack_scenario_posts, generate_posts, SynthSpec, Topology};
use convograph::wiener::{temporal_wiener, WienerSeries};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::artifacts;
use crate::grouping::StreamingGrouper;

/// Failure with the exit status it maps to: 2 usage, 3 input, 4 empty
/// result, 5 internal invariant.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(anyhow::Error),
    Empty(String),
    Internal(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Empty(_) => 4,
            CliError::Internal(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Input(err) => write!(f, "{err:#}"),
            CliError::Empty(msg) => write!(f, "{msg}"),
            CliError::Internal(err) => write!(f, "{err:#}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalysisKind {
    Ingest,
    Activity,
    Wiener,
    Hijack,
    All,
}

impl AnalysisKind {
    fn name(self) -> &'static str {
        match self {
            AnalysisKind::Ingest => "ingest",
            AnalysisKind::Activity => "activity",
            AnalysisKind::Wiener => "wiener",
            AnalysisKind::Hijack => "hijack",
            AnalysisKind::All => "all",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    Canonical,
    TwitterV2,
}

impl InputFormat {
    fn name(self) -> &'static str {
        match self {
            InputFormat::Canonical => "canonical",
            InputFormat::TwitterV2 => "twitter-v2",
        }
    }
}

/// Validated settings for the analysis subcommands.
pub struct AnalysisConfig {
    pub inputs: Vec<PathBuf>,
    pub format: InputFormat,
    pub policy: SamplingPolicy,
    pub min_size: usize,
    pub min_use: usize,
    pub bins: usize,
    pub resolution: f64,
    pub out: PathBuf,
    pub seed: u64,
    pub jobs: usize,
    pub memory_cap: usize,
}

#[derive(Default, Serialize)]
struct Counts {
    input_records: usize,
    parse_errors: usize,
    spilled_runs: usize,
    assemble: AssembleStats,
    conversations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    wiener_series: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wiener_skipped: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scenarios: Option<ScenarioCounts>,
}

#[derive(Default, Serialize)]
struct ScenarioCounts {
    eligible: usize,
    hijacking: usize,
    failed_hijacking: usize,
    no_hijacking: usize,
    ineligible: usize,
}

#[derive(Serialize)]
struct Manifest {
    config: serde_json::Value,
    counts: serde_json::Value,
    timings_ms: BTreeMap<&'static str, u64>,
}

struct Timings {
    start: Instant,
    marks: BTreeMap<&'static str, u64>,
    last: Instant,
}

impl Timings {
    fn new() -> Self {
        let now = Instant::now();
        Timings {
            start: now,
            marks: BTreeMap::new(),
            last: now,
        }
    }

    fn mark(&mut self, name: &'static str) {
        let now = Instant::now();
        self.marks
            .insert(name, now.duration_since(self.last).as_millis() as u64);
        self.last = now;
    }

    fn finish(mut self) -> BTreeMap<&'static str, u64> {
        self.marks.insert(
            "total",
            Instant::now().duration_since(self.start).as_millis() as u64,
        );
        self.marks
    }
}

fn ensure_out_dir(out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out)
        .with_context(|| format!("creating output directory `{}`", out.display()))
        .map_err(CliError::Input)
}

fn configure_jobs(jobs: usize) {
    if jobs > 0 {
        // Ignore the error if a pool already exists (tests, repeated calls).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
}

/// Run one analysis subcommand end to end.
pub fn run_analysis(kind: AnalysisKind, config: &AnalysisConfig) -> Result<(), CliError> {
    if config.bins == 0 {
        return Err(CliError::Usage("--bins must be at least 1".to_string()));
    }
    if !(config.resolution > 0.0 && config.resolution <= 1.0) {
        return Err(CliError::Usage(
            "--resolution must lie in (0, 1]".to_string(),
        ));
    }
    if config.min_size == 0 {
        return Err(CliError::Usage("--min-size must be at least 1".to_string()));
    }
    configure_jobs(config.jobs);
    ensure_out_dir(&config.out)?;

    let mut timings = Timings::new();
    let mut counts = Counts::default();

    let (conversations, stats) = load_conversations(config, &mut counts)?;
    counts.assemble = stats;
    counts.conversations = conversations.len();
    timings.mark("ingest");

    if matches!(kind, AnalysisKind::Ingest | AnalysisKind::All) {
        artifacts::write_conversations_csv(&config.out.join("conversations.csv"), &conversations)
            .map_err(CliError::Input)?;
    }

    // Stage failures are held back so the manifest always lands.
    let outcome = if conversations.is_empty() {
        Err(CliError::Empty(
            "no conversations survived the filters".to_string(),
        ))
    } else {
        run_stages(kind, config, &conversations, &mut counts, &mut timings)
    };

    let manifest = Manifest {
        config: analysis_config_json(kind, config),
        counts: serde_json::to_value(&counts).expect("counts serialize"),
        timings_ms: timings.finish(),
    };
    artifacts::write_json_pretty(&config.out.join("run_manifest.json"), &manifest)
        .map_err(CliError::Input)?;
    outcome
}

fn run_stages(
    kind: AnalysisKind,
    config: &AnalysisConfig,
    conversations: &[Conversation],
    counts: &mut Counts,
    timings: &mut Timings,
) -> Result<(), CliError> {
    let mut empty: Option<String> = None;
    if matches!(kind, AnalysisKind::Activity | AnalysisKind::All) {
        match run_activity_stage(config, conversations) {
            Ok(()) => {}
            // A corpus of zero-duration conversations has no completion
            // curves; the other analyses still apply under `all`.
            Err(CliError::Empty(msg)) if kind == AnalysisKind::All => empty = Some(msg),
            Err(err) => return Err(err),
        }
        timings.mark("activity");
    }
    if matches!(kind, AnalysisKind::Wiener | AnalysisKind::All) {
        let (written, skipped) = run_wiener_stage(config, conversations)?;
        counts.wiener_series = Some(written);
        counts.wiener_skipped = Some(skipped);
        timings.mark("wiener");
        if written == 0 {
            empty = Some("no conversation produced a wiener series".to_string());
        }
    }
    if matches!(kind, AnalysisKind::Hijack | AnalysisKind::All) {
        counts.scenarios = Some(run_hijack_stage(config, conversations)?);
        timings.mark("hijack");
    }
    match empty {
        Some(msg) => Err(CliError::Empty(msg)),
        None => Ok(()),
    }
}

fn analysis_config_json(kind: AnalysisKind, config: &AnalysisConfig) -> serde_json::Value {
    json!({
        "subcommand": kind.name(),
        "inputs": config.inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "format": config.format.name(),
        "sample": config.policy.to_string(),
        "min_size": config.min_size,
        "min_use": config.min_use,
        "bins": config.bins,
        "resolution": config.resolution,
        "out": config.out.display().to_string(),
        "seed": config.seed,
        "jobs": config.jobs,
        "memory_cap": config.memory_cap,
    })
}

/// Stream every input line through the capped grouper, then assemble each
/// conversation group.
fn load_conversations(
    config: &AnalysisConfig,
    counts: &mut Counts,
) -> Result<(Vec<Conversation>, AssembleStats), CliError> {
    let parse_line = match config.format {
        InputFormat::Canonical => parse_canonical_line,
        InputFormat::TwitterV2 => parse_twitter_v2_line,
    };
    let mut grouper = StreamingGrouper::new(config.memory_cap);
    let mut shown_errors = 0usize;
    for input in &config.inputs {
        let file = File::open(input)
            .with_context(|| format!("opening input `{}`", input.display()))
            .map_err(CliError::Input)?;
        let reader = BufReader::new(file);
        for (idx, line) in reader.lines().enumerate() {
            let line = line
                .with_context(|| format!("reading `{}`", input.display()))
                .map_err(CliError::Input)?;
            if line.trim().is_empty() {
                continue;
            }
            match parse_line(&line) {
                Ok(post) => {
                    counts.input_records += 1;
                    grouper.push(post).map_err(CliError::Input)?;
                }
                Err(message) => {
                    counts.parse_errors += 1;
                    if shown_errors < 5 {
                        eprintln!("warning: {}:{}: {message}", input.display(), idx + 1);
                        shown_errors += 1;
                    }
                }
            }
        }
    }
    if counts.parse_errors > shown_errors {
        eprintln!(
            "warning: {} further malformed lines suppressed",
            counts.parse_errors - shown_errors
        );
    }
    counts.spilled_runs = grouper.spilled_runs();

    let mut conversations = Vec::new();
    let mut stats = AssembleStats::default();
    let mut groups = grouper.into_groups().map_err(CliError::Input)?;
    while let Some((_, records)) = groups.next_group().map_err(CliError::Input)? {
        let outcome = assemble(records, config.min_size);
        stats.merge(&outcome.stats);
        conversations.extend(outcome.conversations);
    }
    Ok((conversations, stats))
}

fn run_activity_stage(
    config: &AnalysisConfig,
    conversations: &[Conversation],
) -> Result<(), CliError> {
    let curve = aggregate_curve(conversations, config.resolution)
        .map_err(|err| CliError::Empty(format!("activity curve unavailable: {err}")))?;
    let fit = fit_saturation(&curve)
        .map_err(|err| CliError::Internal(anyhow!("saturation fit failed: {err}")))?;
    artifacts::write_curve_csv(&config.out.join("activity_curve.csv"), &curve)
        .map_err(CliError::Input)?;
    artifacts::write_fit_json(&config.out.join("activity_fit.json"), &fit)
        .map_err(CliError::Input)?;
    println!(
        "activity: alpha {:.4}, gamma {:.5}, chi2_reduced {:.4} over {} grid points",
        fit.alpha, fit.gamma, fit.chi2_reduced, fit.n_points
    );
    Ok(())
}

fn run_wiener_stage(
    config: &AnalysisConfig,
    conversations: &[Conversation],
) -> Result<(usize, usize), CliError> {
    let results: Vec<(String, Result<WienerSeries, String>)> = conversations
        .par_iter()
        .map(|conv| {
            let outcome = sample(conv, config.policy)
                .map_err(|e| e.to_string())
                .and_then(|seq| temporal_wiener(&seq).map_err(|e| e.to_string()));
            (conv.id().to_string(), outcome)
        })
        .collect();
    let mut series = Vec::new();
    let mut skipped = 0usize;
    for (conv_id, outcome) in results {
        match outcome {
            Ok(values) => series.push((conv_id, values)),
            Err(err) => {
                skipped += 1;
                eprintln!("warning: skipping conversation `{conv_id}`: {err}");
            }
        }
    }
    artifacts::write_wiener_series_csv(&config.out.join("wiener_series.csv"), &series)
        .map_err(CliError::Input)?;
    artifacts::write_wiener_summary_csv(
        &config.out.join("wiener_summary.csv"),
        &series,
        config.bins,
    )
    .map_err(CliError::Input)?;
    Ok((series.len(), skipped))
}

fn run_hijack_stage(
    config: &AnalysisConfig,
    conversations: &[Conversation],
) -> Result<ScenarioCounts, CliError> {
    let outcomes: Vec<Result<HijackReport, String>> = conversations
        .par_iter()
        .map(|conv| {
            sample(conv, config.policy)
                .map(|seq| classify(conv, &seq, config.min_use))
                .map_err(|e| format!("skipping conversation `{}`: {e}", conv.id()))
        })
        .collect();
    let mut reports = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(report) => reports.push(report),
            Err(err) => eprintln!("warning: {err}"),
        }
    }
    let hist = takeover_histogram(&reports, config.bins)
        .map_err(|err| CliError::Internal(anyhow!("histogram failed: {err}")))?;

    let mut counts = ScenarioCounts::default();
    for report in &reports {
        match report.scenario {
            Scenario::Hijacking => counts.hijacking += 1,
            Scenario::FailedHijacking => counts.failed_hijacking += 1,
            Scenario::NoHijacking => counts.no_hijacking += 1,
            Scenario::Ineligible => counts.ineligible += 1,
        }
    }
    counts.eligible = counts.hijacking + counts.failed_hijacking + counts.no_hijacking;

    artifacts::write_hijack_reports_jsonl(&config.out.join("hijack_reports.jsonl"), &reports)
        .map_err(CliError::Input)?;
    artifacts::write_histogram_csv(&config.out.join("takeover_histogram.csv"), &hist)
        .map_err(CliError::Input)?;

    let pct = |n: usize| {
        if counts.eligible == 0 {
            0.0
        } else {
            100.0 * n as f64 / counts.eligible as f64
        }
    };
    let summary = json!({
        "conversations": reports.len(),
        "eligible": counts.eligible,
        "hijacking": counts.hijacking,
        "failed_hijacking": counts.failed_hijacking,
        "no_hijacking": counts.no_hijacking,
        "ineligible": counts.ineligible,
        "pct_hijacking": pct(counts.hijacking),
        "pct_failed_hijacking": pct(counts.failed_hijacking),
        "pct_no_hijacking": pct(counts.no_hijacking),
    });
    artifacts::write_json_pretty(&config.out.join("hijack_summary.json"), &summary)
        .map_err(CliError::Input)?;
    println!(
        "hijack: {} eligible of {} — hijacking {} ({:.1}%), failed {} ({:.1}%), none {} ({:.1}%)",
        counts.eligible,
        reports.len(),
        counts.hijacking,
        pct(counts.hijacking),
        counts.failed_hijacking,
        pct(counts.failed_hijacking),
        counts.no_hijacking,
        pct(counts.no_hijacking),
    );
    Ok(counts)
}

/// Which corpus the synth subcommand writes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SynthKind {
    Plain(Topology),
    Scenario(Scenario),
    Mixed,
}

pub struct SynthConfig {
    pub convs: usize,
    pub posts: usize,
    pub alpha: f64,
    pub kind: SynthKind,
    pub out: PathBuf,
    pub seed: u64,
}

/// Generate a canonical-format corpus ready for the full ingest path.
pub fn run_synth(config: &SynthConfig) -> Result<(), CliError> {
    if config.convs == 0 || config.posts == 0 {
        return Err(CliError::Usage(
            "--convs and --posts must be at least 1".to_string(),
        ));
    }
    if config.alpha <= 0.0 || !config.alpha.is_finite() {
        return Err(CliError::Usage("--alpha must be positive".to_string()));
    }
    ensure_out_dir(&config.out)?;
    let mut timings = Timings::new();

    let path = config.out.join("synthetic.jsonl");
    let mut writer = BufWriter::new(
        File::create(&path)
            .with_context(|| format!("creating `{}`", path.display()))
            .map_err(CliError::Input)?,
    );
    let mut total_posts = 0usize;
    for i in 0..config.convs {
        let conv_id = format!("synth-{i:06}");
        let conv_seed = config.seed.wrapping_add(i as u64);
        let posts = synth_conversation(config, &conv_id, conv_seed, i)
            .map_err(|err| CliError::Usage(err.to_string()))?;
        total_posts += posts.len();
        for post in &posts {
            serde_json::to_writer(&mut writer, post)
                .context("writing corpus")
                .map_err(CliError::Input)?;
            writer
                .write_all(b"\n")
                .map_err(|e| CliError::Input(e.into()))?;
        }
    }
    writer.flush().map_err(|e| CliError::Input(e.into()))?;
    timings.mark("synth");

    let manifest = Manifest {
        config: json!({
            "subcommand": "synth",
            "convs": config.convs,
            "posts": config.posts,
            "alpha": config.alpha,
            "mode": match config.kind {
                SynthKind::Plain(topology) => format!("topology:{topology}"),
                SynthKind::Scenario(label) => format!("scenario:{label}"),
                SynthKind::Mixed => "scenario:mixed".to_string(),
            },
            "out": config.out.display().to_string(),
            "seed": config.seed,
        }),
        counts: json!({
            "synthesized_conversations": config.convs,
            "synthesized_posts": total_posts,
        }),
        timings_ms: timings.finish(),
    };
    artifacts::write_json_pretty(&config.out.join("run_manifest.json"), &manifest)
        .map_err(CliError::Input)?;
    println!(
        "synth: wrote {} conversations ({} posts) to {}",
        config.convs,
        total_posts,
        path.display()
    );
    Ok(())
}

fn synth_conversation(
    config: &SynthConfig,
    conv_id: &str,
    conv_seed: u64,
    index: usize,
) -> Result<Vec<RawPost>> {
    match config.kind {
        SynthKind::Plain(topology) => {
            let spec = SynthSpec::new(config.posts, config.alpha, topology, conv_seed);
            Ok(generate_posts(&spec, conv_id)?)
        }
        SynthKind::Scenario(label) => {
            let mut rng = ChaCha8Rng::seed_from_u64(conv_seed);
            Ok(gen_hijack_scenario_posts(label, conv_id, &mut rng))
        }
        SynthKind::Mixed => {
            let label = match index % 3 {
                0 => Scenario::Hijacking,
                1 => Scenario::FailedHijacking,
                _ => Scenario::NoHijacking,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(conv_seed);
            Ok(gen_hijack_scenario_posts(label, conv_id, &mut rng))
        }
    }
}
