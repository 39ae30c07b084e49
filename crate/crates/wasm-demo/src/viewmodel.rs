//! JSON view models behind the browser demo. Pure functions over the core
//! crate so they can be tested on any target; the wasm bindings are thin
//! wrappers.

use std::collections::BTreeSet;

use serde::Serialize;

use convograph::activity::{aggregate_curve, fit_saturation};
use convograph::hijack::{classify, degree_series, initial_hashtags, Scenario};
use convograph::sampler::{sample, SamplingPolicy};
use convograph::synth::{gen_hijack_scenario, gen_tree, generate, SynthSpec, Topology};
use convograph::wiener::temporal_wiener;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MAX_POSTS: usize = 3_000;
const MAX_CONVS: usize = 1_000;

/// Demo grid step; coarse enough to keep the JSON payload small.
const DEMO_RESOLUTION: f64 = 1e-3;

#[derive(Serialize)]
struct ActivityView {
    alpha_true: f64,
    alpha_fit: f64,
    gamma_fit: f64,
    chi2_reduced: f64,
    n_conversations: usize,
    /// Per grid point: lambda_time, mean, sd.
    curve: Vec<[f64; 3]>,
}

/// Generate conversations at a chosen saturation rate, aggregate their
/// completion curves and refit the rate.
pub fn activity_explorer(
    alpha: f64,
    n_posts: usize,
    n_convs: usize,
    seed: u64,
) -> Result<String, String> {
    if !(alpha > 0.0 && alpha <= 1_000.0) {
        return Err("alpha must lie in (0, 1000]".to_string());
    }
    if !(2..=MAX_POSTS).contains(&n_posts) {
        return Err(format!("posts must lie in [2, {MAX_POSTS}]"));
    }
    if !(1..=MAX_CONVS).contains(&n_convs) {
        return Err(format!("conversations must lie in [1, {MAX_CONVS}]"));
    }
    let convs: Vec<_> = (0..n_convs)
        .map(|i| {
            let spec = SynthSpec::new(
                n_posts,
                alpha,
                Topology::UniformAttach,
                seed.wrapping_add(i as u64),
            );
            generate(&spec, &format!("demo-{i:04}")).map_err(|e| e.to_string())
        })
        .collect::<Result<_, _>>()?;
    let curve = aggregate_curve(&convs, DEMO_RESOLUTION).map_err(|e| e.to_string())?;
    let fit = fit_saturation(&curve).map_err(|e| e.to_string())?;
    let view = ActivityView {
        alpha_true: alpha,
        alpha_fit: fit.alpha,
        gamma_fit: fit.gamma,
        chi2_reduced: fit.chi2_reduced,
        n_conversations: n_convs,
        curve: curve
            .points
            .iter()
            .map(|p| [p.lambda_time, p.mean, p.sd])
            .collect(),
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct WienerView {
    topology: String,
    n_posts: usize,
    final_value: f64,
    /// Per snapshot: completion rate, wiener value.
    series: Vec<[f64; 2]>,
}

/// Grow a reply tree of the chosen topology and trace its wiener series.
pub fn wiener_explorer(
    topology: &str,
    n_posts: usize,
    k: usize,
    seed: u64,
) -> Result<String, String> {
    let topology: Topology = topology.parse().map_err(|e| format!("{e}"))?;
    if !(1..=MAX_POSTS).contains(&n_posts) {
        return Err(format!("posts must lie in [1, {MAX_POSTS}]"));
    }
    if k == 0 {
        return Err("k must be at least 1".to_string());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let conv = gen_tree(n_posts, topology, &mut rng);
    let seq = sample(&conv, SamplingPolicy::FixedVolume { k }).map_err(|e| e.to_string())?;
    let series = temporal_wiener(&seq).map_err(|e| e.to_string())?;
    let view = WienerView {
        topology: topology.to_string(),
        n_posts,
        final_value: series.values.last().map(|&(_, w)| w).unwrap_or(0.0),
        series: series.values.iter().map(|&(r, w)| [r, w]).collect(),
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct HijackView {
    requested: String,
    scenario: String,
    eligible: bool,
    first_overtake: Option<f64>,
    last_retake: Option<f64>,
    final_dominant: Option<String>,
    series: Vec<HashtagTrace>,
}

#[derive(Serialize)]
struct HashtagTrace {
    hashtag: String,
    initial: bool,
    /// Per snapshot: completion rate, usage degree.
    points: Vec<[f64; 2]>,
}

/// Script a takeover scenario, classify it, and expose the degree traces.
pub fn hijack_explorer(label: &str, seed: u64) -> Result<String, String> {
    let requested = match label {
        "hijacking" => Scenario::Hijacking,
        "failed_hijacking" => Scenario::FailedHijacking,
        "no_hijacking" => Scenario::NoHijacking,
        other => {
            return Err(format!(
                "unknown scenario `{other}` (hijacking|failed_hijacking|no_hijacking)"
            ))
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let conv = gen_hijack_scenario(requested, &mut rng);
    let seq = sample(&conv, SamplingPolicy::default()).map_err(|e| e.to_string())?;
    let report = classify(&conv, &seq, convograph::hijack::DEFAULT_MIN_USE);
    let initial: BTreeSet<String> = initial_hashtags(&conv);
    let rates: Vec<f64> = (0..seq.len())
        .map(|i| seq.completion_rate(i).expect("index in range"))
        .collect();
    let series = degree_series(&conv, &seq)
        .into_iter()
        .map(|s| HashtagTrace {
            initial: initial.contains(&s.hashtag),
            points: rates
                .iter()
                .zip(&s.degrees)
                .map(|(&r, &d)| [r, d as f64])
                .collect(),
            hashtag: s.hashtag,
        })
        .collect();
    let view = HijackView {
        requested: requested.to_string(),
        scenario: report.scenario.to_string(),
        eligible: report.eligible,
        first_overtake: report.first_overtake,
        last_retake: report.last_retake,
        final_dominant: report.final_dominant,
        series,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}
