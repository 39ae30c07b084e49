//! Synthetic conversation generation with controlled activity, topology
//! and hashtag scripts.
//!
//! Timestamps are drawn from the saturation law by inverse CDF: with
//! `u ~ Uniform(0, 1 - exp(-alpha))`, `t = -ln(1 - u) / alpha` follows the
//! truncated exponential whose CDF is the activity model. Values are
//! generated in normalized lifetime units and scaled to a nominal
//! wall-clock duration (default seven days) when concrete instants are
//! required. Generated records go through [`assemble`], so every product
//! satisfies the ingest-level invariants.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::Timestamp;
use crate::hijack::Scenario;
use crate::ingest::{assemble, Conversation, RawPost};

/// Nominal wall-clock span of a generated conversation (seven days).
pub const DEFAULT_DURATION_MILLIS: i64 = 7 * 86_400_000;

/// Wall-clock origin for generated timestamps: 2021-01-01T00:00:00Z.
const BASE_INSTANT_MILLIS: i64 = 1_609_459_200_000;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("timestamp generation needs at least 2 posts, got {0}")]
    TooFewPosts(usize),
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

/// Reply-tree shape of a generated conversation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Topology {
    /// Every non-seed post replies to the seed.
    Star,
    /// Each post replies to the previous one.
    Path,
    /// Parent drawn uniformly from the existing posts.
    UniformAttach,
    /// Parent drawn with weight `exp(-bias * age_rank)`; newer posts are
    /// favored as `bias` grows, `bias = 0` is uniform.
    RecencyAttach { bias: f64 },
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Star => write!(f, "star"),
            Topology::Path => write!(f, "path"),
            Topology::UniformAttach => write!(f, "uniform"),
            Topology::RecencyAttach { bias } => write!(f, "recency:{bias}"),
        }
    }
}

impl FromStr for Topology {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, SynthError> {
        match s {
            "star" => Ok(Topology::Star),
            "path" => Ok(Topology::Path),
            "uniform" => Ok(Topology::UniformAttach),
            other => match other.strip_prefix("recency:") {
                Some(bias) => {
                    let bias: f64 = bias.parse().map_err(|_| {
                        SynthError::InvalidSpec(format!("bad recency bias in `{s}`"))
                    })?;
                    if bias < 0.0 {
                        return Err(SynthError::InvalidSpec(
                            "recency bias must be nonnegative".to_string(),
                        ));
                    }
                    Ok(Topology::RecencyAttach { bias })
                }
                None => Err(SynthError::InvalidSpec(format!(
                    "unknown topology `{s}` (star|path|uniform|recency:BIAS)"
                ))),
            },
        }
    }
}

/// Hashtag placement: `tag` on every post rank in `from_rank..=to_rank`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScriptEntry {
    pub from_rank: usize,
    pub to_rank: usize,
    pub tag: String,
}

/// Full description of one synthetic conversation.
#[derive(Clone, Debug)]
pub struct SynthSpec {
    pub n_posts: usize,
    pub alpha: f64,
    pub topology: Topology,
    pub hashtag_script: Vec<ScriptEntry>,
    pub rng_seed: u64,
    pub duration_millis: i64,
}

impl SynthSpec {
    pub fn new(n_posts: usize, alpha: f64, topology: Topology, rng_seed: u64) -> Self {
        SynthSpec {
            n_posts,
            alpha,
            topology,
            hashtag_script: Vec::new(),
            rng_seed,
            duration_millis: DEFAULT_DURATION_MILLIS,
        }
    }

    fn validate(&self) -> Result<(), SynthError> {
        if self.n_posts == 0 {
            return Err(SynthError::InvalidSpec(
                "n_posts must be at least 1".to_string(),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(SynthError::InvalidSpec(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if self.duration_millis <= 0 {
            return Err(SynthError::InvalidSpec(
                "duration must be positive".to_string(),
            ));
        }
        for entry in &self.hashtag_script {
            if entry.from_rank > entry.to_rank || entry.to_rank >= self.n_posts {
                return Err(SynthError::InvalidSpec(format!(
                    "script range {}..={} out of bounds for {} posts",
                    entry.from_rank, entry.to_rank, self.n_posts
                )));
            }
            if entry.tag.is_empty() {
                return Err(SynthError::InvalidSpec("script tag is empty".to_string()));
            }
        }
        Ok(())
    }
}

/// Draw `n` normalized lifetimes from the saturation law.
///
/// Sorted ascending with the first pinned to 0 and the last to 1, so the
/// completion endpoints are exact.
pub fn gen_timestamps(n: usize, alpha: f64, rng: &mut impl Rng) -> Result<Vec<f64>, SynthError> {
    if n < 2 {
        return Err(SynthError::TooFewPosts(n));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(SynthError::InvalidSpec(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let ceiling = -(-alpha).exp_m1(); // 1 - exp(-alpha)
    let mut times: Vec<f64> = (0..n)
        .map(|_| {
            let u = rng.random::<f64>() * ceiling;
            -(-u).ln_1p() / alpha // -ln(1 - u) / alpha
        })
        .collect();
    times.sort_by(f64::total_cmp);
    times[0] = 0.0;
    times[n - 1] = 1.0;
    Ok(times)
}

/// Parent rank per post under the given topology; rank 0 is the seed.
fn gen_parents(n: usize, topology: Topology, rng: &mut impl Rng) -> Vec<Option<usize>> {
    (0..n)
        .map(|i| {
            if i == 0 {
                return None;
            }
            Some(match topology {
                Topology::Star => 0,
                Topology::Path => i - 1,
                Topology::UniformAttach => rng.random_range(0..i),
                Topology::RecencyAttach { bias } => {
                    // age_rank 0 is the newest candidate parent.
                    let weights: Vec<f64> =
                        (0..i).map(|p| (-bias * (i - 1 - p) as f64).exp()).collect();
                    let total: f64 = weights.iter().sum();
                    let mut draw = rng.random::<f64>() * total;
                    let mut choice = i - 1;
                    for (p, w) in weights.iter().enumerate() {
                        if draw < *w {
                            choice = p;
                            break;
                        }
                        draw -= w;
                    }
                    choice
                }
            })
        })
        .collect()
}

fn build_posts(
    conv_id: &str,
    lambda_times: &[f64],
    parents: &[Option<usize>],
    tags_by_rank: &[Vec<String>],
    duration_millis: i64,
) -> Vec<RawPost> {
    let id_of = |rank: usize| format!("{conv_id}-p{rank:06}");
    lambda_times
        .iter()
        .enumerate()
        .map(|(rank, &lambda)| RawPost {
            id: id_of(rank),
            conversation_id: conv_id.to_string(),
            created_at: Timestamp::from_millis(
                BASE_INSTANT_MILLIS + (lambda * duration_millis as f64).round() as i64,
            ),
            in_reply_to: parents[rank].map(id_of),
            hashtags: tags_by_rank.get(rank).cloned().unwrap_or_default(),
            author_id: None,
            text: None,
        })
        .collect()
}

fn into_conversation(posts: Vec<RawPost>) -> Conversation {
    let mut outcome = assemble(posts, 1);
    debug_assert_eq!(outcome.conversations.len(), 1);
    outcome.conversations.pop().expect("one conversation")
}

/// Generate the raw records for one conversation described by `spec`.
///
/// The records exercise the full ingest path; feed them to [`assemble`] or
/// write them out as canonical JSONL.
pub fn generate_posts(spec: &SynthSpec, conv_id: &str) -> Result<Vec<RawPost>, SynthError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let lambda_times = if spec.n_posts == 1 {
        vec![0.0]
    } else {
        gen_timestamps(spec.n_posts, spec.alpha, &mut rng)?
    };
    let parents = gen_parents(spec.n_posts, spec.topology, &mut rng);
    let mut tags_by_rank = vec![Vec::new(); spec.n_posts];
    for entry in &spec.hashtag_script {
        for tags in &mut tags_by_rank[entry.from_rank..=entry.to_rank] {
            tags.push(entry.tag.clone());
        }
    }
    Ok(build_posts(
        conv_id,
        &lambda_times,
        &parents,
        &tags_by_rank,
        spec.duration_millis,
    ))
}

/// Generate one conversation described by `spec`.
pub fn generate(spec: &SynthSpec, conv_id: &str) -> Result<Conversation, SynthError> {
    Ok(into_conversation(generate_posts(spec, conv_id)?))
}

/// Generate a star conversation with evenly spaced timestamps.
///
/// Used where the reply topology matters and the activity law does not.
pub fn gen_tree(n: usize, topology: Topology, rng: &mut impl Rng) -> Conversation {
    assert!(n >= 1, "a conversation has at least one post");
    let lambda_times: Vec<f64> = if n == 1 {
        vec![0.0]
    } else {
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    };
    let parents = gen_parents(n, topology, rng);
    let tags = vec![Vec::new(); n];
    into_conversation(build_posts(
        "synth",
        &lambda_times,
        &parents,
        &tags,
        DEFAULT_DURATION_MILLIS,
    ))
}

/// Raw records for a conversation that classifies to `label`; see
/// [`gen_hijack_scenario`].
pub fn gen_hijack_scenario_posts(
    label: Scenario,
    conv_id: &str,
    rng: &mut impl Rng,
) -> Vec<RawPost> {
    let (n, init_ranks, rival, rival_ranks): (usize, Vec<usize>, &str, Vec<usize>) = match label {
        Scenario::NoHijacking => {
            let n = 5 * rng.random_range(5..=10);
            let half = n / 2;
            let quiet = rng.random_range(2..=4usize);
            (
                n,
                (0..=half).collect(),
                "latecomer",
                (half + 1..half + 1 + quiet).collect(),
            )
        }
        Scenario::Hijacking => {
            let n = 5 * rng.random_range(5..=10);
            let surge = rng.random_range(6..=12usize);
            (n, vec![0, 1], "rival", (2..2 + surge).collect())
        }
        Scenario::FailedHijacking => {
            let n = 5 * rng.random_range(6..=10);
            let surge = rng.random_range(6..=8usize);
            let tail = surge + rng.random_range(0..=5usize);
            (
                n,
                std::iter::once(0).chain(n - tail..n).collect(),
                "rival",
                (1..=surge).collect(),
            )
        }
        Scenario::Ineligible => {
            // A conversation without any hashtags never qualifies.
            let n = 5 * rng.random_range(5..=8);
            (n, Vec::new(), "unused", Vec::new())
        }
    };
    let lambda_times: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let parents = gen_parents(n, Topology::Star, rng);
    let mut tags_by_rank: Vec<Vec<String>> = vec![Vec::new(); n];
    for rank in init_ranks {
        tags_by_rank[rank].push("seedtag".to_string());
    }
    for rank in rival_ranks {
        tags_by_rank[rank].push(rival.to_string());
    }
    build_posts(
        conv_id,
        &lambda_times,
        &parents,
        &tags_by_rank,
        DEFAULT_DURATION_MILLIS,
    )
}

/// Generate a conversation that classifies to `label` under the default
/// parameters (volume sampling of five, minimum usage of five).
///
/// Construction is by scripted degree patterns on a star topology:
/// - no hijacking: the seed tag covers the first half of the posts while a
///   late tag gets fewer than five uses;
/// - hijacking: the seed tag stops at two uses and a rival chains six or
///   more directly after it;
/// - failed hijacking: a rival takes the lead inside the first snapshot and
///   a seed-tag run at the tail retakes it by the end.
pub fn gen_hijack_scenario(label: Scenario, rng: &mut impl Rng) -> Conversation {
    into_conversation(gen_hijack_scenario_posts(label, "synth", rng))
}
