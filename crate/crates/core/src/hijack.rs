//! Hashtag takeover tracking and hijacking classification.
//!
//! Hashtags are compared by their usage degree (distinct using posts) per
//! snapshot. If a hashtag not used in the seed post ends the conversation
//! with a strictly higher degree than every seed hashtag, the conversation
//! is a hijacking; if an overtake happened but a seed hashtag is back on
//! top at the end, a failed hijacking; otherwise no hijacking. Conversations
//! qualify only when the seed post carries a hashtag and some hashtag is
//! used at least `min_use` times. Ties favor the initial hashtags, and
//! multiple overtaking hashtags still count as one hijacking.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{EdgeType, NodeType};
use crate::ingest::Conversation;
use crate::sampler::{SampleError, SnapshotSequence};

pub const DEFAULT_MIN_USE: usize = 5;
pub const DEFAULT_HISTOGRAM_BINS: usize = 20;

#[derive(Debug, Error, PartialEq)]
pub enum HijackError {
    #[error("histogram needs at least one bin")]
    InvalidBins,
    #[error(transparent)]
    Sample(#[from] SampleError),
}

/// Usage degree of one hashtag across the snapshot sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct HashtagSeries {
    pub hashtag: String,
    /// Distinct using posts per snapshot; nondecreasing since snapshots
    /// are cumulative.
    pub degrees: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Hijacking,
    FailedHijacking,
    NoHijacking,
    Ineligible,
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scenario::Hijacking => write!(f, "hijacking"),
            Scenario::FailedHijacking => write!(f, "failed_hijacking"),
            Scenario::NoHijacking => write!(f, "no_hijacking"),
            Scenario::Ineligible => write!(f, "ineligible"),
        }
    }
}

/// Per-conversation classification with takeover timing in completion-rate
/// units.
#[derive(Clone, Debug, Serialize)]
pub struct HijackReport {
    pub conversation_id: String,
    pub eligible: bool,
    pub scenario: Scenario,
    pub initial_hashtags: BTreeSet<String>,
    /// Completion rate of the earliest snapshot where a non-initial hashtag
    /// strictly led; present for hijacking and failed hijacking.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_overtake: Option<f64>,
    /// Completion rate of the final reclaim by an initial hashtag; present
    /// for failed hijacking only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub last_retake: Option<f64>,
    /// Hashtag with the highest final degree (ties favor initial hashtags,
    /// then the lexicographically smallest id).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_dominant: Option<String>,
}

/// Normalized hashtags of the seed post.
pub fn initial_hashtags(conv: &Conversation) -> BTreeSet<String> {
    conv.graph()
        .out_neighbors(conv.seed_id(), Some(EdgeType::Usage))
        .map(String::from)
        .collect()
}

/// True iff the seed post carries a hashtag and any hashtag reaches
/// `min_use` distinct using posts over the whole conversation.
pub fn eligible(conv: &Conversation, min_use: usize) -> bool {
    if initial_hashtags(conv).is_empty() {
        return false;
    }
    conv.graph().nodes_of_type(NodeType::Hashtag).any(|tag| {
        conv.graph()
            .degree(tag, Some(EdgeType::Usage), crate::graph::Direction::In)
            .expect("hashtag node exists")
            >= min_use
    })
}

/// Usage degree per snapshot for every hashtag in the conversation,
/// ordered by hashtag id.
pub fn degree_series(conv: &Conversation, seq: &SnapshotSequence<'_>) -> Vec<HashtagSeries> {
    let rank_of: std::collections::BTreeMap<&str, usize> = conv
        .posts_by_time()
        .iter()
        .enumerate()
        .map(|(rank, id)| (id.as_str(), rank))
        .collect();
    let counts: Vec<usize> = (0..seq.len())
        .map(|i| seq.post_count(i).expect("index in range"))
        .collect();
    conv.graph()
        .nodes_of_type(NodeType::Hashtag)
        .map(|tag| {
            let mut ranks: Vec<usize> = conv
                .graph()
                .in_neighbors(tag, Some(EdgeType::Usage))
                .map(|post| rank_of[post])
                .collect();
            ranks.sort_unstable();
            let degrees = counts
                .iter()
                .map(|&count| ranks.partition_point(|&r| r < count))
                .collect();
            HashtagSeries {
                hashtag: tag.to_string(),
                degrees,
            }
        })
        .collect()
}

/// Scenario decision computed from raw degree values.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub scenario: Scenario,
    pub first_overtake: Option<f64>,
    pub last_retake: Option<f64>,
    pub final_dominant: Option<String>,
}

/// Classify from per-snapshot degree values directly.
///
/// `series` holds one (hashtag, degrees) entry per hashtag with one value
/// per snapshot; `rates` the snapshots' completion rates. The decision uses
/// only within-snapshot comparisons, so rescaling every degree in a snapshot
/// by a positive constant cannot change the outcome.
pub fn classify_from_degrees(
    initial: &BTreeSet<String>,
    series: &[(String, Vec<f64>)],
    rates: &[f64],
) -> Verdict {
    let snapshots = rates.len();
    let lead_of = |t: usize| -> (f64, f64) {
        let mut initial_max = 0.0f64;
        let mut other_max = 0.0f64;
        for (tag, degrees) in series {
            let d = degrees[t];
            if initial.contains(tag) {
                initial_max = initial_max.max(d);
            } else {
                other_max = other_max.max(d);
            }
        }
        (initial_max, other_max)
    };

    let overtaken: Vec<bool> = (0..snapshots)
        .map(|t| {
            let (i, m) = lead_of(t);
            m > i
        })
        .collect();

    let first_overtake = overtaken.iter().position(|&o| o).map(|t| rates[t]);
    let scenario = match (
        first_overtake.is_some(),
        *overtaken.last().unwrap_or(&false),
    ) {
        (false, _) => Scenario::NoHijacking,
        (true, true) => Scenario::Hijacking,
        (true, false) => Scenario::FailedHijacking,
    };
    let last_retake = if scenario == Scenario::FailedHijacking {
        // Latest snapshot where the overtake stops holding after holding
        // at the previous snapshot: the final reclaim.
        (1..snapshots)
            .rev()
            .find(|&t| !overtaken[t] && overtaken[t - 1])
            .map(|t| rates[t])
    } else {
        None
    };

    let final_dominant = series
        .iter()
        .max_by(|(tag_a, deg_a), (tag_b, deg_b)| {
            let last = snapshots - 1;
            deg_a[last]
                .total_cmp(&deg_b[last])
                .then_with(|| initial.contains(tag_a).cmp(&initial.contains(tag_b)))
                .then_with(|| tag_b.cmp(tag_a))
        })
        .map(|(tag, _)| tag.clone());

    Verdict {
        scenario,
        first_overtake,
        last_retake,
        final_dominant,
    }
}

/// Classify one conversation against its snapshot sequence.
pub fn classify(conv: &Conversation, seq: &SnapshotSequence<'_>, min_use: usize) -> HijackReport {
    let initial = initial_hashtags(conv);
    let series = degree_series(conv, seq);
    let rates: Vec<f64> = (0..seq.len())
        .map(|i| seq.completion_rate(i).expect("index in range"))
        .collect();
    let as_f64: Vec<(String, Vec<f64>)> = series
        .iter()
        .map(|s| {
            (
                s.hashtag.clone(),
                s.degrees.iter().map(|&d| d as f64).collect(),
            )
        })
        .collect();
    let verdict = classify_from_degrees(&initial, &as_f64, &rates);

    if !eligible(conv, min_use) {
        return HijackReport {
            conversation_id: conv.id().to_string(),
            eligible: false,
            scenario: Scenario::Ineligible,
            initial_hashtags: initial,
            first_overtake: None,
            last_retake: None,
            final_dominant: verdict.final_dominant,
        };
    }
    HijackReport {
        conversation_id: conv.id().to_string(),
        eligible: true,
        scenario: verdict.scenario,
        initial_hashtags: initial,
        first_overtake: verdict.first_overtake,
        last_retake: verdict.last_retake,
        final_dominant: verdict.final_dominant,
    }
}

/// One normalized histogram row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramRow {
    /// Occurrence probability per bin; all zeros when no events exist.
    pub probabilities: Vec<f64>,
    /// Total events behind the row.
    pub events: usize,
}

impl HistogramRow {
    pub fn is_empty(&self) -> bool {
        self.events == 0
    }
}

/// Row-normalized takeover timing histogram over completion-rate bins.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TakeoverHistogram {
    pub bins: usize,
    pub hijack_first_overtake: HistogramRow,
    pub failed_first_overtake: HistogramRow,
    pub failed_last_retake: HistogramRow,
}

impl TakeoverHistogram {
    /// Rows with their wire labels, for serialization.
    pub fn rows(&self) -> [(&'static str, &HistogramRow); 3] {
        [
            ("hijack_first_overtake", &self.hijack_first_overtake),
            ("failed_first_overtake", &self.failed_first_overtake),
            ("failed_last_retake", &self.failed_last_retake),
        ]
    }
}

/// Build the takeover timing histogram from classification reports.
///
/// Three rows: first overtakes of hijackings, first overtakes of failed
/// hijackings, and last retakes of failed hijackings. Each nonempty row is
/// normalized by its own event count.
pub fn takeover_histogram(
    reports: &[HijackReport],
    bins: usize,
) -> Result<TakeoverHistogram, HijackError> {
    if bins == 0 {
        return Err(HijackError::InvalidBins);
    }
    let mut rows = [vec![0usize; bins], vec![0usize; bins], vec![0usize; bins]];
    let slot = |rate: f64| ((rate * bins as f64) as usize).min(bins - 1);
    for report in reports {
        match report.scenario {
            Scenario::Hijacking => {
                if let Some(rate) = report.first_overtake {
                    rows[0][slot(rate)] += 1;
                }
            }
            Scenario::FailedHijacking => {
                if let Some(rate) = report.first_overtake {
                    rows[1][slot(rate)] += 1;
                }
                if let Some(rate) = report.last_retake {
                    rows[2][slot(rate)] += 1;
                }
            }
            _ => {}
        }
    }
    let normalize = |counts: Vec<usize>| {
        let events: usize = counts.iter().sum();
        let probabilities = if events == 0 {
            vec![0.0; bins]
        } else {
            counts.iter().map(|&c| c as f64 / events as f64).collect()
        };
        HistogramRow {
            probabilities,
            events,
        }
    };
    let [hijack, failed_first, failed_retake] = rows;
    Ok(TakeoverHistogram {
        bins,
        hijack_first_overtake: normalize(hijack),
        failed_first_overtake: normalize(failed_first),
        failed_last_retake: normalize(failed_retake),
    })
}
