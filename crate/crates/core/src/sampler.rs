//! Temporal snapshot sampling of conversations.
//!
//! A snapshot sequence is a monotone nested sequence of cumulative views:
//! view `i` holds every post published before boundary `i` plus the hashtags
//! those posts use, with all induced edges. Boundaries are placed either at
//! fixed time steps or so that each snapshot adds a fixed number of posts
//! (volume sampling). Volume boundaries are realized by (timestamp, id)
//! rank, which sidesteps equal-timestamp ambiguity.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{GraphError, Timestamp, TypedGraph};
use crate::ingest::Conversation;

pub const DEFAULT_POSTS_PER_SNAPSHOT: usize = 5;

/// How snapshot boundaries are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplingPolicy {
    /// Boundaries every `delta_millis` starting at the first post.
    FixedTime { delta_millis: i64 },
    /// Each snapshot adds `k` new posts; the final one absorbs the remainder.
    FixedVolume { k: usize },
}

impl SamplingPolicy {
    pub fn fixed_time(delta_millis: i64) -> Result<Self, SampleError> {
        if delta_millis <= 0 {
            return Err(SampleError::InvalidPolicy(format!(
                "time step must be positive, got {delta_millis}ms"
            )));
        }
        Ok(SamplingPolicy::FixedTime { delta_millis })
    }

    pub fn fixed_volume(k: usize) -> Result<Self, SampleError> {
        if k == 0 {
            return Err(SampleError::InvalidPolicy(
                "posts per snapshot must be at least 1".to_string(),
            ));
        }
        Ok(SamplingPolicy::FixedVolume { k })
    }
}

impl Default for SamplingPolicy {
    fn default() -> Self {
        SamplingPolicy::FixedVolume {
            k: DEFAULT_POSTS_PER_SNAPSHOT,
        }
    }
}

impl fmt::Display for SamplingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplingPolicy::FixedTime { delta_millis } => write!(f, "time:{delta_millis}ms"),
            SamplingPolicy::FixedVolume { k } => write!(f, "volume:{k}"),
        }
    }
}

/// Parses `volume:K` or `time:DUR` where DUR is `<int>` plus `ms|s|m|h|d`.
impl FromStr for SamplingPolicy {
    type Err = SampleError;

    fn from_str(s: &str) -> Result<Self, SampleError> {
        let bad = |msg: &str| SampleError::InvalidPolicy(format!("`{s}`: {msg}"));
        let (kind, value) = s
            .split_once(':')
            .ok_or_else(|| bad("expected `volume:K` or `time:DUR`"))?;
        match kind {
            "volume" => {
                let k: usize = value.parse().map_err(|_| bad("K must be an integer"))?;
                SamplingPolicy::fixed_volume(k)
            }
            "time" => {
                let (digits, unit) = value
                    .char_indices()
                    .find(|(_, c)| !c.is_ascii_digit())
                    .map(|(i, _)| value.split_at(i))
                    .ok_or_else(|| bad("duration needs a unit (ms|s|m|h|d)"))?;
                let n: i64 = digits
                    .parse()
                    .map_err(|_| bad("duration must start with an integer"))?;
                let factor = match unit {
                    "ms" => 1,
                    "s" => 1_000,
                    "m" => 60_000,
                    "h" => 3_600_000,
                    "d" => 86_400_000,
                    _ => return Err(bad("unknown duration unit (ms|s|m|h|d)")),
                };
                SamplingPolicy::fixed_time(n * factor)
            }
            _ => Err(bad("expected `volume:K` or `time:DUR`")),
        }
    }
}

/// Upper bound on snapshots per sequence; a conversation spanning years
/// sampled at milliseconds is a configuration mistake, not a workload.
pub const MAX_SNAPSHOTS: usize = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum SampleError {
    #[error("invalid sampling policy: {0}")]
    InvalidPolicy(String),
    #[error("time step {delta_millis}ms over {span_millis}ms yields {windows} snapshots (limit {MAX_SNAPSHOTS})")]
    TooManySnapshots {
        delta_millis: i64,
        span_millis: i64,
        windows: i64,
    },
    #[error("snapshot index {index} out of range for sequence of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Monotone sequence of cumulative snapshot views over one conversation.
///
/// Views are stored as prefix lengths of the conversation's (timestamp, id)
/// post order, so a sequence is cheap regardless of conversation size.
#[derive(Clone, Debug)]
pub struct SnapshotSequence<'a> {
    conv: &'a Conversation,
    policy: SamplingPolicy,
    /// Post count per view; strictly increasing for volume sampling,
    /// nondecreasing for time sampling (windows may be empty), last = N.
    cut_counts: Vec<usize>,
    /// Boundary instant per view. For volume sampling this is the timestamp
    /// of the last included post (nominal; the rank is authoritative).
    cut_times: Vec<Timestamp>,
}

/// Split a conversation into cumulative snapshots under `policy`.
///
/// The `Conversation` type guarantees at least one post; the only failure
/// mode is a time step so small the window count explodes.
pub fn sample(
    conv: &Conversation,
    policy: SamplingPolicy,
) -> Result<SnapshotSequence<'_>, SampleError> {
    let posts = conv.posts_by_time();
    let n = posts.len();
    let mut cut_counts = Vec::new();
    let mut cut_times = Vec::new();
    match policy {
        SamplingPolicy::FixedVolume { k } => {
            let mut count = k.min(n);
            loop {
                cut_counts.push(count);
                cut_times.push(
                    conv.graph()
                        .timestamp(&posts[count - 1])
                        .expect("posts carry timestamps"),
                );
                if count == n {
                    break;
                }
                count = (count + k).min(n);
            }
        }
        SamplingPolicy::FixedTime { delta_millis } => {
            let t0 = conv.t_first().millis();
            let span = conv.t_last().millis() - t0;
            let windows = (span / delta_millis) + 1;
            if windows > MAX_SNAPSHOTS as i64 {
                return Err(SampleError::TooManySnapshots {
                    delta_millis,
                    span_millis: span,
                    windows,
                });
            }
            let mut cursor = 0usize;
            for j in 1..=windows {
                let boundary = t0 + j * delta_millis;
                while cursor < n {
                    let ts = conv
                        .graph()
                        .timestamp(&posts[cursor])
                        .expect("posts carry timestamps");
                    if ts.millis() < boundary {
                        cursor += 1;
                    } else {
                        break;
                    }
                }
                cut_counts.push(cursor);
                cut_times.push(Timestamp::from_millis(boundary));
            }
            debug_assert_eq!(*cut_counts.last().unwrap(), n);
        }
    }
    Ok(SnapshotSequence {
        conv,
        policy,
        cut_counts,
        cut_times,
    })
}

impl<'a> SnapshotSequence<'a> {
    pub fn conversation(&self) -> &'a Conversation {
        self.conv
    }

    pub fn policy(&self) -> SamplingPolicy {
        self.policy
    }

    /// Number of snapshots; at least 1.
    pub fn len(&self) -> usize {
        self.cut_counts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Post ids contained in view `i`, in (timestamp, id) order.
    pub fn post_ids(&self, i: usize) -> Result<&'a [String], SampleError> {
        let count = self.post_count(i)?;
        Ok(&self.conv.posts_by_time()[..count])
    }

    /// Number of posts in view `i`.
    pub fn post_count(&self, i: usize) -> Result<usize, SampleError> {
        self.cut_counts
            .get(i)
            .copied()
            .ok_or(SampleError::IndexOutOfRange {
                index: i,
                len: self.len(),
            })
    }

    /// Boundary instant of view `i` (nominal for volume sampling).
    pub fn boundary(&self, i: usize) -> Result<Timestamp, SampleError> {
        self.cut_times
            .get(i)
            .copied()
            .ok_or(SampleError::IndexOutOfRange {
                index: i,
                len: self.len(),
            })
    }

    /// Volume completion rate assigned to view `i` for reporting.
    ///
    /// Volume sampling maps view `i` to `(i+1)*k / N`, clamped to 1; time
    /// sampling reports the realized post fraction.
    pub fn completion_rate(&self, i: usize) -> Result<f64, SampleError> {
        let n = self.conv.post_count() as f64;
        match self.policy {
            SamplingPolicy::FixedVolume { k } => {
                let count = self.cut_counts.get(i).ok_or(SampleError::IndexOutOfRange {
                    index: i,
                    len: self.len(),
                })?;
                let nominal = ((i + 1) * k) as f64 / n;
                debug_assert!(*count <= (i + 1) * k);
                Ok(nominal.min(1.0))
            }
            SamplingPolicy::FixedTime { .. } => Ok(self.post_count(i)? as f64 / n),
        }
    }

    /// Materialize the content-aware graph of view `i`: the view's posts,
    /// the hashtags they use, and all induced edges.
    pub fn snapshot_graph(&self, i: usize) -> Result<TypedGraph, SampleError> {
        let posts = self.post_ids(i)?;
        let graph = self.conv.graph();
        let mut ids: BTreeSet<String> = posts.iter().cloned().collect();
        for post in posts {
            for tag in graph.out_neighbors(post, Some(crate::graph::EdgeType::Usage)) {
                ids.insert(tag.to_string());
            }
        }
        Ok(graph.induced_subgraph(&ids)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeType, NodeType};
    use crate::ingest::{assemble, RawPost};

    fn star_conv(n: usize, step_ms: i64) -> Conversation {
        let posts: Vec<RawPost> = (0..n)
            .map(|i| RawPost {
                id: format!("p{i:04}"),
                conversation_id: "c".to_string(),
                created_at: Timestamp::from_millis(i as i64 * step_ms),
                in_reply_to: if i == 0 {
                    None
                } else {
                    Some("p0000".to_string())
                },
                hashtags: vec![],
                author_id: None,
                text: None,
            })
            .collect();
        assemble(posts, 1).conversations.pop().unwrap()
    }

    #[test]
    fn volume_sampling_sizes_with_remainder() {
        let conv = star_conv(12, 1000);
        let seq = sample(&conv, SamplingPolicy::FixedVolume { k: 5 }).unwrap();
        let sizes: Vec<usize> = (0..seq.len()).map(|i| seq.post_count(i).unwrap()).collect();
        assert_eq!(sizes, vec![5, 10, 12]);
    }

    #[test]
    fn time_sampling_one_post_per_window() {
        let conv = star_conv(3, 10_000);
        let seq = sample(
            &conv,
            SamplingPolicy::FixedTime {
                delta_millis: 10_000,
            },
        )
        .unwrap();
        let sizes: Vec<usize> = (0..seq.len()).map(|i| seq.post_count(i).unwrap()).collect();
        assert_eq!(sizes, vec![1, 2, 3]);
    }

    #[test]
    fn oversized_k_yields_single_full_view() {
        let conv = star_conv(4, 1000);
        let seq = sample(&conv, SamplingPolicy::FixedVolume { k: 100 }).unwrap();
        assert_eq!(seq.len(), 1);
        assert_eq!(seq.post_count(0).unwrap(), 4);
        assert_eq!(seq.completion_rate(0).unwrap(), 1.0);
    }

    #[test]
    fn single_post_conversation_has_one_view() {
        let conv = star_conv(1, 1000);
        let seq = sample(&conv, SamplingPolicy::FixedTime { delta_millis: 500 }).unwrap();
        assert_eq!(seq.len(), 1);
        assert_eq!(seq.post_count(0).unwrap(), 1);
    }

    #[test]
    fn last_snapshot_equals_full_graph() {
        let mut posts: Vec<RawPost> = (0..7)
            .map(|i| RawPost {
                id: format!("p{i}"),
                conversation_id: "c".to_string(),
                created_at: Timestamp::from_millis(i * 1000),
                in_reply_to: if i == 0 {
                    None
                } else {
                    Some(format!("p{}", i - 1))
                },
                hashtags: vec![],
                author_id: None,
                text: None,
            })
            .collect();
        posts[3].hashtags = vec!["topic".to_string()];
        let conv = assemble(posts, 1).conversations.pop().unwrap();
        let seq = sample(&conv, SamplingPolicy::FixedVolume { k: 3 }).unwrap();
        let last = seq.snapshot_graph(seq.len() - 1).unwrap();
        assert_eq!(last.node_count(), conv.graph().node_count());
        assert_eq!(last.edge_count(), conv.graph().edge_count());
    }

    #[test]
    fn first_view_holds_k_posts_and_their_hashtags() {
        let mut posts: Vec<RawPost> = (0..12)
            .map(|i| RawPost {
                id: format!("p{i:02}"),
                conversation_id: "c".to_string(),
                created_at: Timestamp::from_millis(i * 1000),
                in_reply_to: if i == 0 {
                    None
                } else {
                    Some("p00".to_string())
                },
                hashtags: vec![],
                author_id: None,
                text: None,
            })
            .collect();
        posts[2].hashtags = vec!["early".to_string()];
        posts[7].hashtags = vec!["late".to_string()];
        let conv = assemble(posts, 1).conversations.pop().unwrap();
        let seq = sample(&conv, SamplingPolicy::FixedVolume { k: 5 }).unwrap();
        let first = seq.snapshot_graph(0).unwrap();
        assert_eq!(first.nodes_of_type(NodeType::Post).count(), 5);
        assert!(first.contains_node("early"));
        // Hashtag first used by the rank-7 post must not be in the k=5 view.
        assert!(!first.contains_node("late"));
        assert_eq!(
            first
                .edges()
                .filter(|(_, _, ty)| *ty == EdgeType::Usage)
                .count(),
            1
        );
    }

    #[test]
    fn views_are_nested() {
        let conv = star_conv(23, 700);
        let seq = sample(&conv, SamplingPolicy::FixedVolume { k: 5 }).unwrap();
        for i in 0..seq.len() - 1 {
            let a = seq.post_ids(i).unwrap();
            let b = seq.post_ids(i + 1).unwrap();
            assert!(b.starts_with(a));
        }
    }

    #[test]
    fn volume_increments_are_k_until_final() {
        let conv = star_conv(23, 700);
        let seq = sample(&conv, SamplingPolicy::FixedVolume { k: 5 }).unwrap();
        let sizes: Vec<usize> = (0..seq.len()).map(|i| seq.post_count(i).unwrap()).collect();
        for w in sizes.windows(2) {
            let inc = w[1] - w[0];
            assert!(inc >= 1);
            if w[1] != 23 {
                assert_eq!(inc, 5);
            } else {
                assert!(inc <= 5);
            }
        }
        assert_eq!(sizes[0], 5);
        assert_eq!(*sizes.last().unwrap(), 23);
    }

    #[test]
    fn completion_rates_clamp_to_one() {
        let conv = star_conv(12, 1000);
        let seq = sample(&conv, SamplingPolicy::FixedVolume { k: 5 }).unwrap();
        let rates: Vec<f64> = (0..seq.len())
            .map(|i| seq.completion_rate(i).unwrap())
            .collect();
        assert_eq!(rates, vec![5.0 / 12.0, 10.0 / 12.0, 1.0]);
    }

    #[test]
    fn snapshot_edge_rule_requires_both_endpoints() {
        // Reply chain: each view's edges stay within the prefix.
        let posts: Vec<RawPost> = (0..6)
            .map(|i| RawPost {
                id: format!("p{i}"),
                conversation_id: "c".to_string(),
                created_at: Timestamp::from_millis(i * 1000),
                in_reply_to: if i == 0 {
                    None
                } else {
                    Some(format!("p{}", i - 1))
                },
                hashtags: vec![],
                author_id: None,
                text: None,
            })
            .collect();
        let conv = assemble(posts, 1).conversations.pop().unwrap();
        let seq = sample(&conv, SamplingPolicy::FixedVolume { k: 2 }).unwrap();
        for i in 0..seq.len() {
            let view = seq.snapshot_graph(i).unwrap();
            let members: BTreeSet<&str> = view.node_ids().collect();
            for (s, d, _) in view.edges() {
                assert!(members.contains(s) && members.contains(d));
            }
            // A chain prefix of m posts has exactly m-1 reply edges.
            assert_eq!(view.edge_count(), seq.post_count(i).unwrap() - 1);
        }
    }

    #[test]
    fn index_out_of_range_is_an_error() {
        let conv = star_conv(3, 1000);
        let seq = sample(&conv, SamplingPolicy::FixedVolume { k: 5 }).unwrap();
        assert!(matches!(
            seq.snapshot_graph(1),
            Err(SampleError::IndexOutOfRange { index: 1, len: 1 })
        ));
    }

    #[test]
    fn absurd_time_step_is_rejected() {
        // Two posts a year apart sampled every millisecond.
        let posts = vec![
            RawPost {
                id: "a".to_string(),
                conversation_id: "c".to_string(),
                created_at: Timestamp::from_millis(0),
                in_reply_to: None,
                hashtags: vec![],
                author_id: None,
                text: None,
            },
            RawPost {
                id: "b".to_string(),
                conversation_id: "c".to_string(),
                created_at: Timestamp::from_millis(365 * 86_400_000),
                in_reply_to: Some("a".to_string()),
                hashtags: vec![],
                author_id: None,
                text: None,
            },
        ];
        let conv = assemble(posts, 1).conversations.pop().unwrap();
        let err = sample(&conv, SamplingPolicy::FixedTime { delta_millis: 1 }).unwrap_err();
        assert!(matches!(err, SampleError::TooManySnapshots { .. }));
    }

    #[test]
    fn policy_parsing_round_trips() {
        assert_eq!(
            "volume:5".parse::<SamplingPolicy>().unwrap(),
            SamplingPolicy::FixedVolume { k: 5 }
        );
        assert_eq!(
            "time:2h".parse::<SamplingPolicy>().unwrap(),
            SamplingPolicy::FixedTime {
                delta_millis: 7_200_000
            }
        );
        assert!("volume:0".parse::<SamplingPolicy>().is_err());
        assert!("time:10".parse::<SamplingPolicy>().is_err());
        assert!("every:3".parse::<SamplingPolicy>().is_err());
    }

    #[test]
    fn empty_time_windows_repeat_previous_view() {
        // Posts at 0s and 95s with 10s windows: counts stay flat in between.
        let posts = vec![
            RawPost {
                id: "a".to_string(),
                conversation_id: "c".to_string(),
                created_at: Timestamp::from_millis(0),
                in_reply_to: None,
                hashtags: vec![],
                author_id: None,
                text: None,
            },
            RawPost {
                id: "b".to_string(),
                conversation_id: "c".to_string(),
                created_at: Timestamp::from_millis(95_000),
                in_reply_to: Some("a".to_string()),
                hashtags: vec![],
                author_id: None,
                text: None,
            },
        ];
        let conv = assemble(posts, 1).conversations.pop().unwrap();
        let seq = sample(
            &conv,
            SamplingPolicy::FixedTime {
                delta_millis: 10_000,
            },
        )
        .unwrap();
        assert_eq!(seq.len(), 10);
        let sizes: Vec<usize> = (0..seq.len()).map(|i| seq.post_count(i).unwrap()).collect();
        assert_eq!(sizes, vec![1, 1, 1, 1, 1, 1, 1, 1, 1, 2]);
    }
}
