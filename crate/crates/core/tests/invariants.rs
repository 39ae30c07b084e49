//! Property tests for the structural invariants that hold across modules.

use std::collections::BTreeSet;

use proptest::prelude::*;

use convograph::activity::{change_rate, model_value};
use convograph::graph::{Direction, EdgeType, NodeType, Timestamp};
use convograph::hijack::{classify, degree_series, takeover_histogram, HijackReport, Scenario};
use convograph::ingest::{assemble, Conversation, RawPost};
use convograph::sampler::{sample, SamplingPolicy};
use convograph::wiener::wiener_index;

/// Random conversation description: per non-seed post a parent pick (as a
/// fraction of the earlier posts), a timestamp gap, and an optional hashtag
/// from a small pool.
#[derive(Clone, Debug)]
struct ConvPlan {
    parent_picks: Vec<prop::sample::Index>,
    gaps_ms: Vec<i64>,
    tags: Vec<Option<u8>>,
}

fn conv_plan(max_posts: usize) -> impl Strategy<Value = ConvPlan> {
    (2..max_posts).prop_flat_map(|n| {
        (
            prop::collection::vec(any::<prop::sample::Index>(), n - 1),
            prop::collection::vec(0..2_000i64, n - 1),
            prop::collection::vec(prop::option::of(0..4u8), n),
        )
            .prop_map(|(parent_picks, gaps_ms, tags)| ConvPlan {
                parent_picks,
                gaps_ms,
                tags,
            })
    })
}

fn build_conversation(conv_id: &str, plan: &ConvPlan) -> Conversation {
    let n = plan.tags.len();
    let mut at = 0i64;
    let posts: Vec<RawPost> = (0..n)
        .map(|i| {
            if i > 0 {
                at += plan.gaps_ms[i - 1];
            }
            RawPost {
                id: format!("{conv_id}-p{i:04}"),
                conversation_id: conv_id.to_string(),
                created_at: Timestamp::from_millis(at),
                in_reply_to: (i > 0).then(|| {
                    let parent = plan.parent_picks[i - 1].index(i);
                    format!("{conv_id}-p{parent:04}")
                }),
                hashtags: plan.tags[i]
                    .map(|t| vec![format!("tag{t}")])
                    .into_iter()
                    .flatten()
                    .collect(),
                author_id: None,
                text: None,
            }
        })
        .collect();
    assemble(posts, 1)
        .conversations
        .pop()
        .expect("plan builds one conversation")
}

proptest! {
    /// Every edge fits the schema, every post has at most one outgoing
    /// reply, and exactly one post (the seed) has none.
    #[test]
    fn schema_soundness_and_single_root(plan in conv_plan(50)) {
        let conv = build_conversation("c", &plan);
        let graph = conv.graph();
        for (src, dst, ty) in graph.edges() {
            let triple = (graph.node_type(src).unwrap(), ty, graph.node_type(dst).unwrap());
            prop_assert!(
                triple == (NodeType::Post, EdgeType::Reply, NodeType::Post)
                    || triple == (NodeType::Post, EdgeType::Usage, NodeType::Hashtag)
            );
        }
        let mut roots = 0;
        for post in graph.nodes_of_type(NodeType::Post) {
            let out = graph.degree(post, Some(EdgeType::Reply), Direction::Out).unwrap();
            prop_assert!(out <= 1);
            if out == 0 {
                roots += 1;
                prop_assert_eq!(post, conv.seed_id());
            }
        }
        prop_assert_eq!(roots, 1);
    }

    /// Growing the node set never removes induced edges.
    #[test]
    fn induced_subgraph_is_monotone(plan in conv_plan(40), split in any::<prop::sample::Index>()) {
        let conv = build_conversation("c", &plan);
        let graph = conv.graph();
        let all: Vec<String> = graph.node_ids().map(String::from).collect();
        let cut = split.index(all.len());
        let small: BTreeSet<String> = all[..cut].iter().cloned().collect();
        let large: BTreeSet<String> = all.iter().cloned().collect();
        let sub_small = graph.induced_subgraph(&small).unwrap();
        let sub_large = graph.induced_subgraph(&large).unwrap();
        let edges_small: BTreeSet<(String, String, EdgeType)> = sub_small
            .edges()
            .map(|(s, d, t)| (s.to_string(), d.to_string(), t))
            .collect();
        let edges_large: BTreeSet<(String, String, EdgeType)> = sub_large
            .edges()
            .map(|(s, d, t)| (s.to_string(), d.to_string(), t))
            .collect();
        prop_assert!(edges_small.is_subset(&edges_large));
    }

    /// Components are disjoint, cover every node, and sizes sum to |V|.
    #[test]
    fn wcc_is_a_partition(plan in conv_plan(40), restrict in prop::option::of(prop::bool::ANY)) {
        let conv = build_conversation("c", &plan);
        let graph = conv.graph();
        let filter = restrict.map(|reply| if reply { EdgeType::Reply } else { EdgeType::Usage });
        let comps = graph.weakly_connected_components(filter);
        let total: usize = comps.iter().map(|c| c.len()).sum();
        prop_assert_eq!(total, graph.node_count());
        let mut seen = BTreeSet::new();
        for comp in &comps {
            prop_assert!(!comp.is_empty());
            for id in comp {
                prop_assert!(seen.insert(id.clone()));
            }
        }
        for pair in comps.windows(2) {
            prop_assert!(pair[0].len() >= pair[1].len());
        }
    }

    /// Snapshot views nest, volume increments equal k except the last, and
    /// the final view reproduces the conversation graph exactly.
    #[test]
    fn snapshot_nesting_and_completeness(plan in conv_plan(50), k in 1usize..10) {
        let conv = build_conversation("c", &plan);
        let seq = sample(&conv, SamplingPolicy::FixedVolume { k }).unwrap();
        let n = conv.post_count();
        let mut prev: Option<BTreeSet<&str>> = None;
        for i in 0..seq.len() {
            let view: BTreeSet<&str> = seq.post_ids(i).unwrap().iter().map(String::as_str).collect();
            if let Some(prev) = &prev {
                prop_assert!(prev.is_subset(&view));
                let inc = view.len() - prev.len();
                if i + 1 < seq.len() {
                    prop_assert_eq!(inc, k);
                } else {
                    prop_assert!(inc >= 1 && inc <= k);
                }
            } else {
                prop_assert_eq!(view.len(), k.min(n));
            }
            prev = Some(view);
        }
        let last = seq.snapshot_graph(seq.len() - 1).unwrap();
        prop_assert_eq!(last.node_count(), conv.graph().node_count());
        prop_assert_eq!(last.edge_count(), conv.graph().edge_count());

        // Edge rule: a view edge exists iff both endpoints are in the view.
        let mid = seq.len() / 2;
        let view = seq.snapshot_graph(mid).unwrap();
        let members: BTreeSet<&str> = view.node_ids().collect();
        let mut in_view: BTreeSet<(String, String, EdgeType)> = BTreeSet::new();
        for (s, d, t) in view.edges() {
            prop_assert!(members.contains(s) && members.contains(d));
            in_view.insert((s.to_string(), d.to_string(), t));
        }
        for (s, d, t) in conv.graph().edges() {
            if members.contains(s) && members.contains(d) {
                prop_assert!(in_view.contains(&(s.to_string(), d.to_string(), t)));
            }
        }
    }

    /// Grouping never assigns one post to two conversations.
    #[test]
    fn no_post_in_two_conversations(plan_a in conv_plan(20), plan_b in conv_plan(20)) {
        let mut posts = Vec::new();
        for (conv_id, plan) in [("ca", &plan_a), ("cb", &plan_b)] {
            let built = build_conversation(conv_id, plan);
            for id in built.posts_by_time() {
                posts.push(RawPost {
                    id: id.clone(),
                    conversation_id: conv_id.to_string(),
                    created_at: built.graph().timestamp(id).unwrap(),
                    in_reply_to: built.graph().reply_parent(id).map(String::from),
                    hashtags: vec![],
                    author_id: None,
                    text: None,
                });
            }
        }
        let outcome = assemble(posts, 1);
        let mut seen = BTreeSet::new();
        for conv in &outcome.conversations {
            for id in conv.posts_by_time() {
                prop_assert!(seen.insert(id.clone()), "post {} in two conversations", id);
            }
        }
    }

    /// The analytic change rate matches a central finite difference.
    #[test]
    fn change_rate_matches_finite_difference(alpha in 0.1f64..100.0, t in 0.01f64..0.99) {
        let h = 1e-6;
        let fd = (model_value(alpha, t + h).unwrap() - model_value(alpha, t - h).unwrap()) / (2.0 * h);
        prop_assert!((change_rate(alpha, t).unwrap() - fd).abs() < 1e-6);
    }

    /// Model values stay in [0, 1) and gamma marks the 1 - 1/e point.
    #[test]
    fn gamma_identity(alpha in 0.1f64..1000.0) {
        let gamma = 1.0 / alpha;
        if gamma <= 1.0 {
            let v = model_value(alpha, gamma).unwrap();
            prop_assert!((v - (1.0 - std::f64::consts::E.recip())).abs() < 1e-12);
        }
        let v = model_value(alpha, 1.0).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
        // Strictly below 1 wherever the gap is representable in f64.
        if alpha < 36.0 {
            prop_assert!(v < 1.0);
        }
    }

    /// Every hashtag's degree series is nondecreasing.
    #[test]
    fn degree_series_is_monotone(plan in conv_plan(40), k in 1usize..8) {
        let conv = build_conversation("c", &plan);
        let seq = sample(&conv, SamplingPolicy::FixedVolume { k }).unwrap();
        for series in degree_series(&conv, &seq) {
            for w in series.degrees.windows(2) {
                prop_assert!(w[1] >= w[0]);
            }
        }
    }

    /// Classification assigns exactly one scenario, and eligible inputs
    /// never come out ineligible.
    #[test]
    fn classification_partitions_eligible_inputs(plan in conv_plan(40), k in 1usize..8) {
        let conv = build_conversation("c", &plan);
        let seq = sample(&conv, SamplingPolicy::FixedVolume { k }).unwrap();
        let report = classify(&conv, &seq, 2);
        match report.scenario {
            Scenario::Ineligible => prop_assert!(!report.eligible),
            Scenario::Hijacking => prop_assert!(report.first_overtake.is_some() && report.last_retake.is_none()),
            Scenario::FailedHijacking => {
                prop_assert!(report.first_overtake.is_some() && report.last_retake.is_some());
                prop_assert!(report.first_overtake.unwrap() <= report.last_retake.unwrap());
            }
            Scenario::NoHijacking => prop_assert!(report.first_overtake.is_none() && report.last_retake.is_none()),
        }
    }

    /// Nonempty histogram rows always sum to one.
    #[test]
    fn histogram_rows_are_normalized(
        overtakes in prop::collection::vec((0.0f64..=1.0, prop::bool::ANY), 0..40),
        bins in 1usize..40,
    ) {
        let reports: Vec<HijackReport> = overtakes
            .iter()
            .enumerate()
            .map(|(i, &(rate, failed))| HijackReport {
                conversation_id: format!("c{i}"),
                eligible: true,
                scenario: if failed { Scenario::FailedHijacking } else { Scenario::Hijacking },
                initial_hashtags: BTreeSet::new(),
                first_overtake: Some(rate),
                last_retake: failed.then_some((rate + 0.1).min(1.0)),
                final_dominant: None,
            })
            .collect();
        let hist = takeover_histogram(&reports, bins).unwrap();
        for (_, row) in hist.rows() {
            let sum: f64 = row.probabilities.iter().sum();
            if row.is_empty() {
                prop_assert_eq!(sum, 0.0);
            } else {
                prop_assert!((sum - 1.0).abs() < 1e-9);
            }
        }
    }

    /// Wiener index equals the brute-force oracle on random reply trees.
    #[test]
    fn wiener_matches_oracle_on_random_trees(plan in conv_plan(30)) {
        let conv = build_conversation("c", &plan);
        let graph = conv.graph();
        let got = wiener_index(graph).unwrap();

        // Oracle: directed all-pairs via each node's ancestor chain walk.
        let posts: Vec<&str> = graph.nodes_of_type(NodeType::Post).collect();
        let mut total: u64 = 0;
        for &post in &posts {
            let mut cursor = post;
            let mut hops = 0u64;
            while let Some(parent) = graph.reply_parent(cursor) {
                hops += 1;
                total += hops;
                cursor = parent;
            }
        }
        let n = posts.len() as f64;
        let want = total as f64 / (n * (n - 1.0));
        prop_assert!((got - want).abs() <= 1e-12);
    }
}
