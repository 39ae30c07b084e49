//! Raw post parsing and conversation assembly.
//!
//! Two line-delimited input formats are supported: the canonical flat format
//! (one JSON record per line with `id`, `conversation_id`, `created_at`,
//! optional `in_reply_to`, `hashtags`, `author_id`, `text`) and raw Twitter
//! API v2 tweet objects, where the parent comes from the `referenced_tweets`
//! entry of type `replied_to` and hashtags from `entities.hashtags[].tag`.
//!
//! [`assemble`] groups posts by conversation id, keeps the largest weakly
//! connected component of each reply graph, drops conversations below the
//! minimum size and attaches hashtag nodes with usage edges.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeType, NodeType, Timestamp, TypedGraph};

/// One ingested post record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawPost {
    pub id: String,
    pub conversation_id: String,
    pub created_at: Timestamp,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub in_reply_to: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hashtags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

/// Per-line parse failure; parsing continues past these.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseDiagnostic {
    /// 1-based input line number.
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct ParseOutcome {
    pub posts: Vec<RawPost>,
    pub diagnostics: Vec<ParseDiagnostic>,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("input stream unreadable: {0}")]
    Io(#[from] std::io::Error),
    #[error("conversation `{id}` is invalid: {reason}")]
    InvalidConversation { id: String, reason: String },
}

/// Strip one leading `#` and lowercase (Unicode-aware).
pub fn normalize_hashtag(raw: &str) -> String {
    raw.strip_prefix('#').unwrap_or(raw).to_lowercase()
}

/// Normalized hashtag ids used by a post, deduplicated.
pub fn extract_content(post: &RawPost) -> BTreeSet<String> {
    post.hashtags
        .iter()
        .map(|tag| normalize_hashtag(tag))
        .filter(|tag| !tag.is_empty())
        .collect()
}

fn normalize_post(mut post: RawPost) -> Result<RawPost, String> {
    if post.id.is_empty() {
        return Err("missing or empty `id`".to_string());
    }
    if post.conversation_id.is_empty() {
        return Err("missing or empty `conversation_id`".to_string());
    }
    post.hashtags = post
        .hashtags
        .iter()
        .map(|tag| normalize_hashtag(tag))
        .filter(|tag| !tag.is_empty())
        .collect();
    Ok(post)
}

/// Parse one canonical flat-format record.
pub fn parse_canonical_line(line: &str) -> Result<RawPost, String> {
    serde_json::from_str::<RawPost>(line)
        .map_err(|e| e.to_string())
        .and_then(normalize_post)
}

/// Parse canonical flat-format records, one JSON object per line.
///
/// Well-formed records are returned in input order; malformed lines are
/// reported with their line number and skipped. Blank lines are ignored.
pub fn parse_canonical(reader: impl BufRead) -> Result<ParseOutcome, IngestError> {
    parse_lines(reader, parse_canonical_line)
}

#[derive(Deserialize)]
struct TweetV2 {
    id: String,
    conversation_id: String,
    created_at: Timestamp,
    #[serde(default)]
    referenced_tweets: Vec<ReferencedTweet>,
    #[serde(default)]
    entities: Option<EntitiesV2>,
    #[serde(default)]
    author_id: Option<String>,
    #[serde(default)]
    text: Option<String>,
}

#[derive(Deserialize)]
struct ReferencedTweet {
    #[serde(rename = "type")]
    kind: String,
    id: String,
}

#[derive(Default, Deserialize)]
struct EntitiesV2 {
    #[serde(default)]
    hashtags: Vec<HashtagEntity>,
}

#[derive(Deserialize)]
struct HashtagEntity {
    tag: String,
}

/// Parse one raw Twitter API v2 tweet object.
///
/// The parent post is the `referenced_tweets` entry whose type is
/// `replied_to`; quoted or retweeted references are ignored.
pub fn parse_twitter_v2_line(line: &str) -> Result<RawPost, String> {
    let tweet: TweetV2 = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let in_reply_to = tweet
        .referenced_tweets
        .iter()
        .find(|r| r.kind == "replied_to")
        .map(|r| r.id.clone());
    normalize_post(RawPost {
        id: tweet.id,
        conversation_id: tweet.conversation_id,
        created_at: tweet.created_at,
        in_reply_to,
        hashtags: tweet
            .entities
            .unwrap_or_default()
            .hashtags
            .into_iter()
            .map(|h| h.tag)
            .collect(),
        author_id: tweet.author_id,
        text: tweet.text,
    })
}

/// Parse raw Twitter API v2 tweet objects, one per line.
pub fn parse_twitter_v2(reader: impl BufRead) -> Result<ParseOutcome, IngestError> {
    parse_lines(reader, parse_twitter_v2_line)
}

fn parse_lines(
    reader: impl BufRead,
    parse: impl Fn(&str) -> Result<RawPost, String>,
) -> Result<ParseOutcome, IngestError> {
    let mut outcome = ParseOutcome::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match parse(&line) {
            Ok(post) => outcome.posts.push(post),
            Err(message) => outcome.diagnostics.push(ParseDiagnostic {
                line: idx + 1,
                message,
            }),
        }
    }
    Ok(outcome)
}

/// Data-quality anomalies tolerated during assembly; the conversation is
/// kept but marked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConversationFlag {
    /// A reply cycle was broken by dropping the earliest cycle post's
    /// outgoing reply, making that post the seed.
    CycleBroken,
    /// More than one reply root survived filtering; the earliest was chosen.
    MultipleRoots,
    /// The seed is not the earliest-timestamped retained post.
    SeedNotEarliest,
}

impl std::fmt::Display for ConversationFlag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConversationFlag::CycleBroken => write!(f, "cycle_broken"),
            ConversationFlag::MultipleRoots => write!(f, "multiple_roots"),
            ConversationFlag::SeedNotEarliest => write!(f, "seed_not_earliest"),
        }
    }
}

/// An assembled conversation: reply tree plus hashtag nodes and usage edges.
#[derive(Clone, Debug)]
pub struct Conversation {
    id: String,
    seed_id: String,
    graph: TypedGraph,
    t_first: Timestamp,
    t_last: Timestamp,
    posts_by_time: Vec<String>,
    flags: Vec<ConversationFlag>,
}

impl Conversation {
    /// Wrap an already-built content-aware graph.
    ///
    /// The graph must contain at least one post and its reply edges must form
    /// a single tree (exactly one post without an outgoing reply).
    pub fn from_graph(id: impl Into<String>, graph: TypedGraph) -> Result<Self, IngestError> {
        let id = id.into();
        let mut posts: Vec<(Timestamp, String)> = graph
            .nodes_of_type(NodeType::Post)
            .map(|p| {
                (
                    graph.timestamp(p).expect("posts carry timestamps"),
                    p.to_string(),
                )
            })
            .collect();
        if posts.is_empty() {
            return Err(IngestError::InvalidConversation {
                id,
                reason: "no post nodes".to_string(),
            });
        }
        posts.sort();
        let roots: Vec<&str> = graph
            .nodes_of_type(NodeType::Post)
            .filter(|p| graph.reply_parent(p).is_none())
            .collect();
        if roots.len() != 1 {
            return Err(IngestError::InvalidConversation {
                id,
                reason: format!("expected exactly one reply root, found {}", roots.len()),
            });
        }
        let reply_edges = graph
            .edges()
            .filter(|(_, _, ty)| *ty == EdgeType::Reply)
            .count();
        if reply_edges + 1 != posts.len() {
            return Err(IngestError::InvalidConversation {
                id,
                reason: format!(
                    "reply graph is not a tree: {} posts, {} reply edges",
                    posts.len(),
                    reply_edges
                ),
            });
        }
        let seed_id = roots[0].to_string();
        let t_first = posts[0].0;
        let t_last = posts[posts.len() - 1].0;
        let mut flags = Vec::new();
        if seed_id != posts[0].1 {
            flags.push(ConversationFlag::SeedNotEarliest);
        }
        Ok(Conversation {
            id,
            seed_id,
            graph,
            t_first,
            t_last,
            posts_by_time: posts.into_iter().map(|(_, p)| p).collect(),
            flags,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn seed_id(&self) -> &str {
        &self.seed_id
    }

    pub fn graph(&self) -> &TypedGraph {
        &self.graph
    }

    pub fn t_first(&self) -> Timestamp {
        self.t_first
    }

    pub fn t_last(&self) -> Timestamp {
        self.t_last
    }

    pub fn flags(&self) -> &[ConversationFlag] {
        &self.flags
    }

    pub fn post_count(&self) -> usize {
        self.posts_by_time.len()
    }

    pub fn hashtag_count(&self) -> usize {
        self.graph.nodes_of_type(NodeType::Hashtag).count()
    }

    /// Post ids ordered by (timestamp, id) ascending.
    pub fn posts_by_time(&self) -> &[String] {
        &self.posts_by_time
    }
}

/// Drop and repair counters from [`assemble`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AssembleStats {
    /// Conversation-id groups seen in the input.
    pub groups: usize,
    /// Conversations surviving all filters.
    pub retained: usize,
    /// Groups dropped for falling below the minimum size.
    pub dropped_small: usize,
    /// Posts discarded because they fell outside the giant component.
    pub dropped_fragment_posts: usize,
    /// Records discarded as duplicates of an already-seen post id.
    pub duplicate_posts: usize,
    /// Reply references pointing outside the group (treated as parentless).
    pub missing_parents: usize,
    /// Posts replying to themselves (treated as parentless).
    pub self_replies: usize,
    /// Retained conversations carrying at least one data-quality flag.
    pub flagged: usize,
}

impl AssembleStats {
    /// Fold counters from another run in (used when assembling group by
    /// group).
    pub fn merge(&mut self, other: &AssembleStats) {
        self.groups += other.groups;
        self.retained += other.retained;
        self.dropped_small += other.dropped_small;
        self.dropped_fragment_posts += other.dropped_fragment_posts;
        self.duplicate_posts += other.duplicate_posts;
        self.missing_parents += other.missing_parents;
        self.self_replies += other.self_replies;
        self.flagged += other.flagged;
    }
}

#[derive(Debug)]
pub struct AssembleOutcome {
    pub conversations: Vec<Conversation>,
    pub stats: AssembleStats,
}

/// Group posts into conversations and apply the data-quality filters.
///
/// Per conversation id: reply edges are added where both endpoints are in
/// the group, only the largest weakly connected component is kept (ties
/// broken by the component containing the earliest post), groups smaller
/// than `min_size` after filtering are dropped, and hashtag nodes plus
/// usage edges are attached from each retained post.
pub fn assemble(posts: Vec<RawPost>, min_size: usize) -> AssembleOutcome {
    let mut groups: BTreeMap<String, Vec<RawPost>> = BTreeMap::new();
    for post in posts {
        groups
            .entry(post.conversation_id.clone())
            .or_default()
            .push(post);
    }

    let mut stats = AssembleStats {
        groups: groups.len(),
        ..AssembleStats::default()
    };
    let mut conversations = Vec::new();

    for (conv_id, mut records) in groups {
        // Order-independent dedup: earliest (created_at, id) record wins.
        records.sort_by(|a, b| (a.created_at, &a.id).cmp(&(b.created_at, &b.id)));
        let mut by_id: BTreeMap<String, RawPost> = BTreeMap::new();
        for record in records {
            if by_id.contains_key(&record.id) {
                stats.duplicate_posts += 1;
            } else {
                by_id.insert(record.id.clone(), record);
            }
        }

        let mut reply_graph = TypedGraph::new();
        for (id, post) in &by_id {
            reply_graph
                .add_node(id.clone(), NodeType::Post, Some(post.created_at))
                .expect("ids deduplicated");
        }
        for (id, post) in &by_id {
            match post.in_reply_to.as_deref() {
                None => {}
                Some(parent) if parent == id => stats.self_replies += 1,
                Some(parent) if !by_id.contains_key(parent) => stats.missing_parents += 1,
                Some(parent) => reply_graph
                    .add_edge(id, parent, EdgeType::Reply)
                    .expect("schema and uniqueness hold by construction"),
            }
        }

        let components = reply_graph.weakly_connected_components(Some(EdgeType::Reply));
        let giant = match select_giant(&reply_graph, components) {
            Some(giant) => giant,
            None => continue,
        };
        stats.dropped_fragment_posts += by_id.len() - giant.len();
        if giant.len() < min_size {
            stats.dropped_small += 1;
            continue;
        }

        let mut graph = reply_graph
            .induced_subgraph(&giant)
            .expect("component ids come from the graph");
        let mut flags = Vec::new();
        let seed_id = resolve_seed(&mut graph, &mut flags);

        for id in &giant {
            let post = &by_id[id];
            for tag in extract_content(post) {
                if !graph.contains_node(&tag) {
                    graph
                        .add_node_with_label(
                            tag.clone(),
                            NodeType::Hashtag,
                            None,
                            Some(tag.clone()),
                        )
                        .expect("hashtag ids are fresh here");
                }
                graph
                    .add_edge(id, &tag, EdgeType::Usage)
                    .expect("usage edges deduplicated per post");
            }
        }

        let mut conv = Conversation::from_graph(conv_id, graph)
            .expect("assembled graph satisfies conversation invariants");
        debug_assert_eq!(conv.seed_id, seed_id);
        flags.extend(conv.flags.iter().copied());
        flags.sort();
        flags.dedup();
        conv.flags = flags;
        if !conv.flags.is_empty() {
            stats.flagged += 1;
        }
        stats.retained += 1;
        conversations.push(conv);
    }

    AssembleOutcome {
        conversations,
        stats,
    }
}

/// Largest component; ties broken by the one containing the earliest post.
fn select_giant(graph: &TypedGraph, components: Vec<BTreeSet<String>>) -> Option<BTreeSet<String>> {
    components.into_iter().min_by_key(|c| {
        let earliest = c
            .iter()
            .map(|id| {
                (
                    graph.timestamp(id).expect("posts carry timestamps"),
                    id.clone(),
                )
            })
            .min()
            .expect("components are nonempty");
        (std::cmp::Reverse(c.len()), earliest)
    })
}

/// Identify the seed post, repairing a reply cycle if one exists.
///
/// With at most one outgoing reply per post, a weakly connected component is
/// either a tree (one root) or carries exactly one cycle (no root). In the
/// cycle case the earliest cycle post's outgoing reply is dropped and the
/// conversation flagged.
fn resolve_seed(graph: &mut TypedGraph, flags: &mut Vec<ConversationFlag>) -> String {
    let roots: Vec<String> = graph
        .nodes_of_type(NodeType::Post)
        .filter(|p| graph.reply_parent(p).is_none())
        .map(String::from)
        .collect();
    match roots.len() {
        1 => roots.into_iter().next().unwrap(),
        0 => {
            let cycle = find_reply_cycle(graph);
            let breakpoint = cycle
                .into_iter()
                .map(|id| (graph.timestamp(&id).expect("posts carry timestamps"), id))
                .min()
                .map(|(_, id)| id)
                .expect("rootless reply graph contains a cycle");
            remove_reply_edge(graph, &breakpoint);
            flags.push(ConversationFlag::CycleBroken);
            breakpoint
        }
        _ => {
            // Unreachable for weakly connected reply graphs; kept as a guard.
            flags.push(ConversationFlag::MultipleRoots);
            roots
                .into_iter()
                .map(|id| (graph.timestamp(&id).expect("posts carry timestamps"), id))
                .min()
                .map(|(_, id)| id)
                .unwrap()
        }
    }
}

fn find_reply_cycle(graph: &TypedGraph) -> Vec<String> {
    // Follow parent pointers from any node; the walk must enter the cycle.
    let start = graph
        .nodes_of_type(NodeType::Post)
        .next()
        .expect("nonempty component")
        .to_string();
    let mut seen = BTreeSet::new();
    let mut cursor = start;
    while seen.insert(cursor.clone()) {
        cursor = graph
            .reply_parent(&cursor)
            .expect("rootless graph: every post has a parent")
            .to_string();
    }
    // `cursor` is on the cycle; walk it once more to collect members.
    let mut cycle = vec![cursor.clone()];
    let mut walk = graph.reply_parent(&cursor).unwrap().to_string();
    while walk != cursor {
        cycle.push(walk.clone());
        walk = graph.reply_parent(&walk).unwrap().to_string();
    }
    cycle
}

fn remove_reply_edge(graph: &mut TypedGraph, src: &str) {
    // Rebuild without the one edge; TypedGraph is append-only by design.
    let mut rebuilt = TypedGraph::new();
    for id in graph.node_ids() {
        rebuilt
            .add_node_with_label(
                id,
                graph.node_type(id).unwrap(),
                graph.timestamp(id),
                graph.label(id).map(String::from),
            )
            .unwrap();
    }
    for (s, d, ty) in graph.edges() {
        if ty == EdgeType::Reply && s == src {
            continue;
        }
        rebuilt.add_edge(s, d, ty).unwrap();
    }
    *graph = rebuilt;
}
