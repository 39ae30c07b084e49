//! Typed directed multigraph with node timestamps.
//!
//! Nodes are opaque string ids carrying a [`NodeType`]; edges carry an
//! [`EdgeType`]. The schema is fixed: `reply` edges connect post -> post,
//! `usage` edges connect post -> hashtag. Every post node has a timestamp.
//! Iteration order is sorted by id everywhere so downstream outputs are
//! reproducible byte for byte.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Node type mapping codomain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeType {
    Post,
    Hashtag,
}

impl fmt::Display for NodeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeType::Post => write!(f, "post"),
            NodeType::Hashtag => write!(f, "hashtag"),
        }
    }
}

/// Edge type mapping codomain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeType {
    Reply,
    Usage,
}

impl fmt::Display for EdgeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeType::Reply => write!(f, "reply"),
            EdgeType::Usage => write!(f, "usage"),
        }
    }
}

/// Edge direction filter for degree queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    In,
    Out,
    All,
}

/// UTC instant at millisecond precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(i64);

impl Timestamp {
    pub const fn from_millis(ms: i64) -> Self {
        Timestamp(ms)
    }

    pub const fn millis(self) -> i64 {
        self.0
    }

    /// Parse an ISO-8601 / RFC 3339 instant, truncating to milliseconds.
    pub fn parse_rfc3339(s: &str) -> Result<Self, GraphError> {
        DateTime::parse_from_rfc3339(s)
            .map(|dt| Timestamp(dt.timestamp_millis()))
            .map_err(|e| GraphError::InvalidTimestamp {
                value: s.to_string(),
                reason: e.to_string(),
            })
    }

    pub fn to_rfc3339(self) -> String {
        match DateTime::<Utc>::from_timestamp_millis(self.0) {
            Some(dt) => dt.format("%Y-%m-%dT%H:%M:%S%.3fZ").to_string(),
            None => format!("{}ms", self.0),
        }
    }

    pub fn saturating_add_millis(self, ms: i64) -> Self {
        Timestamp(self.0.saturating_add(ms))
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_rfc3339())
    }
}

impl Serialize for Timestamp {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_rfc3339())
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Timestamp::parse_rfc3339(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("unknown node id `{0}`")]
    UnknownNode(String),
    #[error("post node `{0}` requires a timestamp")]
    PostWithoutTimestamp(String),
    #[error("schema violation: ({src_type}, {edge_type}, {dst_type}) is not an allowed edge for `{src}` -> `{dst}`")]
    SchemaViolation {
        src: String,
        dst: String,
        edge_type: EdgeType,
        src_type: NodeType,
        dst_type: NodeType,
    },
    #[error("reply edge from `{0}` to itself is not allowed")]
    ReplyToSelf(String),
    #[error("duplicate {edge_type} edge `{src}` -> `{dst}`")]
    DuplicateEdge {
        src: String,
        dst: String,
        edge_type: EdgeType,
    },
    #[error("post `{src}` already replies to `{existing}`; a post has at most one outgoing reply")]
    SecondReply { src: String, existing: String },
    #[error("invalid timestamp `{value}`: {reason}")]
    InvalidTimestamp { value: String, reason: String },
}

#[derive(Clone, Debug, Default)]
struct NodeInfo {
    node_type: Option<NodeType>,
    timestamp: Option<Timestamp>,
    label: Option<String>,
}

/// Directed graph with typed nodes and edges and per-node timestamps.
///
/// Construction is single-writer; afterwards the graph is read-only and can
/// be shared freely across threads.
#[derive(Clone, Debug, Default)]
pub struct TypedGraph {
    nodes: BTreeMap<String, NodeInfo>,
    out_edges: BTreeMap<String, BTreeSet<(String, EdgeType)>>,
    in_edges: BTreeMap<String, BTreeSet<(String, EdgeType)>>,
    edge_count: usize,
}

impl TypedGraph {
    pub fn new() -> Self {
        TypedGraph::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains_node(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn node_type(&self, id: &str) -> Option<NodeType> {
        self.nodes.get(id).and_then(|n| n.node_type)
    }

    pub fn timestamp(&self, id: &str) -> Option<Timestamp> {
        self.nodes.get(id).and_then(|n| n.timestamp)
    }

    pub fn label(&self, id: &str) -> Option<&str> {
        self.nodes.get(id).and_then(|n| n.label.as_deref())
    }

    /// All node ids, ascending.
    pub fn node_ids(&self) -> impl Iterator<Item = &str> {
        self.nodes.keys().map(String::as_str)
    }

    /// Node ids of one type, ascending.
    pub fn nodes_of_type(&self, ty: NodeType) -> impl Iterator<Item = &str> {
        self.nodes
            .iter()
            .filter(move |(_, info)| info.node_type == Some(ty))
            .map(|(id, _)| id.as_str())
    }

    /// All edges as (src, dst, type), sorted by (src, dst, type).
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, EdgeType)> {
        self.out_edges.iter().flat_map(|(src, dsts)| {
            dsts.iter()
                .map(move |(dst, ty)| (src.as_str(), dst.as_str(), *ty))
        })
    }

    pub fn add_node(
        &mut self,
        id: impl Into<String>,
        node_type: NodeType,
        timestamp: Option<Timestamp>,
    ) -> Result<(), GraphError> {
        self.add_node_with_label(id, node_type, timestamp, None)
    }

    pub fn add_node_with_label(
        &mut self,
        id: impl Into<String>,
        node_type: NodeType,
        timestamp: Option<Timestamp>,
        label: Option<String>,
    ) -> Result<(), GraphError> {
        let id = id.into();
        if self.nodes.contains_key(&id) {
            return Err(GraphError::DuplicateNode(id));
        }
        if node_type == NodeType::Post && timestamp.is_none() {
            return Err(GraphError::PostWithoutTimestamp(id));
        }
        self.nodes.insert(
            id,
            NodeInfo {
                node_type: Some(node_type),
                timestamp,
                label,
            },
        );
        Ok(())
    }

    pub fn add_edge(
        &mut self,
        src: &str,
        dst: &str,
        edge_type: EdgeType,
    ) -> Result<(), GraphError> {
        let src_type = self
            .node_type(src)
            .ok_or_else(|| GraphError::UnknownNode(src.to_string()))?;
        let dst_type = self
            .node_type(dst)
            .ok_or_else(|| GraphError::UnknownNode(dst.to_string()))?;
        let allowed = matches!(
            (src_type, edge_type, dst_type),
            (NodeType::Post, EdgeType::Reply, NodeType::Post)
                | (NodeType::Post, EdgeType::Usage, NodeType::Hashtag)
        );
        if !allowed {
            return Err(GraphError::SchemaViolation {
                src: src.to_string(),
                dst: dst.to_string(),
                edge_type,
                src_type,
                dst_type,
            });
        }
        if edge_type == EdgeType::Reply {
            if src == dst {
                return Err(GraphError::ReplyToSelf(src.to_string()));
            }
            if let Some(existing) = self.reply_parent(src) {
                return Err(GraphError::SecondReply {
                    src: src.to_string(),
                    existing: existing.to_string(),
                });
            }
        }
        let key = (dst.to_string(), edge_type);
        let out = self.out_edges.entry(src.to_string()).or_default();
        if !out.insert(key) {
            return Err(GraphError::DuplicateEdge {
                src: src.to_string(),
                dst: dst.to_string(),
                edge_type,
            });
        }
        self.in_edges
            .entry(dst.to_string())
            .or_default()
            .insert((src.to_string(), edge_type));
        self.edge_count += 1;
        Ok(())
    }

    /// Parent of a post along its (unique) outgoing reply edge.
    pub fn reply_parent(&self, id: &str) -> Option<&str> {
        self.out_edges.get(id).and_then(|dsts| {
            dsts.iter()
                .find(|(_, ty)| *ty == EdgeType::Reply)
                .map(|(dst, _)| dst.as_str())
        })
    }

    /// Out-neighbors of `id`, optionally filtered by edge type, ascending.
    pub fn out_neighbors<'a>(
        &'a self,
        id: &str,
        edge_type: Option<EdgeType>,
    ) -> impl Iterator<Item = &'a str> {
        self.out_edges.get(id).into_iter().flat_map(move |dsts| {
            dsts.iter()
                .filter(move |(_, ty)| edge_type.is_none() || edge_type == Some(*ty))
                .map(|(dst, _)| dst.as_str())
        })
    }

    /// In-neighbors of `id`, optionally filtered by edge type, ascending.
    pub fn in_neighbors<'a>(
        &'a self,
        id: &str,
        edge_type: Option<EdgeType>,
    ) -> impl Iterator<Item = &'a str> {
        self.in_edges.get(id).into_iter().flat_map(move |srcs| {
            srcs.iter()
                .filter(move |(_, ty)| edge_type.is_none() || edge_type == Some(*ty))
                .map(|(src, _)| src.as_str())
        })
    }

    /// Number of incident edges matching the filter.
    pub fn degree(
        &self,
        id: &str,
        edge_type: Option<EdgeType>,
        direction: Direction,
    ) -> Result<usize, GraphError> {
        if !self.contains_node(id) {
            return Err(GraphError::UnknownNode(id.to_string()));
        }
        let count = |edges: &BTreeMap<String, BTreeSet<(String, EdgeType)>>| {
            edges.get(id).map_or(0, |set| {
                set.iter()
                    .filter(|(_, ty)| edge_type.is_none() || edge_type == Some(*ty))
                    .count()
            })
        };
        Ok(match direction {
            Direction::In => count(&self.in_edges),
            Direction::Out => count(&self.out_edges),
            Direction::All => count(&self.in_edges) + count(&self.out_edges),
        })
    }

    /// Weakly connected components, optionally over edges of one type only.
    ///
    /// Components are ordered by (size descending, smallest member id
    /// ascending); each component is itself a sorted set.
    pub fn weakly_connected_components(&self, restrict: Option<EdgeType>) -> Vec<BTreeSet<String>> {
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut components = Vec::new();
        for start in self.nodes.keys() {
            if seen.contains(start.as_str()) {
                continue;
            }
            let mut component = BTreeSet::new();
            let mut queue = VecDeque::new();
            queue.push_back(start.as_str());
            seen.insert(start.as_str());
            while let Some(id) = queue.pop_front() {
                component.insert(id.to_string());
                for next in self
                    .out_neighbors(id, restrict)
                    .chain(self.in_neighbors(id, restrict))
                {
                    if seen.insert(next) {
                        queue.push_back(next);
                    }
                }
            }
            components.push(component);
        }
        components.sort_by(|a, b| {
            b.len()
                .cmp(&a.len())
                .then_with(|| a.iter().next().cmp(&b.iter().next()))
        });
        components
    }

    /// Subgraph over `ids` with every edge whose endpoints both lie inside.
    pub fn induced_subgraph(&self, ids: &BTreeSet<String>) -> Result<TypedGraph, GraphError> {
        let mut sub = TypedGraph::new();
        for id in ids {
            let info = self
                .nodes
                .get(id)
                .ok_or_else(|| GraphError::UnknownNode(id.clone()))?;
            sub.nodes.insert(id.clone(), info.clone());
        }
        for id in ids {
            if let Some(dsts) = self.out_edges.get(id) {
                for (dst, ty) in dsts {
                    if ids.contains(dst) {
                        sub.out_edges
                            .entry(id.clone())
                            .or_default()
                            .insert((dst.clone(), *ty));
                        sub.in_edges
                            .entry(dst.clone())
                            .or_default()
                            .insert((id.clone(), *ty));
                        sub.edge_count += 1;
                    }
                }
            }
        }
        Ok(sub)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(ms: i64) -> Option<Timestamp> {
        Some(Timestamp::from_millis(ms))
    }

    #[test]
    fn add_node_echoes_type_and_timestamp() {
        let mut g = TypedGraph::new();
        let instant = Timestamp::parse_rfc3339("2021-01-01T00:00:00Z").unwrap();
        g.add_node("t1", NodeType::Post, Some(instant)).unwrap();
        g.add_node("h1", NodeType::Hashtag, None).unwrap();
        assert_eq!(g.node_type("t1"), Some(NodeType::Post));
        assert_eq!(g.timestamp("t1"), Some(instant));
        assert_eq!(g.node_type("h1"), Some(NodeType::Hashtag));
        assert_eq!(g.timestamp("h1"), None);
    }

    #[test]
    fn duplicate_node_is_rejected_with_id() {
        let mut g = TypedGraph::new();
        g.add_node("t1", NodeType::Post, ts(0)).unwrap();
        let err = g.add_node("t1", NodeType::Post, ts(1)).unwrap_err();
        assert_eq!(err, GraphError::DuplicateNode("t1".into()));
    }

    #[test]
    fn post_requires_timestamp() {
        let mut g = TypedGraph::new();
        let err = g.add_node("t1", NodeType::Post, None).unwrap_err();
        assert_eq!(err, GraphError::PostWithoutTimestamp("t1".into()));
    }

    #[test]
    fn reply_and_usage_edges_follow_schema() {
        let mut g = TypedGraph::new();
        g.add_node("t1", NodeType::Post, ts(0)).unwrap();
        g.add_node("t2", NodeType::Post, ts(1)).unwrap();
        g.add_node("h1", NodeType::Hashtag, None).unwrap();
        g.add_edge("t2", "t1", EdgeType::Reply).unwrap();
        g.add_edge("t1", "h1", EdgeType::Usage).unwrap();
        assert_eq!(g.edge_count(), 2);

        let err = g.add_edge("t1", "h1", EdgeType::Reply).unwrap_err();
        assert!(matches!(err, GraphError::SchemaViolation { .. }));
        let err = g.add_edge("h1", "t1", EdgeType::Usage).unwrap_err();
        assert!(matches!(err, GraphError::SchemaViolation { .. }));
    }

    #[test]
    fn missing_endpoint_is_reported() {
        let mut g = TypedGraph::new();
        g.add_node("t1", NodeType::Post, ts(0)).unwrap();
        let err = g.add_edge("t1", "nope", EdgeType::Reply).unwrap_err();
        assert_eq!(err, GraphError::UnknownNode("nope".into()));
    }

    #[test]
    fn second_outgoing_reply_is_rejected() {
        let mut g = TypedGraph::new();
        for (id, t) in [("t1", 0), ("t2", 1), ("t3", 2)] {
            g.add_node(id, NodeType::Post, ts(t)).unwrap();
        }
        g.add_edge("t3", "t1", EdgeType::Reply).unwrap();
        let err = g.add_edge("t3", "t2", EdgeType::Reply).unwrap_err();
        assert_eq!(
            err,
            GraphError::SecondReply {
                src: "t3".into(),
                existing: "t1".into()
            }
        );
    }

    #[test]
    fn self_reply_is_rejected() {
        let mut g = TypedGraph::new();
        g.add_node("t1", NodeType::Post, ts(0)).unwrap();
        let err = g.add_edge("t1", "t1", EdgeType::Reply).unwrap_err();
        assert_eq!(err, GraphError::ReplyToSelf("t1".into()));
    }

    #[test]
    fn duplicate_usage_edge_is_rejected() {
        let mut g = TypedGraph::new();
        g.add_node("t1", NodeType::Post, ts(0)).unwrap();
        g.add_node("h1", NodeType::Hashtag, None).unwrap();
        g.add_edge("t1", "h1", EdgeType::Usage).unwrap();
        let err = g.add_edge("t1", "h1", EdgeType::Usage).unwrap_err();
        assert!(matches!(err, GraphError::DuplicateEdge { .. }));
    }

    #[test]
    fn degree_counts_distinct_using_posts() {
        let mut g = TypedGraph::new();
        g.add_node("h1", NodeType::Hashtag, None).unwrap();
        for (id, t) in [("t1", 0), ("t2", 1), ("t3", 2)] {
            g.add_node(id, NodeType::Post, ts(t)).unwrap();
            g.add_edge(id, "h1", EdgeType::Usage).unwrap();
        }
        assert_eq!(
            g.degree("h1", Some(EdgeType::Usage), Direction::In)
                .unwrap(),
            3
        );
    }

    #[test]
    fn degree_of_isolated_node_is_zero() {
        let mut g = TypedGraph::new();
        g.add_node("h1", NodeType::Hashtag, None).unwrap();
        assert_eq!(g.degree("h1", None, Direction::All).unwrap(), 0);
        assert!(g.degree("nope", None, Direction::All).is_err());
    }

    // Oracle: hand enumeration of a 5-reply star. Every reply contributes one
    // incoming reply edge at the seed, so reply in-degree is 5.
    #[test]
    fn star_seed_reply_in_degree() {
        let mut g = TypedGraph::new();
        g.add_node("seed", NodeType::Post, ts(0)).unwrap();
        for i in 1..=5 {
            let id = format!("r{i}");
            g.add_node(&id, NodeType::Post, ts(i)).unwrap();
            g.add_edge(&id, "seed", EdgeType::Reply).unwrap();
        }
        assert_eq!(
            g.degree("seed", Some(EdgeType::Reply), Direction::In)
                .unwrap(),
            5
        );
        assert_eq!(
            g.degree("seed", Some(EdgeType::Reply), Direction::Out)
                .unwrap(),
            0
        );
    }

    #[test]
    fn wcc_single_path_is_one_component() {
        let mut g = TypedGraph::new();
        for (id, t) in [("a", 0), ("b", 1), ("c", 2)] {
            g.add_node(id, NodeType::Post, ts(t)).unwrap();
        }
        g.add_edge("b", "a", EdgeType::Reply).unwrap();
        g.add_edge("c", "b", EdgeType::Reply).unwrap();
        let comps = g.weakly_connected_components(None);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].len(), 3);
    }

    #[test]
    fn wcc_orders_by_size_then_smallest_member() {
        let mut g = TypedGraph::new();
        // Tree of 4 rooted at x0 and tree of 2 rooted at a0.
        for (id, t) in [
            ("x0", 0),
            ("x1", 1),
            ("x2", 2),
            ("x3", 3),
            ("a0", 4),
            ("a1", 5),
        ] {
            g.add_node(id, NodeType::Post, ts(t)).unwrap();
        }
        g.add_edge("x1", "x0", EdgeType::Reply).unwrap();
        g.add_edge("x2", "x0", EdgeType::Reply).unwrap();
        g.add_edge("x3", "x1", EdgeType::Reply).unwrap();
        g.add_edge("a1", "a0", EdgeType::Reply).unwrap();
        let comps = g.weakly_connected_components(Some(EdgeType::Reply));
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].len(), 4);
        assert_eq!(comps[1].len(), 2);
    }

    #[test]
    fn wcc_empty_graph_is_empty() {
        let g = TypedGraph::new();
        assert!(g.weakly_connected_components(None).is_empty());
    }

    #[test]
    fn wcc_is_a_partition() {
        let mut g = TypedGraph::new();
        for (id, t) in [("a", 0), ("b", 1), ("c", 2), ("d", 3)] {
            g.add_node(id, NodeType::Post, ts(t)).unwrap();
        }
        g.add_edge("b", "a", EdgeType::Reply).unwrap();
        let comps = g.weakly_connected_components(None);
        let total: usize = comps.iter().map(|c| c.len()).sum();
        assert_eq!(total, g.node_count());
        let mut union = BTreeSet::new();
        for c in &comps {
            for id in c {
                assert!(union.insert(id.clone()), "components overlap at {id}");
            }
        }
    }

    #[test]
    fn induced_subgraph_full_set_is_identity() {
        let mut g = TypedGraph::new();
        g.add_node("t1", NodeType::Post, ts(0)).unwrap();
        g.add_node("t2", NodeType::Post, ts(1)).unwrap();
        g.add_edge("t2", "t1", EdgeType::Reply).unwrap();
        let all: BTreeSet<String> = g.node_ids().map(String::from).collect();
        let sub = g.induced_subgraph(&all).unwrap();
        assert_eq!(sub.node_count(), g.node_count());
        assert_eq!(sub.edge_count(), g.edge_count());
    }

    #[test]
    fn induced_subgraph_single_node_has_no_edges() {
        let mut g = TypedGraph::new();
        g.add_node("t1", NodeType::Post, ts(0)).unwrap();
        g.add_node("t2", NodeType::Post, ts(1)).unwrap();
        g.add_edge("t2", "t1", EdgeType::Reply).unwrap();
        let sub = g
            .induced_subgraph(&BTreeSet::from(["t1".to_string()]))
            .unwrap();
        assert_eq!(sub.node_count(), 1);
        assert_eq!(sub.edge_count(), 0);
    }

    // Oracle: manual enumeration. Center plus one leaf keeps exactly the one
    // edge between them; the other leaves' edges are cut.
    #[test]
    fn induced_subgraph_star_center_plus_leaf() {
        let mut g = TypedGraph::new();
        g.add_node("seed", NodeType::Post, ts(0)).unwrap();
        for i in 1..=3 {
            let id = format!("r{i}");
            g.add_node(&id, NodeType::Post, ts(i)).unwrap();
            g.add_edge(&id, "seed", EdgeType::Reply).unwrap();
        }
        let sub = g
            .induced_subgraph(&BTreeSet::from(["seed".to_string(), "r1".to_string()]))
            .unwrap();
        assert_eq!(sub.node_count(), 2);
        assert_eq!(sub.edge_count(), 1);
        assert_eq!(sub.reply_parent("r1"), Some("seed"));
    }

    #[test]
    fn induced_subgraph_unknown_id_errors() {
        let g = TypedGraph::new();
        let err = g
            .induced_subgraph(&BTreeSet::from(["ghost".to_string()]))
            .unwrap_err();
        assert_eq!(err, GraphError::UnknownNode("ghost".into()));
    }

    #[test]
    fn induced_subgraph_is_monotone() {
        let mut g = TypedGraph::new();
        for (id, t) in [("a", 0), ("b", 1), ("c", 2), ("d", 3)] {
            g.add_node(id, NodeType::Post, ts(t)).unwrap();
        }
        g.add_edge("b", "a", EdgeType::Reply).unwrap();
        g.add_edge("c", "b", EdgeType::Reply).unwrap();
        g.add_edge("d", "b", EdgeType::Reply).unwrap();
        let small = BTreeSet::from(["a".to_string(), "b".to_string()]);
        let large: BTreeSet<String> = g.node_ids().map(String::from).collect();
        let sub_small = g.induced_subgraph(&small).unwrap();
        let sub_large = g.induced_subgraph(&large).unwrap();
        let edges_small: BTreeSet<_> = sub_small
            .edges()
            .map(|(s, d, t)| (s.to_string(), d.to_string(), t))
            .collect();
        let edges_large: BTreeSet<_> = sub_large
            .edges()
            .map(|(s, d, t)| (s.to_string(), d.to_string(), t))
            .collect();
        assert!(edges_small.is_subset(&edges_large));
    }

    #[test]
    fn timestamp_round_trips_rfc3339() {
        let t = Timestamp::parse_rfc3339("2021-06-01T12:34:56.789Z").unwrap();
        assert_eq!(t.to_rfc3339(), "2021-06-01T12:34:56.789Z");
        let offset = Timestamp::parse_rfc3339("2021-06-01T14:34:56.789+02:00").unwrap();
        assert_eq!(offset, t);
    }
}
