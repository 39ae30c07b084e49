//! Conversation analytics over typed, time-stamped graphs.
//!
//! A conversation is a reply tree of posts enriched with the hashtags the
//! posts use. This crate builds such graphs from raw post records, splits
//! them into cumulative temporal snapshots, and computes three analyses on
//! top: posting-activity saturation fits, Wiener index series, and hashtag
//! takeover classification. A generator for synthetic conversations with
//! controlled activity, topology and hashtag scripts rounds out the crate.

pub mod activity;
pub mod graph;
pub mod hijack;
pub mod ingest;
pub mod sampler;
pub mod synth;
pub mod wiener;

pub use graph::{Direction, EdgeType, NodeType, Timestamp, TypedGraph};
pub use ingest::{Conversation, RawPost};
pub use sampler::{SamplingPolicy, SnapshotSequence};
