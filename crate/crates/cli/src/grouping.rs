//! Memory-capped grouping of raw posts by conversation id.
//!
//! Records are buffered in memory up to a cap; past it, sorted runs are
//! spilled to a temporary directory as JSONL and the groups are produced by
//! a k-way merge over the runs. Sort key is (conversation_id, created_at,
//! id), so the merged stream yields each conversation's records
//! contiguously regardless of input order.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use convograph::ingest::RawPost;
use tempfile::TempDir;

fn sort_key(post: &RawPost) -> (String, i64, String) {
    (
        post.conversation_id.clone(),
        post.created_at.millis(),
        post.id.clone(),
    )
}

pub struct StreamingGrouper {
    cap: usize,
    buffer: Vec<RawPost>,
    runs: Vec<PathBuf>,
    spill_dir: Option<TempDir>,
}

impl StreamingGrouper {
    pub fn new(cap: usize) -> Self {
        StreamingGrouper {
            cap: cap.max(1),
            buffer: Vec::new(),
            runs: Vec::new(),
            spill_dir: None,
        }
    }

    pub fn push(&mut self, post: RawPost) -> Result<()> {
        self.buffer.push(post);
        if self.buffer.len() >= self.cap {
            self.spill()?;
        }
        Ok(())
    }

    /// Number of runs spilled to disk so far.
    pub fn spilled_runs(&self) -> usize {
        self.runs.len()
    }

    fn spill(&mut self) -> Result<()> {
        if self.buffer.is_empty() {
            return Ok(());
        }
        if self.spill_dir.is_none() {
            self.spill_dir = Some(TempDir::new().context("creating spill directory")?);
        }
        let dir = self.spill_dir.as_ref().unwrap();
        let path = dir.path().join(format!("run-{:06}.jsonl", self.runs.len()));
        self.buffer.sort_by_key(sort_key);
        let mut writer = BufWriter::new(File::create(&path).context("creating spill run")?);
        for post in self.buffer.drain(..) {
            serde_json::to_writer(&mut writer, &post)?;
            writer.write_all(b"\n")?;
        }
        writer.flush()?;
        self.runs.push(path);
        Ok(())
    }

    /// Consume the grouper, yielding (conversation_id, records) groups in
    /// ascending conversation-id order.
    pub fn into_groups(mut self) -> Result<GroupIter> {
        self.buffer.sort_by_key(sort_key);
        let mut sources: Vec<RunSource> = Vec::new();
        for path in &self.runs {
            let reader = BufReader::new(File::open(path).context("reopening spill run")?);
            sources.push(RunSource::File(reader));
        }
        sources.push(RunSource::Memory(self.buffer.into_iter()));

        let mut iter = GroupIter {
            sources,
            heap: BinaryHeap::new(),
            _spill_dir: self.spill_dir,
        };
        for idx in 0..iter.sources.len() {
            if let Some(post) = iter.sources[idx].next_post()? {
                iter.heap.push(Reverse(HeapEntry {
                    key: sort_key(&post),
                    source: idx,
                    post,
                }));
            }
        }
        Ok(iter)
    }
}

enum RunSource {
    File(BufReader<File>),
    Memory(std::vec::IntoIter<RawPost>),
}

impl RunSource {
    fn next_post(&mut self) -> Result<Option<RawPost>> {
        match self {
            RunSource::Memory(iter) => Ok(iter.next()),
            RunSource::File(reader) => {
                let mut line = String::new();
                loop {
                    line.clear();
                    let read = reader.read_line(&mut line)?;
                    if read == 0 {
                        return Ok(None);
                    }
                    if line.trim().is_empty() {
                        continue;
                    }
                    let post: RawPost =
                        serde_json::from_str(line.trim_end()).context("reading spill run")?;
                    return Ok(Some(post));
                }
            }
        }
    }
}

struct HeapEntry {
    key: (String, i64, String),
    source: usize,
    post: RawPost,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key && self.source == other.source
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key
            .cmp(&other.key)
            .then_with(|| self.source.cmp(&other.source))
    }
}

/// Iterator over grouped conversations from the merged runs.
pub struct GroupIter {
    sources: Vec<RunSource>,
    heap: BinaryHeap<Reverse<HeapEntry>>,
    _spill_dir: Option<TempDir>,
}

impl GroupIter {
    fn pull(&mut self) -> Result<Option<RawPost>> {
        match self.heap.pop() {
            None => Ok(None),
            Some(Reverse(entry)) => {
                if let Some(next) = self.sources[entry.source].next_post()? {
                    self.heap.push(Reverse(HeapEntry {
                        key: sort_key(&next),
                        source: entry.source,
                        post: next,
                    }));
                }
                Ok(Some(entry.post))
            }
        }
    }

    /// Next conversation group, or `None` when exhausted.
    pub fn next_group(&mut self) -> Result<Option<(String, Vec<RawPost>)>> {
        let first = match self.pull()? {
            Some(post) => post,
            None => return Ok(None),
        };
        let conv_id = first.conversation_id.clone();
        let mut group = vec![first];
        loop {
            match self.heap.peek() {
                Some(Reverse(entry)) if entry.post.conversation_id == conv_id => {
                    group.push(self.pull()?.expect("peeked entry exists"));
                }
                _ => break,
            }
        }
        Ok(Some((conv_id, group)))
    }
}
