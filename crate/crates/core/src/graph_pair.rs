//! Paired weighted graphs over a shared node universe, plus the edge-list and
//! event-file formats used to build them.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::NodeIndex;

/// Which of the two graphs an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    A,
    B,
}

/// Two aligned weighted undirected graphs `G_A`, `G_B` on one node set.
///
/// Absent edges have weight zero and are not stored. Both adjacencies are
/// symmetric, free of self-loops and duplicates, and sorted by neighbor index.
/// The value is immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphPair {
    labels: Vec<String>,
    index: HashMap<String, NodeIndex>,
    adj_a: Vec<Vec<(NodeIndex, f64)>>,
    adj_b: Vec<Vec<(NodeIndex, f64)>>,
}

impl GraphPair {
    /// Builds a pair from labelled edge triples. Labels are numbered in order
    /// of first appearance, scanning `edges_a` before `edges_b`.
    pub fn from_edges(
        edges_a: &[(&str, &str, f64)],
        edges_b: &[(&str, &str, f64)],
    ) -> Result<Self> {
        let mut builder = PairBuilder::default();
        for (side, edges) in [(Side::A, edges_a), (Side::B, edges_b)] {
            for (i, &(u, v, w)) in edges.iter().enumerate() {
                builder
                    .add_edge(side, u, v, w)
                    .map_err(|m| Error::input(format!("graph {side} edge #{}: {m}", i + 1)))?;
            }
        }
        Ok(builder.finish())
    }

    /// Loads the two edge-list files. The node universe is the union of the
    /// labels mentioned in either file.
    pub fn load_pair(path_a: impl AsRef<Path>, path_b: impl AsRef<Path>) -> Result<Self> {
        let mut builder = PairBuilder::default();
        for (side, path) in [(Side::A, path_a.as_ref()), (Side::B, path_b.as_ref())] {
            let file = File::open(path).map_err(|e| Error::io(path, e))?;
            builder.read_edge_list(side, BufReader::new(file), path)?;
        }
        Ok(builder.finish())
    }

    /// Parses both graphs from in-memory readers; `name_a`/`name_b` appear in
    /// diagnostics.
    pub fn read_pair(
        reader_a: impl BufRead,
        name_a: impl AsRef<Path>,
        reader_b: impl BufRead,
        name_b: impl AsRef<Path>,
    ) -> Result<Self> {
        let mut builder = PairBuilder::default();
        builder.read_edge_list(Side::A, reader_a, name_a.as_ref())?;
        builder.read_edge_list(Side::B, reader_b, name_b.as_ref())?;
        Ok(builder.finish())
    }

    /// Aggregates timestamped interactions into two graphs: magnitudes with
    /// `timestamp < split` sum into `G_A`, the rest into `G_B`, and each
    /// per-pair total is passed through `transform`.
    pub fn build_from_events(
        events: &[EdgeEvent],
        split: i64,
        transform: WeightTransform,
    ) -> Result<Self> {
        if events.is_empty() {
            return Err(Error::input("event list is empty"));
        }
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<String, NodeIndex> = HashMap::new();
        let mut intern = |label: &str| -> NodeIndex {
            if let Some(&i) = index.get(label) {
                return i;
            }
            let i = labels.len();
            labels.push(label.to_owned());
            index.insert(label.to_owned(), i);
            i
        };
        // Insertion-ordered totals keep the build deterministic.
        let mut slot: HashMap<(NodeIndex, NodeIndex), usize> = HashMap::new();
        let mut totals: Vec<((NodeIndex, NodeIndex), f64, f64)> = Vec::new();
        for ev in events {
            ev.validate()?;
            let (u, v) = (intern(&ev.u), intern(&ev.v));
            let key = (u.min(v), u.max(v));
            let at = *slot.entry(key).or_insert_with(|| {
                totals.push((key, 0.0, 0.0));
                totals.len() - 1
            });
            if ev.timestamp < split {
                totals[at].1 += ev.magnitude;
            } else {
                totals[at].2 += ev.magnitude;
            }
        }

        let mut builder = PairBuilder::default();
        for label in &labels {
            builder.intern(label);
        }
        for ((u, v), xa, xb) in totals {
            for (side, x) in [(Side::A, xa), (Side::B, xb)] {
                let w = transform.apply(x);
                if x > 0.0 && (w <= 0.0 || w.is_nan()) {
                    return Err(Error::input(format!(
                        "{transform} transform maps total {x} on ({}, {}) to non-positive weight {w}",
                        labels[u], labels[v]
                    )));
                }
                if w > 0.0 {
                    builder
                        .add_edge_indices(side, u, v, w)
                        .map_err(Error::invariant)?;
                }
            }
        }
        Ok(builder.finish())
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, node: NodeIndex) -> &str {
        &self.labels[node]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<NodeIndex> {
        self.index.get(label).copied()
    }

    /// Resolves labels to indices; an unknown label is an input error.
    pub fn indices_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<NodeIndex>> {
        labels
            .iter()
            .map(|l| {
                let l = l.as_ref();
                self.index_of(l)
                    .ok_or_else(|| Error::input(format!("unknown node label {l:?}")))
            })
            .collect()
    }

    pub fn labels_of(&self, nodes: &[NodeIndex]) -> Vec<&str> {
        nodes.iter().map(|&n| self.label(n)).collect()
    }

    /// Neighbors of `node` in one graph with their weights, sorted by index.
    pub fn neighbors(&self, side: Side, node: NodeIndex) -> &[(NodeIndex, f64)] {
        &self.adjacency(side)[node]
    }

    pub fn weight(&self, side: Side, u: NodeIndex, v: NodeIndex) -> f64 {
        let row = &self.adjacency(side)[u];
        match row.binary_search_by_key(&v, |&(n, _)| n) {
            Ok(i) => row[i].1,
            Err(_) => 0.0,
        }
    }

    /// Both weights `(E_A(u,v), E_B(u,v))`.
    pub fn weights(&self, u: NodeIndex, v: NodeIndex) -> (f64, f64) {
        (self.weight(Side::A, u, v), self.weight(Side::B, u, v))
    }

    /// Stored edges of one graph as `(u, v, w)` with `u < v`, in index order.
    pub fn edges(&self, side: Side) -> impl Iterator<Item = (NodeIndex, NodeIndex, f64)> + '_ {
        self.adjacency(side)
            .iter()
            .enumerate()
            .flat_map(|(u, row)| {
                row.iter()
                    .filter(move |&&(v, _)| u < v)
                    .map(move |&(v, w)| (u, v, w))
            })
    }

    pub fn edge_count(&self, side: Side) -> usize {
        self.adjacency(side).iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Every unordered pair `(u, v)`, `u < v`, carrying weight in at least one
    /// graph, with both weights. Sorted by `(u, v)`.
    pub fn union_edges(&self) -> Vec<(NodeIndex, NodeIndex, f64, f64)> {
        let mut out = Vec::new();
        for u in 0..self.node_count() {
            let (ra, rb) = (&self.adj_a[u], &self.adj_b[u]);
            let (mut i, mut j) = (0, 0);
            while i < ra.len() || j < rb.len() {
                let na = ra.get(i).map_or(usize::MAX, |e| e.0);
                let nb = rb.get(j).map_or(usize::MAX, |e| e.0);
                let v = na.min(nb);
                let wa = if na == v {
                    i += 1;
                    ra[i - 1].1
                } else {
                    0.0
                };
                let wb = if nb == v {
                    j += 1;
                    rb[j - 1].1
                } else {
                    0.0
                };
                if u < v {
                    out.push((u, v, wa, wb));
                }
            }
        }
        out
    }

    /// The same pair with `G_A` and `G_B` exchanged.
    pub fn swapped(&self) -> Self {
        GraphPair {
            labels: self.labels.clone(),
            index: self.index.clone(),
            adj_a: self.adj_b.clone(),
            adj_b: self.adj_a.clone(),
        }
    }

    /// Writes one graph as an edge list (`u\tv\tw`, `u < v` by index). The
    /// float formatting is shortest round-trip, so re-parsing is exact.
    pub fn write_edge_list(&self, side: Side, mut out: impl Write) -> std::io::Result<()> {
        for (u, v, w) in self.edges(side) {
            writeln!(out, "{}\t{}\t{}", self.labels[u], self.labels[v], w)?;
        }
        Ok(())
    }

    /// Dense weight matrices of both graphs restricted to `nodes`, in the given
    /// order, rendered as CSV with a header row of labels.
    pub fn export_matrix<S: AsRef<str>>(&self, nodes: &[S]) -> Result<(String, String)> {
        let idx = self.indices_of(nodes)?;
        let render = |side: Side| -> Result<String> {
            let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
            if !idx.is_empty() {
                w.write_record(idx.iter().map(|&i| self.label(i)))
                    .map_err(|e| Error::invariant(e.to_string()))?;
            }
            for &u in &idx {
                w.write_record(idx.iter().map(|&v| self.weight(side, u, v).to_string()))
                    .map_err(|e| Error::invariant(e.to_string()))?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| Error::invariant(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::invariant(e.to_string()))
        };
        Ok((render(Side::A)?, render(Side::B)?))
    }

    /// Mean nonzero weight of one graph, `None` when the graph has no edges.
    pub fn mean_weight(&self, side: Side) -> Option<f64> {
        let (sum, count) = self
            .edges(side)
            .fold((0.0, 0usize), |(s, c), (_, _, w)| (s + w, c + 1));
        (count > 0).then(|| sum / count as f64)
    }

    /// A warning when the two graphs' mean nonzero weights differ by more than
    /// a factor of ten; edge metrics compare raw weights across graphs.
    pub fn scale_warning(&self) -> Option<String> {
        let (a, b) = (self.mean_weight(Side::A)?, self.mean_weight(Side::B)?);
        let ratio = a.max(b) / a.min(b);
        (ratio > 10.0).then(|| {
            format!(
                "mean edge weights differ by {ratio:.1}x (A: {a:.4}, B: {b:.4}); consider rescaling the inputs"
            )
        })
    }

    fn adjacency(&self, side: Side) -> &[Vec<(NodeIndex, f64)>] {
        match side {
            Side::A => &self.adj_a,
            Side::B => &self.adj_b,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

#[derive(Default)]
struct PairBuilder {
    labels: Vec<String>,
    index: HashMap<String, NodeIndex>,
    edges_a: Vec<(NodeIndex, NodeIndex, f64)>,
    edges_b: Vec<(NodeIndex, NodeIndex, f64)>,
    seen_a: HashSet<(NodeIndex, NodeIndex)>,
    seen_b: HashSet<(NodeIndex, NodeIndex)>,
}

impl PairBuilder {
    fn intern(&mut self, label: &str) -> NodeIndex {
        if let Some(&i) = self.index.get(label) {
            return i;
        }
        let i = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), i);
        i
    }

    fn add_edge(&mut self, side: Side, u: &str, v: &str, w: f64) -> Result<(), String> {
        if u == v {
            return Err(format!("self-loop on {u:?}"));
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(format!("weight must be positive and finite, got {w}"));
        }
        let (iu, iv) = (self.intern(u), self.intern(v));
        self.add_edge_indices(side, iu, iv, w)
            .map_err(|_| format!("duplicate edge ({u}, {v})"))
    }

    fn add_edge_indices(
        &mut self,
        side: Side,
        u: NodeIndex,
        v: NodeIndex,
        w: f64,
    ) -> Result<(), String> {
        let key = (u.min(v), u.max(v));
        let (edges, seen) = match side {
            Side::A => (&mut self.edges_a, &mut self.seen_a),
            Side::B => (&mut self.edges_b, &mut self.seen_b),
        };
        if !seen.insert(key) {
            return Err(format!("duplicate edge {key:?}"));
        }
        edges.push((key.0, key.1, w));
        Ok(())
    }

    fn read_edge_list(&mut self, side: Side, reader: impl BufRead, name: &Path) -> Result<()> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: PathBuf::from(name),
            line,
            message,
        };
        for (lineno, line) in reader.lines().enumerate() {
            let lineno = lineno + 1;
            let line = line.map_err(|e| Error::io(name, e))?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            let [u, v, w] = fields[..] else {
                return Err(parse_err(
                    lineno,
                    format!("expected `u v w`, found {} fields", fields.len()),
                ));
            };
            let w: f64 = w
                .parse()
                .map_err(|_| parse_err(lineno, format!("invalid weight {w:?}")))?;
            self.add_edge(side, u, v, w)
                .map_err(|m| parse_err(lineno, m))?;
        }
        Ok(())
    }

    fn finish(self) -> GraphPair {
        let n = self.labels.len();
        let build = |edges: Vec<(NodeIndex, NodeIndex, f64)>| {
            let mut adj: Vec<Vec<(NodeIndex, f64)>> = vec![Vec::new(); n];
            for (u, v, w) in edges {
                adj[u].push((v, w));
                adj[v].push((u, w));
            }
            for row in &mut adj {
                row.sort_unstable_by_key(|&(v, _)| v);
            }
            adj
        };
        GraphPair {
            adj_a: build(self.edges_a),
            adj_b: build(self.edges_b),
            labels: self.labels,
            index: self.index,
        }
    }
}

/// One timestamped interaction between two labelled nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeEvent {
    pub u: String,
    pub v: String,
    pub timestamp: i64,
    pub magnitude: f64,
}

impl EdgeEvent {
    pub fn new(
        u: impl Into<String>,
        v: impl Into<String>,
        timestamp: i64,
        magnitude: f64,
    ) -> Result<Self> {
        let ev = EdgeEvent {
            u: u.into(),
            v: v.into(),
            timestamp,
            magnitude,
        };
        ev.validate()?;
        Ok(ev)
    }

    /// A unit-magnitude event.
    pub fn unit(u: impl Into<String>, v: impl Into<String>, timestamp: i64) -> Result<Self> {
        Self::new(u, v, timestamp, 1.0)
    }

    fn validate(&self) -> Result<()> {
        if self.u == self.v {
            return Err(Error::input(format!(
                "event is a self-loop on {:?}",
                self.u
            )));
        }
        if !(self.magnitude > 0.0 && self.magnitude.is_finite()) {
            return Err(Error::input(format!(
                "event ({}, {}) has non-positive magnitude {}",
                self.u, self.v, self.magnitude
            )));
        }
        Ok(())
    }
}

/// Parses an event file: `u v timestamp [magnitude]` per line, `#` comments.
pub fn read_events(reader: impl BufRead, name: impl AsRef<Path>) -> Result<Vec<EdgeEvent>> {
    let name = name.as_ref();
    let parse_err = |line: usize, message: String| Error::Parse {
        path: name.to_path_buf(),
        line,
        message,
    };
    let mut events = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| Error::io(name, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let (u, v, t, m) = match fields[..] {
            [u, v, t] => (u, v, t, None),
            [u, v, t, m] => (u, v, t, Some(m)),
            _ => {
                return Err(parse_err(
                    lineno,
                    format!(
                        "expected `u v timestamp [magnitude]`, found {} fields",
                        fields.len()
                    ),
                ))
            }
        };
        let timestamp: i64 = t
            .parse()
            .map_err(|_| parse_err(lineno, format!("invalid timestamp {t:?}")))?;
        let magnitude: f64 = match m {
            Some(m) => m
                .parse()
                .map_err(|_| parse_err(lineno, format!("invalid magnitude {m:?}")))?,
            None => 1.0,
        };
        let ev = EdgeEvent::new(u, v, timestamp, magnitude)
            .map_err(|e| parse_err(lineno, e.to_string()))?;
        events.push(ev);
    }
    Ok(events)
}

pub fn load_events(path: impl AsRef<Path>) -> Result<Vec<EdgeEvent>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_events(BufReader::new(file), path)
}

/// Maps an aggregated interaction total to an edge weight. Zero always maps
/// to zero (no edge).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightTransform {
    Identity,
    /// `ln(x) + 1` for `x > 0`.
    Log1,
}

impl WeightTransform {
    pub fn apply(self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        match self {
            WeightTransform::Identity => x,
            WeightTransform::Log1 => x.ln() + 1.0,
        }
    }
}

impl FromStr for WeightTransform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(WeightTransform::Identity),
            "log1" => Ok(WeightTransform::Log1),
            other => Err(Error::input(format!(
                "unknown weight transform {other:?} (expected identity|log1)"
            ))),
        }
    }
}

impl fmt::Display for WeightTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightTransform::Identity => "identity",
            WeightTransform::Log1 => "log1",
        })
    }
}
