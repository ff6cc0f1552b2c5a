//! Timestamped edge multisets with time-ordered per-node adjacency.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub type NodeId = u32;
pub type Timestep = u64;
pub type EdgeId = usize;
pub type ClassId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TemporalEdge {
    pub src: NodeId,
    pub dst: NodeId,
    pub t: Timestep,
}

impl TemporalEdge {
    pub fn touches(&self, v: NodeId) -> bool {
        self.src == v || self.dst == v
    }
}

/// One traversable direction of a stored edge, as seen from the node owning the list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Incidence {
    pub edge: EdgeId,
    pub neighbor: NodeId,
    pub t: Timestep,
}

/// A dynamic network `G = (V, E_T)`.
///
/// Nodes are dense ids `0..N` mapped to the labels found in the input. Edges
/// keep their insertion order as their id; repeated `(src, dst, t)` triples
/// are distinct dynamic edges. The graph is immutable once built.
#[derive(Clone, Debug)]
pub struct TemporalGraph {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    edges: Vec<TemporalEdge>,
    directed: bool,
    adjacency: Vec<Vec<Incidence>>,
    skipped_self_loops: usize,
}

impl TemporalGraph {
    /// Builds a graph from labeled triples. Self-loops are dropped and counted.
    pub fn from_labeled_edges<I, S>(edges: I, directed: bool) -> Self
    where
        I: IntoIterator<Item = (S, S, Timestep)>,
        S: AsRef<str>,
    {
        let mut builder = Builder::default();
        for (a, b, t) in edges {
            builder.push(a.as_ref(), b.as_ref(), t);
        }
        builder.finish(directed)
    }

    /// Builds a graph over nodes `0..num_nodes` labeled by their decimal id.
    pub fn from_edges(num_nodes: usize, edges: &[(NodeId, NodeId, Timestep)], directed: bool) -> Result<Self> {
        let labels: Vec<String> = (0..num_nodes).map(|i| i.to_string()).collect();
        let mut kept = Vec::with_capacity(edges.len());
        let mut skipped = 0;
        for &(src, dst, t) in edges {
            if src as usize >= num_nodes || dst as usize >= num_nodes {
                return Err(Error::Validation(format!(
                    "edge ({src}, {dst}, {t}) references a node outside 0..{num_nodes}"
                )));
            }
            if src == dst {
                skipped += 1;
                continue;
            }
            kept.push(TemporalEdge { src, dst, t });
        }
        Ok(Self::assemble(labels, kept, directed, skipped))
    }

    fn assemble(labels: Vec<String>, edges: Vec<TemporalEdge>, directed: bool, skipped_self_loops: usize) -> Self {
        let mut adjacency: Vec<Vec<Incidence>> = vec![Vec::new(); labels.len()];
        for (id, e) in edges.iter().enumerate() {
            adjacency[e.src as usize].push(Incidence {
                edge: id,
                neighbor: e.dst,
                t: e.t,
            });
            if !directed {
                adjacency[e.dst as usize].push(Incidence {
                    edge: id,
                    neighbor: e.src,
                    t: e.t,
                });
            }
        }
        for list in &mut adjacency {
            list.sort_by_key(|inc| (inc.t, inc.neighbor, inc.edge));
        }
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as NodeId))
            .collect();
        TemporalGraph {
            labels,
            index,
            edges,
            directed,
            adjacency,
            skipped_self_loops,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[TemporalEdge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> TemporalEdge {
        self.edges[id]
    }

    /// Number of self-loop lines dropped while building the graph.
    pub fn skipped_self_loops(&self) -> usize {
        self.skipped_self_loops
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_id(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    /// Largest timestep present, or 0 for an edgeless graph.
    pub fn t_max(&self) -> Timestep {
        self.edges.iter().map(|e| e.t).max().unwrap_or(0)
    }

    pub fn num_timesteps(&self) -> usize {
        self.edges.iter().map(|e| e.t).collect::<BTreeSet<_>>().len()
    }

    /// Every incidence of `v`, sorted by `(t, neighbor, edge id)`.
    pub fn incident(&self, v: NodeId) -> &[Incidence] {
        &self.adjacency[v as usize]
    }

    /// Edges leaving `v` at or after `t` (outgoing only when directed).
    pub fn temporal_neighborhood(&self, v: NodeId, t: Timestep) -> &[Incidence] {
        let list = &self.adjacency[v as usize];
        let start = list.partition_point(|inc| inc.t < t);
        &list[start..]
    }

    /// Like [`temporal_neighborhood`](Self::temporal_neighborhood) but requires `t' > t`.
    pub fn temporal_neighborhood_strict(&self, v: NodeId, t: Timestep) -> &[Incidence] {
        let list = &self.adjacency[v as usize];
        let start = list.partition_point(|inc| inc.t <= t);
        &list[start..]
    }

    pub fn summary(&self) -> GraphSummary {
        GraphSummary {
            nodes: self.num_nodes(),
            edges: self.num_edges(),
            timesteps: self.num_timesteps(),
        }
    }

    /// Writes the edge multiset in the same `src dst t` format `load_edge_list` reads.
    pub fn write_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        for e in &self.edges {
            writeln!(out, "{} {} {}", self.label(e.src), self.label(e.dst), e.t).map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphSummary {
    pub nodes: usize,
    pub edges: usize,
    pub timesteps: usize,
}

impl fmt::Display for GraphSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "nodes={} edges={} timesteps={}", self.nodes, self.edges, self.timesteps)
    }
}

#[derive(Default)]
struct Builder {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    edges: Vec<TemporalEdge>,
    skipped: usize,
}

impl Builder {
    fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len() as NodeId;
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    fn push(&mut self, a: &str, b: &str, t: Timestep) {
        if a == b {
            self.skipped += 1;
            return;
        }
        let src = self.intern(a);
        let dst = self.intern(b);
        self.edges.push(TemporalEdge { src, dst, t });
    }

    fn finish(self, directed: bool) -> TemporalGraph {
        TemporalGraph::assemble(self.labels, self.edges, directed, self.skipped)
    }
}

fn fields(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty())
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Reads `src dst t` lines separated by whitespace or commas.
///
/// Blank lines and `#` comments are ignored. Self-loops are skipped and
/// counted in [`TemporalGraph::skipped_self_loops`].
pub fn load_edge_list(path: impl AsRef<Path>, directed: bool) -> Result<TemporalGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut builder = Builder::default();
    for (lineno, line) in content_lines(&text) {
        let parts: Vec<&str> = fields(line).collect();
        if parts.len() != 3 {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected `src dst t`, found {} field(s)", parts.len()),
            ));
        }
        let t: i64 = parts[2]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("timestep `{}` is not an integer", parts[2])))?;
        if t < 0 {
            return Err(Error::Validation(format!(
                "{}:{lineno}: negative timestep {t}",
                path.display()
            )));
        }
        builder.push(parts[0], parts[1], t as Timestep);
    }
    if builder.skipped > 0 {
        log::warn!("{}: skipped {} self-loop(s)", path.display(), builder.skipped);
    }
    Ok(builder.finish(directed))
}

/// Class assignment for the labeled subset of a graph's nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeLabels {
    classes: Vec<String>,
    by_node: BTreeMap<NodeId, ClassId>,
}

impl NodeLabels {
    /// Class ids are assigned in sorted order of the class names.
    pub fn from_pairs<I, A, B>(g: &TemporalGraph, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let mut raw: BTreeMap<NodeId, String> = BTreeMap::new();
        let mut unknown = Vec::new();
        for (node, class) in pairs {
            let (node, class) = (node.as_ref(), class.as_ref());
            let Some(id) = g.node_id(node) else {
                unknown.push(node.to_owned());
                continue;
            };
            if let Some(prev) = raw.insert(id, class.to_owned()) {
                if prev != class {
                    return Err(Error::Validation(format!(
                        "node `{node}` labeled both `{prev}` and `{class}`"
                    )));
                }
            }
        }
        if !unknown.is_empty() {
            unknown.sort();
            unknown.dedup();
            return Err(Error::UnknownNodes(unknown));
        }
        let classes: Vec<String> = raw.values().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        if classes.len() < 2 {
            return Err(Error::Validation(format!(
                "need at least 2 classes, found {}",
                classes.len()
            )));
        }
        let by_node = raw
            .into_iter()
            .map(|(n, c)| (n, classes.binary_search(&c).unwrap() as ClassId))
            .collect();
        Ok(NodeLabels { classes, by_node })
    }

    pub fn len(&self) -> usize {
        self.by_node.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_node.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_name(&self, c: ClassId) -> &str {
        &self.classes[c as usize]
    }

    pub fn class_of(&self, v: NodeId) -> Option<ClassId> {
        self.by_node.get(&v).copied()
    }

    /// Labeled nodes in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, ClassId)> + '_ {
        self.by_node.iter().map(|(&n, &c)| (n, c))
    }
}

/// Reads `node class` lines. Nodes absent from the file stay unlabeled.
pub fn load_labels(path: impl AsRef<Path>, g: &TemporalGraph) -> Result<NodeLabels> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut pairs = Vec::new();
    for (lineno, line) in content_lines(&text) {
        let parts: Vec<&str> = fields(line).collect();
        if parts.len() != 2 {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected `node class`, found {} field(s)", parts.len()),
            ));
        }
        pairs.push((parts[0], parts[1]));
    }
    NodeLabels::from_pairs(g, pairs)
}
