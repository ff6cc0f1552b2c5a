//! Canonical codes and automorphism orbits for event-ordered graphlets.
//!
//! A graphlet is an ordered list of events over positions `0..k`. Two
//! graphlets are the same type iff some relabeling of positions maps one
//! event list onto the other while keeping event order. The canonical code is
//! the lexicographically smallest event list over all `k!` relabelings; `k`
//! is at most [`MAX_NODES`], so brute force is cheap and results are cached
//! by the census.

use std::cmp::Ordering;
use std::fmt;

use crate::temporal_graph::NodeId;

pub const MAX_NODES: usize = 8;
pub const MAX_EVENTS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphletCode {
    nodes: u8,
    directed: bool,
    events: Vec<(u8, u8)>,
}

impl GraphletCode {
    pub fn num_nodes(&self) -> usize {
        self.nodes as usize
    }

    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    pub fn events(&self) -> &[(u8, u8)] {
        &self.events
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Parses the `Display` form, e.g. `3:0-1,1-2` (undirected) or `3:0>1,1>2`.
    pub fn parse(s: &str) -> Option<Self> {
        let (nodes, rest) = s.split_once(':')?;
        let nodes: u8 = nodes.parse().ok()?;
        let directed = rest.contains('>');
        let sep = if directed { '>' } else { '-' };
        let mut events = Vec::new();
        for ev in rest.split(',') {
            let (a, b) = ev.split_once(sep)?;
            events.push((a.parse().ok()?, b.parse().ok()?));
        }
        Some(GraphletCode { nodes, directed, events })
    }
}

impl Ord for GraphletCode {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.nodes, self.events.len(), self.directed, &self.events).cmp(&(
            other.nodes,
            other.events.len(),
            other.directed,
            &other.events,
        ))
    }
}

impl PartialOrd for GraphletCode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GraphletCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.directed { '>' } else { '-' };
        write!(f, "{}:", self.nodes)?;
        for (i, (a, b)) in self.events.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}{sep}{b}")?;
        }
        Ok(())
    }
}

/// Canonical code of a graphlet plus the orbit structure of its positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub code: GraphletCode,
    /// Orbit id of each canonical position. Orbit ids are numbered in order
    /// of their smallest position.
    pub orbit_of_position: Vec<u8>,
    pub num_orbits: usize,
    /// Canonical position assigned to each input position.
    pub position_map: Vec<u8>,
}

impl CanonicalForm {
    /// Orbit of an input (pre-canonicalization) position.
    pub fn orbit_of_input(&self, pos: usize) -> u8 {
        self.orbit_of_position[self.position_map[pos] as usize]
    }
}

fn relabel(events: &[(u8, u8)], perm: &[u8], directed: bool, out: &mut Vec<(u8, u8)>) {
    out.clear();
    out.extend(events.iter().map(|&(a, b)| {
        let (x, y) = (perm[a as usize], perm[b as usize]);
        if directed || x <= y {
            (x, y)
        } else {
            (y, x)
        }
    }));
}

/// Calls `f` with every permutation of `0..k` (Heap's algorithm).
fn for_each_permutation(k: usize, mut f: impl FnMut(&[u8])) {
    let mut perm: Vec<u8> = (0..k as u8).collect();
    let mut c = vec![0usize; k];
    f(&perm);
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            f(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

fn find(parent: &mut [u8], x: u8) -> u8 {
    let mut r = x;
    while parent[r as usize] != r {
        r = parent[r as usize];
    }
    let mut x = x;
    while parent[x as usize] != r {
        let next = parent[x as usize];
        parent[x as usize] = r;
        x = next;
    }
    r
}

/// Canonicalizes an event list over positions `0..nodes`.
///
/// Every position must occur in at least one event.
pub fn canonicalize(nodes: usize, events: &[(u8, u8)], directed: bool) -> CanonicalForm {
    assert!(nodes <= MAX_NODES && events.len() <= MAX_EVENTS);
    let mut best: Option<(Vec<(u8, u8)>, Vec<u8>)> = None;
    let mut scratch = Vec::with_capacity(events.len());
    for_each_permutation(nodes, |perm| {
        relabel(events, perm, directed, &mut scratch);
        let better = match &best {
            None => true,
            Some((b, _)) => scratch < *b,
        };
        if better {
            best = Some((scratch.clone(), perm.to_vec()));
        }
    });
    let (code_events, position_map) = best.expect("at least one permutation");

    let mut parent: Vec<u8> = (0..nodes as u8).collect();
    for_each_permutation(nodes, |perm| {
        relabel(&code_events, perm, directed, &mut scratch);
        if scratch == code_events {
            for (p, &q) in perm.iter().enumerate() {
                let (a, b) = (find(&mut parent, p as u8), find(&mut parent, q));
                if a != b {
                    parent[a.max(b) as usize] = a.min(b);
                }
            }
        }
    });
    let mut orbit_of_position = vec![0u8; nodes];
    let mut root_orbit: Vec<Option<u8>> = vec![None; nodes];
    let mut num_orbits = 0usize;
    for p in 0..nodes {
        let r = find(&mut parent, p as u8) as usize;
        let id = *root_orbit[r].get_or_insert_with(|| {
            num_orbits += 1;
            (num_orbits - 1) as u8
        });
        orbit_of_position[p] = id;
    }

    CanonicalForm {
        code: GraphletCode {
            nodes: nodes as u8,
            directed,
            events: code_events,
        },
        orbit_of_position,
        num_orbits,
        position_map,
    }
}

/// Canonical form of an ordered event sequence given in graph node ids.
///
/// Returns the form together with the distinct nodes in order of first
/// appearance; node `nodes[i]` sits at input position `i`.
pub fn canonical_code(events: &[(NodeId, NodeId)], directed: bool) -> (CanonicalForm, Vec<NodeId>) {
    let mut nodes: Vec<NodeId> = Vec::new();
    let pos = |v: NodeId, nodes: &mut Vec<NodeId>| -> u8 {
        match nodes.iter().position(|&x| x == v) {
            Some(p) => p as u8,
            None => {
                nodes.push(v);
                (nodes.len() - 1) as u8
            }
        }
    };
    let raw: Vec<(u8, u8)> = events
        .iter()
        .map(|&(a, b)| {
            let pa = pos(a, &mut nodes);
            let pb = pos(b, &mut nodes);
            (pa, pb)
        })
        .collect();
    (canonicalize(nodes.len(), &raw, directed), nodes)
}
