//! Top-k structural similarity network over PCA-projected D-GDVs.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::temporal_graph::{NodeId, TemporalGraph};

/// `s = 1 / (1 + d)`.
pub fn similarity(d: f64) -> Result<f64> {
    if d.is_nan() || d < 0.0 {
        return Err(Error::Validation(format!("distance must be non-negative, got {d}")));
    }
    Ok(1.0 / (1.0 + d))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub node: NodeId,
    pub weight: f64,
}

/// Per-node retained similarity edges. Lists are sorted by weight descending,
/// then neighbor id ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityNetwork {
    k: usize,
    neighbors: Vec<Vec<Neighbor>>,
}

impl SimilarityNetwork {
    pub fn from_lists(k: usize, neighbors: Vec<Vec<Neighbor>>) -> Self {
        SimilarityNetwork { k, neighbors }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_nodes(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, v: NodeId) -> &[Neighbor] {
        &self.neighbors[v as usize]
    }

    pub fn num_edges(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum()
    }

    /// Adds the reverse of every retained edge that is missing. Lists may then
    /// exceed `k`.
    pub fn symmetrized(&self) -> SimilarityNetwork {
        let mut out = self.neighbors.clone();
        for (v, list) in self.neighbors.iter().enumerate() {
            for nb in list {
                let back = &mut out[nb.node as usize];
                if !back.iter().any(|x| x.node == v as NodeId) {
                    back.push(Neighbor {
                        node: v as NodeId,
                        weight: nb.weight,
                    });
                }
            }
        }
        out.iter_mut().for_each(|l| l.sort_by(rank));
        SimilarityNetwork {
            k: self.k,
            neighbors: out,
        }
    }

    /// Writes `src dst weight` lines using the graph's node labels.
    pub fn write(&self, g: &TemporalGraph, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let res: std::io::Result<()> = (|| {
            for (v, list) in self.neighbors.iter().enumerate() {
                for nb in list {
                    writeln!(w, "{} {} {:.17e}", g.label(v as NodeId), g.label(nb.node), nb.weight)?;
                }
            }
            w.flush()
        })();
        res.map_err(|e| Error::io(path, e))
    }
}

/// Reads a dump written by [`SimilarityNetwork::write`].
pub fn read_similarity(g: &TemporalGraph, k: usize, path: impl AsRef<Path>) -> Result<SimilarityNetwork> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut neighbors = vec![Vec::new(); g.num_nodes()];
    for (i, line) in text.lines().enumerate() {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.is_empty() {
            continue;
        }
        let bad = |m: &str| Error::parse(path, i + 1, m.to_owned());
        let [a, b, w] = f[..] else {
            return Err(bad("expected `src dst weight`"));
        };
        let a = g.node_id(a).ok_or_else(|| bad("unknown source node"))?;
        let b = g.node_id(b).ok_or_else(|| bad("unknown target node"))?;
        let weight: f64 = w.parse().map_err(|_| bad("bad weight"))?;
        neighbors[a as usize].push(Neighbor { node: b, weight });
    }
    Ok(SimilarityNetwork { k, neighbors })
}

fn rank(a: &Neighbor, b: &Neighbor) -> std::cmp::Ordering {
    b.weight.total_cmp(&a.weight).then(a.node.cmp(&b.node))
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Keeps, for every node, the `k` most similar other nodes.
pub fn build_similarity_network(proj: &[Vec<f64>], k: usize) -> Result<SimilarityNetwork> {
    let n = proj.len();
    if n < 2 {
        return Err(Error::Validation(format!("similarity network needs at least 2 nodes, got {n}")));
    }
    if k == 0 || k > n - 1 {
        return Err(Error::Config(format!("top-k must be in 1..={}, got {k}", n - 1)));
    }
    let dim = proj[0].len();
    if let Some(bad) = proj.iter().find(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad.len(),
        });
    }
    let neighbors = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut all: Vec<Neighbor> = (0..n)
                .filter(|&u| u != v)
                .map(|u| Neighbor {
                    node: u as NodeId,
                    weight: 1.0 / (1.0 + euclidean(&proj[v], &proj[u])),
                })
                .collect();
            if all.iter().any(|nb| !nb.weight.is_finite()) {
                return Err(Error::NonFinite(format!("similarity weights of node {v}")));
            }
            all.sort_by(rank);
            all.truncate(k);
            Ok(all)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimilarityNetwork { k, neighbors })
}
