//! Temporal-structural random walks.
//!
//! A walk starts on a temporal edge drawn uniformly from the edge multiset.
//! Each extension flips an `alpha` coin: heads follows a similarity edge
//! (time unchanged), tails follows a temporal edge at or after the current
//! time with probability proportional to `exp(t - t')`.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::similarity_net::{Neighbor, SimilarityNetwork};
use crate::temporal_graph::{Incidence, NodeId, TemporalGraph, Timestep};

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WalkConfig {
    pub alpha: f64,
    /// Maximum number of nodes in a walk.
    pub walk_length: usize,
    /// Total number of walks in the corpus.
    pub num_walks: usize,
    /// Use `t' > t` instead of `t' >= t` for temporal steps.
    pub strict_time: bool,
    pub seed: u64,
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config(format!("alpha must be in [0, 1], got {}", self.alpha)));
        }
        if self.walk_length < 2 {
            return Err(Error::Config(format!(
                "walk length must be at least 2, got {}",
                self.walk_length
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Walk {
    pub nodes: Vec<NodeId>,
    /// Current time when each node was reached.
    pub times: Vec<Timestep>,
}

impl Walk {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WalkCounters {
    /// Includes the start edge of every walk.
    pub temporal_steps: u64,
    pub structural_steps: u64,
    /// Walks that stopped before reaching the maximum length.
    pub early_terminations: u64,
    /// Structural steps taken because the temporal neighborhood was empty.
    pub fallback_steps: u64,
}

impl WalkCounters {
    fn add(&mut self, o: &WalkCounters) {
        self.temporal_steps += o.temporal_steps;
        self.structural_steps += o.structural_steps;
        self.early_terminations += o.early_terminations;
        self.fallback_steps += o.fallback_steps;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WalkCorpus {
    pub walks: Vec<Walk>,
    pub counters: WalkCounters,
}

impl WalkCorpus {
    pub fn len(&self) -> usize {
        self.walks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walks.is_empty()
    }

    /// One walk per line, space-separated node labels.
    pub fn write(&self, g: &TemporalGraph, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let res: std::io::Result<()> = (|| {
            for walk in &self.walks {
                let line: Vec<&str> = walk.nodes.iter().map(|&v| g.label(v)).collect();
                writeln!(w, "{}", line.join(" "))?;
            }
            w.flush()
        })();
        res.map_err(|e| Error::io(path, e))
    }
}

/// Reads a corpus written by [`WalkCorpus::write`]. Times and counters are not stored.
pub fn read_walks(g: &TemporalGraph, path: impl AsRef<Path>) -> Result<Vec<Vec<NodeId>>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let walk = line
            .split_whitespace()
            .map(|l| {
                g.node_id(l)
                    .ok_or_else(|| Error::parse(path, i + 1, format!("unknown node `{l}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(walk);
    }
    Ok(out)
}

fn neighborhood(g: &TemporalGraph, v: NodeId, t: Timestep, strict: bool) -> &[Incidence] {
    if strict {
        g.temporal_neighborhood_strict(v, t)
    } else {
        g.temporal_neighborhood(v, t)
    }
}

/// Transition probabilities over the temporal neighborhood of `(v, t)`,
/// proportional to `exp(t - t')`. Empty when the walk cannot continue.
pub fn temporal_distribution(g: &TemporalGraph, v: NodeId, t: Timestep, strict: bool) -> Vec<(Incidence, f64)> {
    let nb = neighborhood(g, v, t, strict);
    let Some(first) = nb.first() else {
        return Vec::new();
    };
    // Lists are time-sorted; shifting by the earliest t' keeps exp() in range.
    let t0 = first.t;
    let w: Vec<f64> = nb.iter().map(|inc| (-((inc.t - t0) as f64)).exp()).collect();
    let z: f64 = w.iter().sum();
    nb.iter().zip(w).map(|(&inc, x)| (inc, x / z)).collect()
}

/// Transition probabilities over the retained similarity neighbors of `v`.
pub fn structural_distribution(s: &SimilarityNetwork, v: NodeId) -> Vec<(NodeId, f64)> {
    let nb = s.neighbors(v);
    let z: f64 = nb.iter().map(|n| n.weight).sum();
    nb.iter().map(|n| (n.node, n.weight / z)).collect()
}

/// Index drawn from unnormalized weights `w` by inverse CDF.
fn draw<R: Rng + ?Sized>(rng: &mut R, w: impl Iterator<Item = f64> + Clone) -> usize {
    let total: f64 = w.clone().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, x) in w.enumerate() {
        acc += x;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

fn temporal_step<R: Rng + ?Sized>(rng: &mut R, nb: &[Incidence]) -> Incidence {
    let t0 = nb[0].t;
    nb[draw(rng, nb.iter().map(|inc| (-((inc.t - t0) as f64)).exp()))]
}

fn structural_step<R: Rng + ?Sized>(rng: &mut R, nb: &[Neighbor]) -> NodeId {
    nb[draw(rng, nb.iter().map(|n| n.weight))].node
}

/// Samples one walk from a uniformly drawn start edge.
pub fn sample_walk<R: Rng + ?Sized>(
    g: &TemporalGraph,
    s: &SimilarityNetwork,
    cfg: &WalkConfig,
    rng: &mut R,
    counters: &mut WalkCounters,
) -> Result<Walk> {
    if g.num_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    let start = rng.random_range(0..g.num_edges());
    sample_walk_from(g, s, cfg, start, rng, counters)
}

/// Samples one walk starting on edge `start`. Undirected edges are entered
/// from a random endpoint.
pub fn sample_walk_from<R: Rng + ?Sized>(
    g: &TemporalGraph,
    s: &SimilarityNetwork,
    cfg: &WalkConfig,
    start: usize,
    rng: &mut R,
    counters: &mut WalkCounters,
) -> Result<Walk> {
    let e = g.edge(start);
    let (u, mut v) = if !g.is_directed() && rng.random_bool(0.5) {
        (e.dst, e.src)
    } else {
        (e.src, e.dst)
    };
    let mut t = e.t;
    let mut walk = Walk {
        nodes: Vec::with_capacity(cfg.walk_length),
        times: Vec::with_capacity(cfg.walk_length),
    };
    walk.nodes.extend([u, v]);
    walk.times.extend([t, t]);
    counters.temporal_steps += 1;

    let coin = |rng: &mut R| match cfg.alpha {
        a if a <= 0.0 => false,
        a if a >= 1.0 => true,
        a => rng.random::<f64>() < a,
    };

    while walk.nodes.len() < cfg.walk_length {
        if coin(rng) {
            let nb = s.neighbors(v);
            if !nb.is_empty() {
                v = structural_step(rng, nb);
                counters.structural_steps += 1;
            } else {
                let nb = neighborhood(g, v, t, cfg.strict_time);
                if nb.is_empty() {
                    counters.early_terminations += 1;
                    break;
                }
                let inc = temporal_step(rng, nb);
                v = inc.neighbor;
                t = inc.t;
                counters.temporal_steps += 1;
            }
        } else {
            let nb = neighborhood(g, v, t, cfg.strict_time);
            if !nb.is_empty() {
                let inc = temporal_step(rng, nb);
                v = inc.neighbor;
                t = inc.t;
                counters.temporal_steps += 1;
            } else if !s.neighbors(v).is_empty() && coin(rng) {
                v = structural_step(rng, s.neighbors(v));
                counters.structural_steps += 1;
                counters.fallback_steps += 1;
            } else {
                counters.early_terminations += 1;
                break;
            }
        }
        walk.nodes.push(v);
        walk.times.push(t);
    }
    Ok(walk)
}

/// Per-walk RNG: stream `index` of the ChaCha8 generator keyed by `seed`.
pub fn walk_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Samples `cfg.num_walks` walks. Walk `i` uses [`walk_rng`]`(seed, i)`, so the
/// corpus does not depend on the number of threads.
pub fn generate_corpus(g: &TemporalGraph, s: &SimilarityNetwork, cfg: &WalkConfig) -> Result<WalkCorpus> {
    cfg.validate()?;
    if g.num_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    if s.num_nodes() != g.num_nodes() {
        return Err(Error::DimensionMismatch {
            expected: g.num_nodes(),
            got: s.num_nodes(),
        });
    }
    let results: Vec<(Walk, WalkCounters)> = (0..cfg.num_walks)
        .into_par_iter()
        .map(|i| {
            let mut rng = walk_rng(cfg.seed, i as u64);
            let mut c = WalkCounters::default();
            sample_walk(g, s, cfg, &mut rng, &mut c).map(|w| (w, c))
        })
        .collect::<Result<_>>()?;
    let mut corpus = WalkCorpus::default();
    for (w, c) in results {
        corpus.counters.add(&c);
        corpus.walks.push(w);
    }
    Ok(corpus)
}
