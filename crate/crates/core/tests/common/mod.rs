#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsw_core::graphlet_census::{enumerate_census, CensusConfig};
use tsw_core::temporal_graph::{NodeId, TemporalGraph, Timestep};

/// `(node, code, orbit) -> count`.
pub type Counts = BTreeMap<(NodeId, String, u8), u64>;

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for slot in 0..=p.len() {
            let mut q = p.clone();
            q.insert(slot, k - 1);
            out.push(q);
        }
    }
    out
}

fn relabel(events: &[(usize, usize)], perm: &[usize], directed: bool) -> Vec<(usize, usize)> {
    events
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (perm[a], perm[b]);
            if directed || x <= y {
                (x, y)
            } else {
                (y, x)
            }
        })
        .collect()
}

/// Canonical string plus the orbit id of each input position, computed
/// directly from the automorphism group.
pub fn classify(events: &[(usize, usize)], k: usize, directed: bool) -> (String, Vec<u8>) {
    let perms = permutations(k);
    let (best, best_perm) = perms
        .iter()
        .map(|p| (relabel(events, p, directed), p.clone()))
        .min_by(|a, b| a.0.cmp(&b.0))
        .unwrap();
    let autos: Vec<&Vec<usize>> = perms.iter().filter(|p| relabel(&best, p, directed) == best).collect();
    // orbit of canonical position q = {a(q)}; label orbits by smallest member rank
    let orbit_min: Vec<usize> = (0..k).map(|q| autos.iter().map(|a| a[q]).min().unwrap()).collect();
    let mut mins: Vec<usize> = orbit_min.clone();
    mins.sort_unstable();
    mins.dedup();
    let orbit_of_canon: Vec<u8> = orbit_min
        .iter()
        .map(|m| mins.iter().position(|x| x == m).unwrap() as u8)
        .collect();
    let sep = if directed { ">" } else { "-" };
    let code = format!(
        "{}:{}",
        k,
        best.iter().map(|(a, b)| format!("{a}{sep}{b}")).collect::<Vec<_>>().join(",")
    );
    let orbit_of_input = (0..k).map(|p| orbit_of_canon[best_perm[p]]).collect();
    (code, orbit_of_input)
}

/// Enumerates every event subset, keeps those satisfying the constraints in
/// global `(t, id)` order, and counts orbit participations.
pub fn oracle(g: &TemporalGraph, cfg: &CensusConfig) -> Counts {
    let mut order: Vec<usize> = (0..g.num_edges()).collect();
    order.sort_by_key(|&i| (g.edge(i).t, i));
    let m = order.len();
    assert!(m <= 20);
    let mut counts = Counts::new();
    for mask in 1u32..(1 << m) {
        if mask.count_ones() as usize > cfg.max_events {
            continue;
        }
        let seq: Vec<_> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| g.edge(order[i])).collect();
        let ok = seq.windows(2).all(|w| {
            let share = w[1].touches(w[0].src) || w[1].touches(w[0].dst);
            share && w[1].t <= w[0].t + cfg.delta_t
        });
        if !ok {
            continue;
        }
        let mut nodes: Vec<NodeId> = Vec::new();
        let mut pos = |v: NodeId| match nodes.iter().position(|&x| x == v) {
            Some(p) => p,
            None => {
                nodes.push(v);
                nodes.len() - 1
            }
        };
        let events: Vec<(usize, usize)> = seq.iter().map(|e| (pos(e.src), pos(e.dst))).collect();
        if nodes.len() > cfg.max_nodes {
            continue;
        }
        let (code, orbits) = classify(&events, nodes.len(), g.is_directed());
        for (p, &v) in nodes.iter().enumerate() {
            *counts.entry((v, code.clone(), orbits[p])).or_default() += 1;
        }
    }
    counts
}

/// Census counts keyed like [`oracle`].
pub fn census_counts(g: &TemporalGraph, cfg: &CensusConfig) -> Counts {
    let c = enumerate_census(g, cfg).unwrap();
    let mut out = Counts::new();
    for v in 0..g.num_nodes() as NodeId {
        for (j, col) in c.dgdv.columns().iter().enumerate() {
            let n = c.dgdv.get(v, j);
            if n > 0 {
                let code = c.catalog.get(col.type_id).code.to_string();
                out.insert((v, code, col.orbit as u8), n);
            }
        }
    }
    out
}

pub fn random_graph(rng: &mut impl Rng, max_nodes: usize, max_events: usize, t_max: Timestep) -> TemporalGraph {
    let n = rng.random_range(2..=max_nodes);
    let m = rng.random_range(1..=max_events);
    let directed = rng.random_bool(0.5);
    let edges: Vec<(NodeId, NodeId, Timestep)> = (0..m)
        .map(|_| {
            let a = rng.random_range(0..n as NodeId);
            let mut b = rng.random_range(0..n as NodeId - 1);
            if b >= a {
                b += 1;
            }
            (a, b, rng.random_range(0..=t_max))
        })
        .collect();
    TemporalGraph::from_edges(n, &edges, directed).unwrap()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `K_n` with every pair interacting at each of `t = 1..=m`.
pub fn saturating(n: usize, m: u64) -> TemporalGraph {
    let mut edges = Vec::new();
    for t in 1..=m {
        for a in 0..n as NodeId {
            for b in a + 1..n as NodeId {
                edges.push((a, b, t));
            }
        }
    }
    TemporalGraph::from_edges(n, &edges, false).unwrap()
}

/// Two-role planted graph: hubs talk to leaves and each other every step.
pub fn planted_roles(seed: u64, hubs: usize, leaves: usize, steps: u64) -> (TemporalGraph, Vec<(String, String)>) {
    let mut rng = seeded(seed);
    let mut edges = Vec::new();
    for t in 1..=steps {
        for h in 0..hubs {
            for _ in 0..4 {
                edges.push((format!("h{h}"), format!("l{}", rng.random_range(0..leaves)), t));
            }
        }
        for _ in 0..hubs / 2 {
            let a = rng.random_range(0..hubs);
            let b = (a + 1 + rng.random_range(0..hubs - 1)) % hubs;
            edges.push((format!("h{a}"), format!("h{b}"), t));
        }
    }
    let g = TemporalGraph::from_labeled_edges(edges, false);
    let labels = g
        .labels()
        .iter()
        .map(|l| (l.clone(), if l.starts_with('h') { "hub" } else { "leaf" }.to_string()))
        .collect();
    (g, labels)
}
