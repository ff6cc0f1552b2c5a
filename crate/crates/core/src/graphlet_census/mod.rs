//! Constrained dynamic graphlet census and per-node D-GDV extraction.
//!
//! Events are ordered globally by `(t, edge id)`. An occurrence is any
//! strictly increasing run of event indices `e_1 < ... < e_j` with
//! `j <= max_events`, where each event shares a node with its predecessor,
//! `t(e_{i+1}) <= t(e_i) + delta_t`, and at most `max_nodes` distinct nodes
//! are involved. Each occurrence is classified by its canonical code and adds
//! one to the orbit counter of every participating node.

mod canon;

use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

pub use canon::{canonical_code, canonicalize, CanonicalForm, GraphletCode, MAX_EVENTS, MAX_NODES};

use crate::error::{Error, Result};
use crate::temporal_graph::{NodeId, TemporalGraph, Timestep};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CensusConfig {
    pub max_nodes: usize,
    pub max_events: usize,
    pub delta_t: Timestep,
}

impl CensusConfig {
    pub fn new(max_nodes: usize, max_events: usize, delta_t: Timestep) -> Self {
        CensusConfig {
            max_nodes,
            max_events,
            delta_t,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_NODES).contains(&self.max_nodes) {
            return Err(Error::Config(format!(
                "graphlet nodes must be in 2..={MAX_NODES}, got {}",
                self.max_nodes
            )));
        }
        if !(1..=MAX_EVENTS).contains(&self.max_events) {
            return Err(Error::Config(format!(
                "graphlet events must be in 1..={MAX_EVENTS}, got {}",
                self.max_events
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphletType {
    pub id: usize,
    pub code: GraphletCode,
    pub orbit_of_position: Vec<u8>,
    pub num_orbits: usize,
    /// Index of this type's first orbit column in the D-GDV matrix.
    pub first_column: usize,
}

/// Graphlet types discovered by a census, sorted by canonical code.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphletCatalog {
    types: Vec<GraphletType>,
}

impl GraphletCatalog {
    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn types(&self) -> &[GraphletType] {
        &self.types
    }

    pub fn get(&self, id: usize) -> &GraphletType {
        &self.types[id]
    }

    pub fn find(&self, code: &GraphletCode) -> Option<&GraphletType> {
        self.types
            .binary_search_by(|t| t.code.cmp(code))
            .ok()
            .map(|i| &self.types[i])
    }

    pub fn num_orbits(&self) -> usize {
        self.types.iter().map(|t| t.num_orbits).sum()
    }

    /// Types with exactly `nodes` nodes and `events` events.
    pub fn count_with_shape(&self, nodes: usize, events: usize) -> usize {
        self.types
            .iter()
            .filter(|t| t.code.num_nodes() == nodes && t.code.num_events() == events)
            .count()
    }

    /// Writes one `type<TAB>code<TAB>orbit-of-position` line per type.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = String::from("type\tcode\torbits\n");
        for t in &self.types {
            let orbits: Vec<String> = t.orbit_of_position.iter().map(|o| o.to_string()).collect();
            text.push_str(&format!("{}\t{}\t{}\n", t.id, t.code, orbits.join(",")));
        }
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbitColumn {
    pub type_id: usize,
    pub orbit: usize,
}

impl fmt::Display for OrbitColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}_o{}", self.type_id, self.orbit)
    }
}

impl OrbitColumn {
    fn parse(s: &str) -> Option<Self> {
        let rest = s.strip_prefix('g')?;
        let (t, o) = rest.split_once("_o")?;
        Some(OrbitColumn {
            type_id: t.parse().ok()?,
            orbit: o.parse().ok()?,
        })
    }
}

/// Per-node orbit participation counts, row-major `N x P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgdvMatrix {
    rows: usize,
    columns: Vec<OrbitColumn>,
    data: Vec<u64>,
}

impl DgdvMatrix {
    pub fn new(rows: usize, columns: Vec<OrbitColumn>, data: Vec<u64>) -> Result<Self> {
        if data.len() != rows * columns.len() {
            return Err(Error::DimensionMismatch {
                expected: rows * columns.len(),
                got: data.len(),
            });
        }
        Ok(DgdvMatrix { rows, columns, data })
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[OrbitColumn] {
        &self.columns
    }

    pub fn row(&self, v: NodeId) -> &[u64] {
        let p = self.columns.len();
        &self.data[v as usize * p..(v as usize + 1) * p]
    }

    pub fn get(&self, v: NodeId, column: usize) -> u64 {
        self.data[v as usize * self.columns.len() + column]
    }

    pub fn column_index(&self, col: OrbitColumn) -> Option<usize> {
        self.columns.binary_search(&col).ok()
    }

    /// Rows as `f64`, for PCA.
    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|v| self.row(v as NodeId).iter().map(|&c| c as f64).collect())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct Census {
    pub catalog: GraphletCatalog,
    pub dgdv: DgdvMatrix,
    pub occurrences: u64,
}

impl Census {
    pub fn summary(&self) -> String {
        format!(
            "types={} orbits={} occurrences={}",
            self.catalog.len(),
            self.dgdv.num_columns(),
            self.occurrences
        )
    }
}

/// Event list in global `(t, edge id)` order plus per-node incident event indices.
struct EventIndex {
    src: Vec<NodeId>,
    dst: Vec<NodeId>,
    t: Vec<Timestep>,
    incident: Vec<Vec<u32>>,
}

impl EventIndex {
    fn new(g: &TemporalGraph) -> Self {
        let mut order: Vec<usize> = (0..g.num_edges()).collect();
        order.sort_by_key(|&id| (g.edge(id).t, id));
        let mut idx = EventIndex {
            src: Vec::with_capacity(order.len()),
            dst: Vec::with_capacity(order.len()),
            t: Vec::with_capacity(order.len()),
            incident: vec![Vec::new(); g.num_nodes()],
        };
        for (i, &id) in order.iter().enumerate() {
            let e = g.edge(id);
            idx.src.push(e.src);
            idx.dst.push(e.dst);
            idx.t.push(e.t);
            idx.incident[e.src as usize].push(i as u32);
            idx.incident[e.dst as usize].push(i as u32);
        }
        idx
    }

    fn len(&self) -> usize {
        self.t.len()
    }
}

#[derive(Clone, Copy)]
struct Classified {
    local: u32,
    orbit_of_raw: [u8; MAX_NODES],
}

struct TypeCounts {
    code: GraphletCode,
    orbit_of_position: Vec<u8>,
    num_orbits: usize,
    counts: Vec<u64>,
}

/// Per-worker census state.
struct Accumulator {
    num_nodes: usize,
    directed: bool,
    cache: FxHashMap<u128, Classified>,
    types: Vec<TypeCounts>,
    by_code: FxHashMap<GraphletCode, u32>,
    occurrences: u64,
    overflow: bool,
}

/// Occurrence under construction. Nodes are kept in first-appearance order.
struct Partial {
    nodes: [NodeId; MAX_NODES],
    num_nodes: usize,
    raw: [(u8, u8); MAX_EVENTS],
    num_events: usize,
    key: u128,
}

impl Partial {
    fn position(&self, v: NodeId) -> Option<u8> {
        self.nodes[..self.num_nodes].iter().position(|&x| x == v).map(|p| p as u8)
    }

    fn push(&mut self, src: NodeId, dst: NodeId) {
        let a = self.position(src).unwrap_or_else(|| {
            self.nodes[self.num_nodes] = src;
            self.num_nodes += 1;
            (self.num_nodes - 1) as u8
        });
        let b = self.position(dst).unwrap_or_else(|| {
            self.nodes[self.num_nodes] = dst;
            self.num_nodes += 1;
            (self.num_nodes - 1) as u8
        });
        self.raw[self.num_events] = (a, b);
        self.num_events += 1;
        self.key = (self.key << 6) | ((a as u128) << 3) | b as u128;
    }

    fn lookup_key(&self) -> u128 {
        self.key | ((self.num_events as u128) << 100)
    }
}

impl Accumulator {
    fn new(num_nodes: usize, directed: bool) -> Self {
        Accumulator {
            num_nodes,
            directed,
            cache: FxHashMap::default(),
            types: Vec::new(),
            by_code: FxHashMap::default(),
            occurrences: 0,
            overflow: false,
        }
    }

    fn classify(&mut self, p: &Partial) -> Classified {
        let key = p.lookup_key();
        if let Some(c) = self.cache.get(&key) {
            return *c;
        }
        let form = canonicalize(p.num_nodes, &p.raw[..p.num_events], self.directed);
        let mut orbit_of_raw = [0u8; MAX_NODES];
        for (pos, slot) in orbit_of_raw.iter_mut().enumerate().take(p.num_nodes) {
            *slot = form.orbit_of_input(pos);
        }
        let local = match self.by_code.get(&form.code) {
            Some(&l) => l,
            None => {
                let l = self.types.len() as u32;
                self.by_code.insert(form.code.clone(), l);
                self.types.push(TypeCounts {
                    code: form.code,
                    counts: vec![0; self.num_nodes * form.num_orbits],
                    orbit_of_position: form.orbit_of_position,
                    num_orbits: form.num_orbits,
                });
                l
            }
        };
        let c = Classified { local, orbit_of_raw };
        self.cache.insert(key, c);
        c
    }

    fn record(&mut self, p: &Partial) {
        let c = self.classify(p);
        let t = &mut self.types[c.local as usize];
        for i in 0..p.num_nodes {
            let slot = &mut t.counts[p.nodes[i] as usize * t.num_orbits + c.orbit_of_raw[i] as usize];
            match slot.checked_add(1) {
                Some(v) => *slot = v,
                None => self.overflow = true,
            }
        }
        self.occurrences += 1;
    }

    fn run_from(&mut self, ev: &EventIndex, cfg: &CensusConfig, start: usize) {
        let mut p = Partial {
            nodes: [0; MAX_NODES],
            num_nodes: 0,
            raw: [(0, 0); MAX_EVENTS],
            num_events: 0,
            key: 0,
        };
        p.push(ev.src[start], ev.dst[start]);
        self.extend(ev, cfg, &mut p, start);
    }

    fn extend(&mut self, ev: &EventIndex, cfg: &CensusConfig, p: &mut Partial, last: usize) {
        self.record(p);
        if p.num_events == cfg.max_events {
            return;
        }
        let limit = ev.t[last].saturating_add(cfg.delta_t);
        let a = candidates(&ev.incident[ev.src[last] as usize], last, ev, limit);
        let b = candidates(&ev.incident[ev.dst[last] as usize], last, ev, limit);
        // Merge the two ascending lists; an event joining both endpoints appears in each.
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let next = match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) if x == y => {
                    i += 1;
                    j += 1;
                    x
                }
                (Some(&x), Some(&y)) if x < y => {
                    i += 1;
                    x
                }
                (Some(_), Some(&y)) => {
                    j += 1;
                    y
                }
                (Some(&x), None) => {
                    i += 1;
                    x
                }
                (None, Some(&y)) => {
                    j += 1;
                    y
                }
                (None, None) => unreachable!(),
            } as usize;
            let (s, d) = (ev.src[next], ev.dst[next]);
            let added = usize::from(p.position(s).is_none()) + usize::from(p.position(d).is_none());
            if p.num_nodes + added > cfg.max_nodes {
                continue;
            }
            let saved = (p.num_nodes, p.key);
            p.push(s, d);
            self.extend(ev, cfg, p, next);
            p.num_events -= 1;
            (p.num_nodes, p.key) = saved;
        }
    }

    fn merge(mut self, other: Accumulator) -> Accumulator {
        for t in other.types {
            match self.by_code.get(&t.code) {
                Some(&l) => {
                    let mine = &mut self.types[l as usize].counts;
                    for (m, o) in mine.iter_mut().zip(&t.counts) {
                        match m.checked_add(*o) {
                            Some(v) => *m = v,
                            None => self.overflow = true,
                        }
                    }
                }
                None => {
                    self.by_code.insert(t.code.clone(), self.types.len() as u32);
                    self.types.push(t);
                }
            }
        }
        self.occurrences += other.occurrences;
        self.overflow |= other.overflow;
        self
    }
}

/// Incident events after `last` whose timestamp is within `limit`.
fn candidates<'a>(list: &'a [u32], last: usize, ev: &EventIndex, limit: Timestep) -> &'a [u32] {
    let lo = list.partition_point(|&i| i as usize <= last);
    let hi = lo + list[lo..].partition_point(|&i| ev.t[i as usize] <= limit);
    &list[lo..hi]
}

/// Runs the census. Work is split over starting events on the current rayon
/// pool; the result does not depend on the number of threads.
pub fn enumerate_census(g: &TemporalGraph, cfg: &CensusConfig) -> Result<Census> {
    cfg.validate()?;
    if g.num_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    let ev = EventIndex::new(g);
    let n = g.num_nodes();
    let directed = g.is_directed();
    let min_len = (ev.len() / (rayon::current_num_threads() * 16)).max(1);
    let acc = (0..ev.len())
        .into_par_iter()
        .with_min_len(min_len)
        .fold(
            || Accumulator::new(n, directed),
            |mut acc, start| {
                acc.run_from(&ev, cfg, start);
                acc
            },
        )
        .reduce(|| Accumulator::new(n, directed), Accumulator::merge);
    if acc.overflow {
        return Err(Error::CountOverflow);
    }

    let mut types = acc.types;
    types.sort_by(|a, b| a.code.cmp(&b.code));
    let mut columns = Vec::new();
    let mut catalog = Vec::with_capacity(types.len());
    for (id, t) in types.iter().enumerate() {
        catalog.push(GraphletType {
            id,
            code: t.code.clone(),
            orbit_of_position: t.orbit_of_position.clone(),
            num_orbits: t.num_orbits,
            first_column: columns.len(),
        });
        columns.extend((0..t.num_orbits).map(|orbit| OrbitColumn { type_id: id, orbit }));
    }
    let p = columns.len();
    let mut data = vec![0u64; n * p];
    for (t, meta) in types.iter().zip(&catalog) {
        for v in 0..n {
            let src = &t.counts[v * t.num_orbits..(v + 1) * t.num_orbits];
            data[v * p + meta.first_column..v * p + meta.first_column + t.num_orbits].copy_from_slice(src);
        }
    }
    Ok(Census {
        catalog: GraphletCatalog { types: catalog },
        dgdv: DgdvMatrix { rows: n, columns, data },
        occurrences: acc.occurrences,
    })
}

/// Number of dynamic graphlet types with exactly `n` nodes and `m` events:
/// `sum_{i=0}^{n-2} (-1)^(n+i) C(n-2, i) (2i+1)^(m-1) / (2 (n-2)!)`, evaluated
/// exactly.
pub fn graphlet_type_count(n: u32, m: u32) -> Result<u128> {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Signed, ToPrimitive, Zero};

    if n < 3 || m < 1 {
        return Err(Error::Config(format!("graphlet_type_count needs n >= 3 and m >= 1, got ({n}, {m})")));
    }
    let k = n - 2;
    let mut binom = BigInt::one();
    let mut sum = BigInt::zero();
    for i in 0..=k {
        if i > 0 {
            binom = binom * BigInt::from(k - i + 1) / BigInt::from(i);
        }
        let term = &binom * BigInt::from(2 * i + 1).pow(m - 1);
        if (n + i).is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let factorial: BigInt = (1..=k).map(BigInt::from).product();
    let value = BigRational::new(sum, BigInt::from(2) * factorial);
    if !value.is_integer() || value.is_negative() {
        return Err(Error::Internal(format!("S({n},{m}) evaluated to non-integer {value}")));
    }
    value
        .to_integer()
        .to_u128()
        .ok_or_else(|| Error::Internal(format!("S({n},{m}) does not fit in u128")))
}

/// Writes a header `node g<type>_o<orbit> ...` followed by one row per node.
pub fn export_dgdv(g: &TemporalGraph, m: &DgdvMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    write!(out, "node").map_err(io)?;
    for c in m.columns() {
        write!(out, " {c}").map_err(io)?;
    }
    writeln!(out).map_err(io)?;
    for v in 0..m.num_rows() {
        write!(out, "{}", g.label(v as NodeId)).map_err(io)?;
        for c in m.row(v as NodeId) {
            write!(out, " {c}").map_err(io)?;
        }
        writeln!(out).map_err(io)?;
    }
    out.flush().map_err(io)
}

/// Reads a file written by [`export_dgdv`]; returns the row labels and the matrix.
pub fn read_dgdv(path: impl AsRef<Path>) -> Result<(Vec<String>, DgdvMatrix)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::parse(path, 1, "missing header"))?;
    let mut head = header.split_whitespace();
    if head.next() != Some("node") {
        return Err(Error::parse(path, 1, "header must start with `node`"));
    }
    let columns: Vec<OrbitColumn> = head
        .map(|c| OrbitColumn::parse(c).ok_or_else(|| Error::parse(path, 1, format!("bad column `{c}`"))))
        .collect::<Result<_>>()?;
    let mut labels = Vec::new();
    let mut data = Vec::new();
    for (i, line) in lines {
        let mut parts = line.split_whitespace();
        let Some(label) = parts.next() else { continue };
        labels.push(label.to_owned());
        let before = data.len();
        for p in parts {
            data.push(
                p.parse::<u64>()
                    .map_err(|_| Error::parse(path, i + 1, format!("bad count `{p}`")))?,
            );
        }
        if data.len() - before != columns.len() {
            return Err(Error::parse(path, i + 1, "row length does not match header"));
        }
    }
    let m = DgdvMatrix::new(labels.len(), columns, data)?;
    Ok((labels, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn census(edges: &[(NodeId, NodeId, Timestep)], n: usize, cfg: CensusConfig) -> Census {
        let g = TemporalGraph::from_edges(n, edges, false).unwrap();
        enumerate_census(&g, &cfg).unwrap()
    }

    #[test]
    fn type_count_closed_form() {
        assert_eq!(graphlet_type_count(3, 2).unwrap(), 1);
        assert_eq!(graphlet_type_count(3, 3).unwrap(), 4);
        assert_eq!(graphlet_type_count(4, 3).unwrap(), 2);
        assert_eq!(graphlet_type_count(3, 1).unwrap(), 0);
        assert!(graphlet_type_count(2, 3).is_err());
    }

    #[test]
    fn path_of_two_events() {
        // a=0, b=1, c=2
        let c = census(&[(0, 1, 1), (1, 2, 2)], 3, CensusConfig::new(3, 2, 1));
        let two_event: Vec<&GraphletType> = c.catalog.types().iter().filter(|t| t.code.num_events() == 2).collect();
        assert_eq!(two_event.len(), 1);
        let t = two_event[0];
        assert_eq!(t.num_orbits, 3);
        // Every node appears once in the 2-event occurrence, each in its own orbit.
        let cols: Vec<usize> = (0..3).map(|o| t.first_column + o).collect();
        for v in 0..3 {
            let hits: u64 = cols.iter().map(|&col| c.dgdv.get(v, col)).sum();
            assert_eq!(hits, 1);
        }
        let center = cols.iter().position(|&col| c.dgdv.get(1, col) == 1).unwrap();
        let a = cols.iter().position(|&col| c.dgdv.get(0, col) == 1).unwrap();
        let b = cols.iter().position(|&col| c.dgdv.get(2, col) == 1).unwrap();
        assert!(center != a && center != b && a != b);
        assert_eq!(c.occurrences, 3);
    }

    #[test]
    fn disconnected_events_stay_single() {
        let c = census(&[(0, 1, 1), (2, 3, 5)], 4, CensusConfig::new(4, 2, 1));
        assert_eq!(c.occurrences, 2);
        assert_eq!(c.catalog.len(), 1);
        assert_eq!(c.catalog.get(0).code.num_events(), 1);
    }

    #[test]
    fn repeated_edge_occurrence() {
        let c = census(&[(0, 1, 1), (0, 1, 2)], 2, CensusConfig::new(2, 2, 1));
        assert_eq!(c.occurrences, 3);
        assert_eq!(c.catalog.count_with_shape(2, 2), 1);
    }

    #[test]
    fn equal_timestamps_count_once() {
        let c = census(&[(0, 1, 1), (1, 2, 1)], 3, CensusConfig::new(3, 2, 0));
        assert_eq!(c.occurrences, 3);
    }

    #[test]
    fn gap_beyond_delta_t_breaks_sequence() {
        let c = census(&[(0, 1, 1), (1, 2, 3)], 3, CensusConfig::new(3, 2, 1));
        assert_eq!(c.occurrences, 2);
        let c = census(&[(0, 1, 1), (1, 2, 3)], 3, CensusConfig::new(3, 2, 2));
        assert_eq!(c.occurrences, 3);
    }

    #[test]
    fn node_budget_enforced() {
        let c = census(&[(0, 1, 1), (1, 2, 2)], 3, CensusConfig::new(2, 2, 1));
        assert_eq!(c.occurrences, 2);
    }

    #[test]
    fn empty_graph_rejected() {
        let g = TemporalGraph::from_edges(2, &[], false).unwrap();
        assert!(matches!(
            enumerate_census(&g, &CensusConfig::new(3, 2, 1)),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn config_validation() {
        assert!(CensusConfig::new(1, 2, 1).validate().is_err());
        assert!(CensusConfig::new(3, 0, 1).validate().is_err());
        assert!(CensusConfig::new(9, 2, 1).validate().is_err());
        assert!(CensusConfig::new(4, 6, 1).validate().is_ok());
    }

    #[test]
    fn summary_line() {
        let c = census(&[(0, 1, 1), (1, 2, 2)], 3, CensusConfig::new(3, 2, 1));
        assert_eq!(c.summary(), "types=2 orbits=4 occurrences=3");
    }

    #[test]
    fn export_and_reload() {
        let g = TemporalGraph::from_labeled_edges([("a", "b", 1), ("b", "c", 2)], false);
        let c = enumerate_census(&g, &CensusConfig::new(3, 2, 1)).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        export_dgdv(&g, &c.dgdv, f.path()).unwrap();
        let text = std::fs::read_to_string(f.path()).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("node g0_o0 g1_o0 g1_o1 g1_o2\n"));
        let (labels, m) = read_dgdv(f.path()).unwrap();
        assert_eq!(labels, vec!["a", "b", "c"]);
        assert_eq!(m, c.dgdv);
    }

    #[test]
    fn export_header_only_when_no_rows() {
        let g = TemporalGraph::from_edges(0, &[], false).unwrap();
        let m = DgdvMatrix::new(0, vec![], vec![]).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        export_dgdv(&g, &m, f.path()).unwrap();
        assert_eq!(std::fs::read_to_string(f.path()).unwrap(), "node\n");
        let (labels, back) = read_dgdv(f.path()).unwrap();
        assert!(labels.is_empty());
        assert_eq!(back, m);
    }
}
