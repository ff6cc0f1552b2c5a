//! End-to-end pipeline with content-addressed stage caching.
//!
//! Stages run in order: census, pca, similarity, walks, embeddings, eval.
//! Each stage has a key hashed from its parameters and the keys of the stages
//! it reads. A stage whose key and output checksums match `manifest.json` is
//! loaded from disk instead of recomputed.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::embedding_space::{fit_pca, read_rows, write_rows, PcaOptions};
use crate::error::{Error, Result};
use crate::evaluation::{evaluate_embeddings, CvOptions, EvalReport};
use crate::graphlet_census::{enumerate_census, export_dgdv, read_dgdv, CensusConfig, DgdvMatrix};
use crate::similarity_net::{build_similarity_network, read_similarity, SimilarityNetwork};
use crate::skipgram::{export_embeddings, read_embeddings, train, TrainConfig};
use crate::temporal_graph::{load_edge_list, load_labels, NodeId, NodeLabels, TemporalGraph};
use crate::walker::{generate_corpus, read_walks, WalkConfig, WalkCounters};

pub const MANIFEST: &str = "manifest.json";

/// Per-dataset defaults for walk length, graphlet size and top-k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Hospital,
    Workplace,
    Enron,
    PpiAging,
    Brain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PresetParams {
    pub walk_length: usize,
    pub graphlet_nodes: usize,
    pub graphlet_events: usize,
    pub topk: usize,
    pub delta_t: u64,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Hospital,
        Preset::Workplace,
        Preset::Enron,
        Preset::PpiAging,
        Preset::Brain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Hospital => "hospital",
            Preset::Workplace => "workplace",
            Preset::Enron => "enron",
            Preset::PpiAging => "ppi-aging",
            Preset::Brain => "brain",
        }
    }

    pub fn from_name(s: &str) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.name() == s)
    }

    /// `delta_t` is an assumption for every preset.
    pub fn params(self) -> PresetParams {
        let (walk_length, graphlet_nodes, graphlet_events, topk) = match self {
            Preset::Hospital => (25, 4, 6, 5),
            Preset::Workplace => (15, 5, 4, 5),
            Preset::Enron => (20, 5, 4, 5),
            Preset::PpiAging => (30, 4, 4, 100),
            Preset::Brain => (10, 4, 4, 20),
        };
        PresetParams {
            walk_length,
            graphlet_nodes,
            graphlet_events,
            topk,
            delta_t: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkCount {
    Total(usize),
    PerNode(usize),
}

impl WalkCount {
    pub fn resolve(self, num_nodes: usize) -> usize {
        match self {
            WalkCount::Total(n) => n,
            WalkCount::PerNode(k) => k * num_nodes,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub labels: Option<PathBuf>,
    pub directed: bool,
    pub census: CensusConfig,
    pub pca: PcaOptions,
    pub topk: usize,
    pub symmetrize: bool,
    pub alpha: f64,
    pub walk_length: usize,
    pub num_walks: WalkCount,
    pub strict_time: bool,
    pub train: TrainConfig,
    pub cv: CvOptions,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl PipelineConfig {
    /// Defaults for everything except paths.
    pub fn new(input: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            input: input.into(),
            labels: None,
            directed: false,
            census: CensusConfig::new(4, 6, 1),
            pca: PcaOptions::default(),
            topk: 5,
            symmetrize: false,
            alpha: 0.05,
            walk_length: 25,
            num_walks: WalkCount::PerNode(10),
            strict_time: false,
            train: TrainConfig::default(),
            cv: CvOptions::default(),
            seed: 0,
            out_dir: out_dir.into(),
        }
    }

    pub fn apply_preset(&mut self, p: Preset) {
        let q = p.params();
        self.walk_length = q.walk_length;
        self.census = CensusConfig::new(q.graphlet_nodes, q.graphlet_events, q.delta_t);
        self.topk = q.topk;
    }

    pub fn walk_config(&self, num_nodes: usize) -> WalkConfig {
        WalkConfig {
            alpha: self.alpha,
            walk_length: self.walk_length,
            num_walks: self.num_walks.resolve(num_nodes),
            strict_time: self.strict_time,
            seed: self.seed,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            seed: self.seed,
            ..self.train
        }
    }

    pub fn cv_options(&self) -> CvOptions {
        CvOptions {
            seed: self.seed,
            ..self.cv
        }
    }

    pub fn validate(&self) -> Result<()> {
        for p in std::iter::once(&self.input).chain(&self.labels) {
            if !p.is_file() {
                return Err(Error::Validation(format!("input file {} does not exist", p.display())));
            }
        }
        self.census.validate()?;
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config(format!("alpha must be in [0, 1], got {}", self.alpha)));
        }
        if self.walk_length < 2 {
            return Err(Error::Config("walk length must be at least 2".into()));
        }
        if self.topk == 0 {
            return Err(Error::Config("top-k must be positive".into()));
        }
        if !(self.pca.variance_target > 0.0 && self.pca.variance_target <= 1.0) {
            return Err(Error::Config("variance target must be in (0, 1]".into()));
        }
        self.train_config().validate()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub key: String,
    /// Output file name to sha256 of its contents.
    pub outputs: BTreeMap<String, String>,
    pub info: serde_json::Value,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub params: serde_json::Value,
    pub stages: BTreeMap<String, StageRecord>,
}

impl Manifest {
    pub fn load(dir: &Path) -> Option<Manifest> {
        let text = fs::read_to_string(dir.join(MANIFEST)).ok()?;
        serde_json::from_str(&text).ok()
    }

    fn save(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST);
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Internal(e.to_string()))? + "\n";
        // leave the file untouched on a fully cached rerun
        if fs::read_to_string(&path).is_ok_and(|old| old == text) {
            return Ok(());
        }
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn file_hash(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

fn stage_key(name: &str, parts: &[&str]) -> String {
    let mut h = Sha256::new();
    h.update(name.as_bytes());
    for p in parts {
        h.update([0u8]);
        h.update(p.as_bytes());
    }
    hex::encode(h.finalize())
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("config serializes")
}

/// Directory plus its manifest; runs or reuses stages.
struct StageCache {
    dir: PathBuf,
    manifest: Manifest,
    reused: Vec<(String, bool)>,
}

impl StageCache {
    fn open(dir: &Path, params: serde_json::Value) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut manifest = Manifest::load(dir).unwrap_or_default();
        manifest.params = params;
        Ok(StageCache {
            dir: dir.to_path_buf(),
            manifest,
            reused: Vec::new(),
        })
    }

    fn is_fresh(&self, name: &str, key: &str) -> bool {
        let Some(rec) = self.manifest.stages.get(name) else {
            return false;
        };
        rec.key == key
            && rec
                .outputs
                .iter()
                .all(|(f, h)| file_hash(&self.dir.join(f)).is_ok_and(|x| &x == h))
    }

    /// Loads the stage from disk when fresh, otherwise computes it. `compute`
    /// writes `outputs` and returns the value plus manifest info.
    fn run<T>(
        &mut self,
        name: &'static str,
        key: &str,
        outputs: &[&str],
        load: impl FnOnce(&Path, &serde_json::Value) -> Result<T>,
        compute: impl FnOnce(&Path) -> Result<(T, serde_json::Value)>,
    ) -> Result<T> {
        let wrap = |e: Error| Error::Stage {
            stage: name,
            source: Box::new(e),
        };
        if self.is_fresh(name, key) {
            let info = self.manifest.stages[name].info.clone();
            match load(&self.dir, &info) {
                Ok(v) => {
                    log::info!("stage {name}: cached");
                    self.reused.push((name.to_owned(), true));
                    return Ok(v);
                }
                Err(e) => log::warn!("stage {name}: cache unreadable ({e}), recomputing"),
            }
        }
        log::info!("stage {name}: running");
        let (v, info) = compute(&self.dir).map_err(wrap)?;
        let mut out = BTreeMap::new();
        for f in outputs {
            out.insert((*f).to_owned(), file_hash(&self.dir.join(f)).map_err(wrap)?);
        }
        self.manifest.stages.insert(
            name.to_owned(),
            StageRecord {
                key: key.to_owned(),
                outputs: out,
                info,
            },
        );
        self.manifest.save(&self.dir)?;
        self.reused.push((name.to_owned(), false));
        Ok(v)
    }

    fn finish(self) -> Result<Vec<(String, bool)>> {
        self.manifest.save(&self.dir)?;
        Ok(self.reused)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub mean_ap: f64,
    pub std_ap: f64,
    pub mean_auroc: f64,
    pub std_auroc: f64,
}

impl From<&EvalReport> for EvalSummary {
    fn from(r: &EvalReport) -> Self {
        EvalSummary {
            mean_ap: r.mean_ap,
            std_ap: r.std_ap,
            mean_auroc: r.mean_auroc,
            std_auroc: r.std_auroc,
        }
    }
}

/// Graph, labels and the alpha-independent stages.
pub struct Prepared {
    pub graph: TemporalGraph,
    pub labels: Option<NodeLabels>,
    pub dgdv: DgdvMatrix,
    pub projection: Vec<Vec<f64>>,
    pub similarity: SimilarityNetwork,
    pub census_summary: String,
    input_hash: String,
    labels_hash: Option<String>,
    similarity_key: String,
    pub reused: Vec<(String, bool)>,
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub graph_summary: String,
    pub census_summary: String,
    pub pca_components: usize,
    pub similarity_edges: usize,
    pub num_walks: usize,
    pub counters: WalkCounters,
    pub eval: Option<EvalSummary>,
    /// Set when the eval stage ran in this call.
    pub report: Option<EvalReport>,
    /// `(stage, reused)` in execution order.
    pub stages: Vec<(String, bool)>,
}

fn upstream_params(cfg: &PipelineConfig) -> serde_json::Value {
    serde_json::json!({
        "input": cfg.input,
        "labels": cfg.labels,
        "directed": cfg.directed,
        "census": cfg.census,
        "pca": cfg.pca,
        "topk": cfg.topk,
        "symmetrize": cfg.symmetrize,
    })
}

fn downstream_params(cfg: &PipelineConfig, num_nodes: usize) -> serde_json::Value {
    serde_json::json!({
        "walk": cfg.walk_config(num_nodes),
        "train": cfg.train_config(),
        "cv": cfg.cv_options(),
    })
}

/// Loads inputs and runs census, PCA and similarity stages in `cfg.out_dir`.
pub fn prepare(cfg: &PipelineConfig) -> Result<Prepared> {
    cfg.validate()?;
    let graph = load_edge_list(&cfg.input, cfg.directed)?;
    if graph.num_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    log::info!("graph: {}", graph.summary());
    let labels = cfg.labels.as_ref().map(|p| load_labels(p, &graph)).transpose()?;
    let input_hash = file_hash(&cfg.input)?;
    let labels_hash = cfg.labels.as_ref().map(|p| file_hash(p)).transpose()?;

    let mut params = upstream_params(cfg);
    params["seed"] = cfg.seed.into();
    params["alpha"] = cfg.alpha.into();
    if let serde_json::Value::Object(m) = downstream_params(cfg, graph.num_nodes()) {
        for (k, v) in m {
            params[k] = v;
        }
    }
    let mut cache = StageCache::open(&cfg.out_dir, params)?;

    let census_key = stage_key("census", &[&input_hash, &json(&cfg.directed), &json(&cfg.census)]);
    let g = &graph;
    let (dgdv, census_summary) = cache.run(
        "census",
        &census_key,
        &["dgdv.tsv", "catalog.tsv"],
        |dir, info| {
            let (labels, m) = read_dgdv(dir.join("dgdv.tsv"))?;
            if labels != g.labels() {
                return Err(Error::Internal("cached D-GDV rows do not match graph".into()));
            }
            Ok((m, info["summary"].as_str().unwrap_or_default().to_owned()))
        },
        |dir| {
            let census = enumerate_census(g, &cfg.census)?;
            export_dgdv(g, &census.dgdv, dir.join("dgdv.tsv"))?;
            census.catalog.write(dir.join("catalog.tsv"))?;
            let summary = census.summary();
            log::info!("census: {summary}");
            let info = serde_json::json!({ "summary": summary });
            Ok(((census.dgdv, summary), info))
        },
    )?;

    let pca_key = stage_key("pca", &[&census_key, &json(&cfg.pca)]);
    let projection = cache.run(
        "pca",
        &pca_key,
        &["pca_projection.tsv", "pca_model.txt"],
        |dir, _| Ok(read_rows(dir.join("pca_projection.tsv"))?.1),
        |dir| {
            let rows = dgdv.to_f64_rows();
            let model = fit_pca(&rows, &cfg.pca)?;
            let proj = model.project_rows(&rows)?;
            write_rows(g.labels(), &proj, dir.join("pca_projection.tsv"))?;
            model.write(dir.join("pca_model.txt"))?;
            let info = serde_json::json!({
                "components": model.num_components(),
                "explained_variance_ratio": model.explained_variance_ratio(),
            });
            Ok((proj, info))
        },
    )?;

    let sim_key = stage_key("similarity", &[&pca_key, &json(&cfg.topk), &json(&cfg.symmetrize)]);
    let similarity = cache.run(
        "similarity",
        &sim_key,
        &["similarity.tsv"],
        |dir, _| read_similarity(g, cfg.topk, dir.join("similarity.tsv")),
        |dir| {
            let mut s = build_similarity_network(&projection, cfg.topk)?;
            if cfg.symmetrize {
                s = s.symmetrized();
            }
            s.write(g, dir.join("similarity.tsv"))?;
            let info = serde_json::json!({ "edges": s.num_edges() });
            Ok((s, info))
        },
    )?;
    let reused = cache.finish()?;

    Ok(Prepared {
        graph,
        labels,
        dgdv,
        projection,
        similarity,
        census_summary,
        input_hash,
        labels_hash,
        similarity_key: sim_key,
        reused,
    })
}

struct Downstream {
    num_walks: usize,
    counters: WalkCounters,
    eval: Option<EvalSummary>,
    report: Option<EvalReport>,
    stages: Vec<(String, bool)>,
}

fn counters_json(c: &WalkCounters) -> serde_json::Value {
    serde_json::json!({
        "temporal_steps": c.temporal_steps,
        "structural_steps": c.structural_steps,
        "early_terminations": c.early_terminations,
        "fallback_steps": c.fallback_steps,
    })
}

fn counters_from_json(v: &serde_json::Value) -> WalkCounters {
    let get = |k: &str| v[k].as_u64().unwrap_or(0);
    WalkCounters {
        temporal_steps: get("temporal_steps"),
        structural_steps: get("structural_steps"),
        early_terminations: get("early_terminations"),
        fallback_steps: get("fallback_steps"),
    }
}

/// Walks, embeddings and evaluation for `cfg.alpha`, written to `dir`.
fn run_downstream(p: &Prepared, cfg: &PipelineConfig, dir: &Path, share_manifest: bool) -> Result<Downstream> {
    let g = &p.graph;
    let wcfg = cfg.walk_config(g.num_nodes());
    let tcfg = cfg.train_config();
    let params = if share_manifest {
        Manifest::load(dir).map(|m| m.params).unwrap_or_default()
    } else {
        downstream_params(cfg, g.num_nodes())
    };
    let mut cache = StageCache::open(dir, params)?;

    let walks_key = stage_key("walks", &[&p.similarity_key, &p.input_hash, &json(&wcfg)]);
    let walks = cache.run(
        "walks",
        &walks_key,
        &["walks.txt"],
        |dir, info| Ok((read_walks(g, dir.join("walks.txt"))?, counters_from_json(info))),
        |dir| {
            let corpus = generate_corpus(g, &p.similarity, &wcfg)?;
            corpus.write(g, dir.join("walks.txt"))?;
            let info = counters_json(&corpus.counters);
            let nodes: Vec<Vec<NodeId>> = corpus.walks.into_iter().map(|w| w.nodes).collect();
            Ok(((nodes, corpus.counters), info))
        },
    )?;
    let (walks, counters) = walks;

    let emb_key = stage_key("embeddings", &[&walks_key, &json(&tcfg)]);
    let emb = cache.run(
        "embeddings",
        &emb_key,
        &["embeddings.txt"],
        |dir, _| {
            let (labels, e) = read_embeddings(dir.join("embeddings.txt"))?;
            if labels != g.labels() {
                return Err(Error::Internal("cached embeddings do not match graph".into()));
            }
            Ok(e)
        },
        |dir| {
            let (e, report) = train(&walks, g.num_nodes(), &tcfg)?;
            export_embeddings(&e, g.labels(), dir.join("embeddings.txt"))?;
            let info = serde_json::json!({ "epoch_objectives": report.epoch_objectives });
            Ok((e, info))
        },
    )?;

    let mut eval = None;
    let mut report = None;
    if let (Some(labels), Some(lh)) = (&p.labels, &p.labels_hash) {
        let cv = cfg.cv_options();
        let eval_key = stage_key("eval", &[&emb_key, lh, &json(&cv)]);
        let summary = cache.run(
            "eval",
            &eval_key,
            &["report.txt", "report.tsv"],
            |_, info| serde_json::from_value::<EvalSummary>(info.clone()).map_err(|e| Error::Internal(e.to_string())),
            |dir| {
                let mut r = evaluate_embeddings(&emb.rows(), labels, &cv)?;
                r.config = vec![
                    ("alpha".into(), cfg.alpha.to_string()),
                    ("dims".into(), tcfg.dims.to_string()),
                    ("walk_length".into(), cfg.walk_length.to_string()),
                    ("window".into(), tcfg.window.to_string()),
                    ("topk".into(), cfg.topk.to_string()),
                    ("graphlet_nodes".into(), cfg.census.max_nodes.to_string()),
                    ("graphlet_events".into(), cfg.census.max_events.to_string()),
                    ("delta_t".into(), cfg.census.delta_t.to_string()),
                    ("num_walks".into(), wcfg.num_walks.to_string()),
                    ("seed".into(), cfg.seed.to_string()),
                ];
                r.write(dir.join("report.txt"), dir.join("report.tsv"))?;
                let s = EvalSummary::from(&r);
                report = Some(r);
                let info = serde_json::to_value(s).map_err(|e| Error::Internal(e.to_string()))?;
                Ok((s, info))
            },
        )?;
        eval = Some(summary);
    }
    let stages = cache.finish()?;
    Ok(Downstream {
        num_walks: walks.len(),
        counters,
        eval,
        report,
        stages,
    })
}

/// Runs every stage, reusing cached results in `cfg.out_dir` where valid.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let p = prepare(cfg)?;
    let d = run_downstream(&p, cfg, &cfg.out_dir, true)?;
    let mut stages = p.reused.clone();
    stages.extend(d.stages);
    Ok(PipelineOutput {
        graph_summary: p.graph.summary().to_string(),
        census_summary: p.census_summary.clone(),
        pca_components: p.projection.first().map_or(0, Vec::len),
        similarity_edges: p.similarity.num_edges(),
        num_walks: d.num_walks,
        counters: d.counters,
        eval: d.eval,
        report: d.report,
        stages,
    })
}

/// `0, 0.025, ..., 1`.
pub fn default_alpha_grid() -> Vec<f64> {
    (0..=40).map(|i| i as f64 * 0.025).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub mean_ap: f64,
    pub std_ap: f64,
    pub mean_auroc: f64,
    pub std_auroc: f64,
}

/// Runs the alpha-dependent stages for every grid value, sharing census, PCA
/// and similarity. Each point lives in `out_dir/sweep/alpha_<value>`; the
/// table and chart are written to `out_dir`.
pub fn alpha_sweep(cfg: &PipelineConfig, grid: &[f64]) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::Config("alpha grid is empty".into()));
    }
    if let Some(a) = grid.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::Config(format!("alpha {a} outside [0, 1]")));
    }
    let p = prepare(cfg)?;
    if p.labels.is_none() {
        return Err(Error::Config("alpha sweep needs --labels".into()));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &alpha in grid {
        let point = PipelineConfig {
            alpha,
            ..cfg.clone()
        };
        let dir = cfg.out_dir.join("sweep").join(format!("alpha_{alpha:.3}"));
        let d = run_downstream(&p, &point, &dir, false)?;
        let e = d.eval.ok_or_else(|| Error::Internal("sweep point produced no evaluation".into()))?;
        log::info!("alpha {alpha:.3}: AP {:.4} AUROC {:.4}", e.mean_ap, e.mean_auroc);
        rows.push(SweepRow {
            alpha,
            mean_ap: e.mean_ap,
            std_ap: e.std_ap,
            mean_auroc: e.mean_auroc,
            std_auroc: e.std_auroc,
        });
    }
    let tsv = cfg.out_dir.join("alpha_sweep.tsv");
    fs::write(&tsv, sweep_tsv(&rows)).map_err(|e| Error::io(&tsv, e))?;
    let svg = cfg.out_dir.join("alpha_sweep.svg");
    fs::write(&svg, sweep_svg(&rows)).map_err(|e| Error::io(&svg, e))?;
    Ok(rows)
}

pub fn sweep_tsv(rows: &[SweepRow]) -> String {
    let mut s = String::from("alpha\tmean_ap\tstd_ap\tmean_auroc\tstd_auroc\n");
    for r in rows {
        let _ = writeln!(s, "{}\t{}\t{}\t{}\t{}", r.alpha, r.mean_ap, r.std_ap, r.mean_auroc, r.std_auroc);
    }
    s
}

/// Line chart of mean AP against alpha with one-std whiskers.
pub fn sweep_svg(rows: &[SweepRow]) -> String {
    let (w, h, m) = (640.0, 400.0, 50.0);
    let lo = rows.iter().map(|r| r.mean_ap - r.std_ap).fold(f64::INFINITY, f64::min).max(0.0);
    let hi = rows.iter().map(|r| r.mean_ap + r.std_ap).fold(f64::NEG_INFINITY, f64::max).min(1.0);
    let (lo, hi) = if hi - lo < 1e-9 { (lo - 0.05, hi + 0.05) } else { (lo, hi) };
    let x = |a: f64| m + a * (w - 2.0 * m);
    let y = |v: f64| h - m - (v - lo) / (hi - lo) * (h - 2.0 * m);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{m}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/><line x1="{m}" y1="{m}" x2="{m}" y2="{b}" stroke="black"/>"#,
        b = h - m,
        r = w - m
    );
    for i in 0..=4 {
        let a = i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{a:.2}</text>"#,
            x(a),
            h - m + 16.0
        );
        let v = lo + (hi - lo) * a;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{v:.3}</text>"#,
            m - 6.0,
            y(v) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">alpha</text>"#,
        w / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.1}" font-size="12" transform="rotate(-90 14 {:.1})" text-anchor="middle">mean AP</text>"#,
        h / 2.0,
        h / 2.0
    );
    for r in rows {
        let _ = writeln!(
            s,
            r##"<line x1="{0:.1}" y1="{1:.1}" x2="{0:.1}" y2="{2:.1}" stroke="#999"/>"##,
            x(r.alpha),
            y((r.mean_ap - r.std_ap).max(lo)),
            y((r.mean_ap + r.std_ap).min(hi))
        );
    }
    let pts: Vec<String> = rows.iter().map(|r| format!("{:.1},{:.1}", x(r.alpha), y(r.mean_ap))).collect();
    let _ = writeln!(
        s,
        r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="2"/>"##,
        pts.join(" ")
    );
    for r in rows {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.1}" cy="{:.1}" r="3" fill="#1f77b4"/>"##,
            x(r.alpha),
            y(r.mean_ap)
        );
    }
    s.push_str("</svg>\n");
    s
}
