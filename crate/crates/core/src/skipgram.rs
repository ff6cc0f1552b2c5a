//! Skip-gram with negative sampling over walk corpora.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::temporal_graph::NodeId;
use crate::walker::Walk;

impl AsRef<[NodeId]> for Walk {
    fn as_ref(&self) -> &[NodeId] {
        &self.nodes
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrainConfig {
    pub dims: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub min_learning_rate: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dims: 32,
            window: 10,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_learning_rate: 1e-4,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims == 0 || self.window == 0 || self.negatives == 0 {
            return Err(Error::Config(format!(
                "dims, window and negatives must be positive (got {}, {}, {})",
                self.dims, self.window, self.negatives
            )));
        }
        if !(self.learning_rate > 0.0 && self.min_learning_rate >= 0.0 && self.min_learning_rate <= self.learning_rate) {
            return Err(Error::Config(format!(
                "need 0 <= min learning rate <= learning rate, got {} and {}",
                self.min_learning_rate, self.learning_rate
            )));
        }
        Ok(())
    }
}

/// Modified unigram noise `U(x)^{3/4} / Z` over corpus positions.
#[derive(Clone, Debug)]
pub struct NoiseDistribution {
    probs: Vec<f64>,
    index: WeightedIndex<f64>,
}

impl NoiseDistribution {
    pub fn from_walks<W: AsRef<[NodeId]>>(walks: &[W], num_nodes: usize) -> Result<Self> {
        let mut freq = vec![0u64; num_nodes];
        for w in walks {
            for &v in w.as_ref() {
                let slot = freq.get_mut(v as usize).ok_or_else(|| {
                    Error::Validation(format!("walk node {v} outside 0..{num_nodes}"))
                })?;
                *slot += 1;
            }
        }
        if freq.iter().all(|&f| f == 0) {
            return Err(Error::Validation("walk corpus is empty".into()));
        }
        let w: Vec<f64> = freq.iter().map(|&f| (f as f64).powf(0.75)).collect();
        let z: f64 = w.iter().sum();
        let probs: Vec<f64> = w.iter().map(|x| x / z).collect();
        let index = WeightedIndex::new(&w).map_err(|e| Error::Internal(format!("noise table: {e}")))?;
        Ok(NoiseDistribution { probs, index })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> NodeId {
        self.index.sample(rng) as NodeId
    }
}

/// `(center, context)` pairs of one walk with a symmetric window of radius `window`.
pub fn positive_pairs(walk: &[NodeId], window: usize) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
    let n = walk.len();
    (0..n).flat_map(move |i| {
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(n.saturating_sub(1));
        (lo..=hi).filter(move |&j| j != i).map(move |j| (walk[i], walk[j]))
    })
}

fn pair_count(len: usize, window: usize) -> u64 {
    (0..len)
        .map(|i| (i.min(window) + (len - 1 - i).min(window)) as u64)
        .sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn log_sigmoid(x: f64) -> f64 {
    -((-x).max(0.0) + (-x.abs()).exp().ln_1p())
}

/// `log σ(u_c·w) + Σ_x log σ(−u_x·w)`.
pub fn pair_objective(w: &[f64], u_ctx: &[f64], u_neg: &[&[f64]]) -> f64 {
    log_sigmoid(dot(u_ctx, w)) + u_neg.iter().map(|u| log_sigmoid(-dot(u, w))).sum::<f64>()
}

/// Gradient of [`pair_objective`].
#[derive(Clone, Debug, PartialEq)]
pub struct PairGradient {
    pub w: Vec<f64>,
    pub u_ctx: Vec<f64>,
    pub u_neg: Vec<Vec<f64>>,
}

pub fn pair_gradient(w: &[f64], u_ctx: &[f64], u_neg: &[&[f64]]) -> PairGradient {
    let gc = 1.0 - sigmoid(dot(u_ctx, w));
    let mut gw: Vec<f64> = u_ctx.iter().map(|x| gc * x).collect();
    let gu_ctx = w.iter().map(|x| gc * x).collect();
    let mut gu_neg = Vec::with_capacity(u_neg.len());
    for u in u_neg {
        let gx = -sigmoid(dot(u, w));
        for (a, b) in gw.iter_mut().zip(u.iter()) {
            *a += gx * b;
        }
        gu_neg.push(w.iter().map(|x| gx * x).collect());
    }
    PairGradient {
        w: gw,
        u_ctx: gu_ctx,
        u_neg: gu_neg,
    }
}

/// Input (published) and output (context) vectors, row-major `N x d`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix {
    pub dims: usize,
    pub input: Vec<f64>,
    pub output: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn num_nodes(&self) -> usize {
        self.input.len() / self.dims
    }

    pub fn vector(&self, v: NodeId) -> &[f64] {
        &self.input[v as usize * self.dims..(v as usize + 1) * self.dims]
    }

    pub fn context(&self, v: NodeId) -> &[f64] {
        &self.output[v as usize * self.dims..(v as usize + 1) * self.dims]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.input.chunks(self.dims).map(<[f64]>::to_vec).collect()
    }
}

/// Input vectors uniform in `[-0.5/d, 0.5/d]`, output vectors zero.
pub fn initial_embeddings(num_nodes: usize, cfg: &TrainConfig) -> EmbeddingMatrix {
    let d = cfg.dims;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(u64::MAX);
    let half = 0.5 / d as f64;
    EmbeddingMatrix {
        dims: d,
        input: (0..num_nodes * d).map(|_| rng.random_range(-half..=half)).collect(),
        output: vec![0.0; num_nodes * d],
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainReport {
    /// Mean pair objective per epoch, each pair evaluated just before its update.
    pub epoch_objectives: Vec<f64>,
    pub pairs_per_epoch: u64,
}

/// Shared parameters for unsynchronized updates from several workers.
struct Shared {
    d: usize,
    data: Vec<AtomicU64>,
}

impl Shared {
    fn new(values: &[f64], d: usize) -> Self {
        Shared {
            d,
            data: values.iter().map(|x| AtomicU64::new(x.to_bits())).collect(),
        }
    }

    fn load(&self, row: NodeId, out: &mut [f64]) {
        let base = row as usize * self.d;
        for (k, o) in out.iter_mut().enumerate() {
            *o = f64::from_bits(self.data[base + k].load(Ordering::Relaxed));
        }
    }

    fn add_scaled(&self, row: NodeId, g: &[f64], lr: f64) {
        let base = row as usize * self.d;
        for (k, x) in g.iter().enumerate() {
            let cell = &self.data[base + k];
            let cur = f64::from_bits(cell.load(Ordering::Relaxed));
            cell.store((cur + lr * x).to_bits(), Ordering::Relaxed);
        }
    }

    fn into_vec(self) -> Vec<f64> {
        self.data.into_iter().map(|a| f64::from_bits(a.into_inner())).collect()
    }
}

struct Scratch {
    w: Vec<f64>,
    u_ctx: Vec<f64>,
    u_neg: Vec<Vec<f64>>,
    neg_ids: Vec<NodeId>,
}

/// Trains embeddings on `walks` over nodes `0..num_nodes`.
///
/// Walks are processed in parallel on the current rayon pool. With a single
/// thread the walk order is fixed and results are bit-identical across runs.
pub fn train<W: AsRef<[NodeId]> + Sync>(
    walks: &[W],
    num_nodes: usize,
    cfg: &TrainConfig,
) -> Result<(EmbeddingMatrix, TrainReport)> {
    cfg.validate()?;
    let noise = NoiseDistribution::from_walks(walks, num_nodes)?;
    let covered = noise.probabilities().iter().filter(|&&p| p > 0.0).count();
    if covered < 2 {
        return Err(Error::Validation(format!(
            "walk corpus must cover at least 2 nodes, covers {covered}"
        )));
    }
    let init = initial_embeddings(num_nodes, cfg);
    let d = cfg.dims;

    let mut offsets = Vec::with_capacity(walks.len());
    let mut per_epoch = 0u64;
    for w in walks {
        offsets.push(per_epoch);
        per_epoch += pair_count(w.as_ref().len(), cfg.window);
    }
    let total = (per_epoch * cfg.epochs as u64).max(1) as f64;
    let mut report = TrainReport {
        epoch_objectives: Vec::with_capacity(cfg.epochs),
        pairs_per_epoch: per_epoch,
    };

    let input = Shared::new(&init.input, d);
    let output = Shared::new(&init.output, d);
    let lr_at = |pair: u64| {
        let lr = cfg.learning_rate - (cfg.learning_rate - cfg.min_learning_rate) * (pair as f64 / total);
        lr.max(cfg.min_learning_rate)
    };

    for epoch in 0..cfg.epochs {
        let epoch_base = epoch as u64 * per_epoch;
        let run_walk = |idx: usize, scratch: &mut Scratch| -> f64 {
            let walk = walks[idx].as_ref();
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ ((epoch as u64 + 1) << 32));
            rng.set_stream(idx as u64);
            let mut sum = 0.0;
            for (p, (v, c)) in positive_pairs(walk, cfg.window).enumerate() {
                let lr = lr_at(epoch_base + offsets[idx] + p as u64);
                sum += update_pair(&input, &output, &noise, v, c, cfg.negatives, lr, &mut rng, scratch);
            }
            sum
        };
        let new_scratch = || Scratch {
            w: vec![0.0; d],
            u_ctx: vec![0.0; d],
            u_neg: vec![vec![0.0; d]; cfg.negatives],
            neg_ids: Vec::with_capacity(cfg.negatives),
        };
        let sum: f64 = if rayon::current_num_threads() == 1 {
            let mut s = new_scratch();
            (0..walks.len()).map(|i| run_walk(i, &mut s)).sum()
        } else {
            let parts: Vec<f64> = (0..walks.len())
                .into_par_iter()
                .map_init(new_scratch, |s, i| run_walk(i, s))
                .collect();
            parts.iter().sum()
        };
        let mean = sum / per_epoch.max(1) as f64;
        if !mean.is_finite() {
            return Err(Error::NonFinite(format!("objective in epoch {epoch}")));
        }
        report.epoch_objectives.push(mean);
        log::debug!("epoch {epoch}: mean pair objective {mean:.6}");
    }

    let emb = EmbeddingMatrix {
        dims: d,
        input: input.into_vec(),
        output: output.into_vec(),
    };
    if let Some(i) = emb.input.iter().chain(&emb.output).position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(format!("embedding parameter {i} after training")));
    }
    Ok((emb, report))
}

#[allow(clippy::too_many_arguments)]
fn update_pair<R: Rng>(
    input: &Shared,
    output: &Shared,
    noise: &NoiseDistribution,
    v: NodeId,
    c: NodeId,
    negatives: usize,
    lr: f64,
    rng: &mut R,
    s: &mut Scratch,
) -> f64 {
    s.neg_ids.clear();
    for _ in 0..negatives {
        let mut x = noise.sample(rng);
        if x == c {
            x = noise.sample(rng);
        }
        s.neg_ids.push(x);
    }
    input.load(v, &mut s.w);
    output.load(c, &mut s.u_ctx);
    for (buf, &x) in s.u_neg.iter_mut().zip(&s.neg_ids) {
        output.load(x, buf);
    }
    let negs: Vec<&[f64]> = s.u_neg.iter().map(Vec::as_slice).collect();
    let obj = pair_objective(&s.w, &s.u_ctx, &negs);
    let g = pair_gradient(&s.w, &s.u_ctx, &negs);
    output.add_scaled(c, &g.u_ctx, lr);
    for (x, gx) in s.neg_ids.iter().zip(&g.u_neg) {
        output.add_scaled(*x, gx, lr);
    }
    input.add_scaled(v, &g.w, lr);
    obj
}

/// Writes `N d`, then one `label f_1 ... f_d` line per node.
pub fn export_embeddings(e: &EmbeddingMatrix, labels: &[String], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if labels.len() != e.num_nodes() {
        return Err(Error::DimensionMismatch {
            expected: e.num_nodes(),
            got: labels.len(),
        });
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let res: std::io::Result<()> = (|| {
        writeln!(w, "{} {}", e.num_nodes(), e.dims)?;
        for (v, label) in labels.iter().enumerate() {
            write!(w, "{label}")?;
            for x in e.vector(v as NodeId) {
                write!(w, " {x}")?;
            }
            writeln!(w)?;
        }
        w.flush()
    })();
    res.map_err(|e| Error::io(path, e))
}

/// Reads the format written by [`export_embeddings`]. Output vectors are zero.
pub fn read_embeddings(path: impl AsRef<Path>) -> Result<(Vec<String>, EmbeddingMatrix)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::parse(path, 1, "missing header"))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|x| x.parse().map_err(|_| Error::parse(path, 1, "bad header")))
        .collect::<Result<_>>()?;
    let [n, d] = dims[..] else {
        return Err(Error::parse(path, 1, "header must be `N d`"));
    };
    let mut labels = Vec::with_capacity(n);
    let mut input = Vec::with_capacity(n * d);
    for (i, line) in lines.enumerate() {
        let mut f = line.split_whitespace();
        let Some(label) = f.next() else { continue };
        labels.push(label.to_owned());
        let row: Vec<f64> = f
            .map(|x| x.parse().map_err(|_| Error::parse(path, i + 2, format!("bad value `{x}`"))))
            .collect::<Result<_>>()?;
        if row.len() != d {
            return Err(Error::parse(path, i + 2, format!("expected {d} values, got {}", row.len())));
        }
        input.extend(row);
    }
    if labels.len() != n {
        return Err(Error::parse(path, 1, format!("header says {n} rows, found {}", labels.len())));
    }
    Ok((
        labels,
        EmbeddingMatrix {
            dims: d,
            input,
            output: vec![0.0; n * d],
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_three_quarter_power() {
        let mut walks = vec![vec![0u32; 16]];
        walks.push(vec![1u32; 81]);
        let n = NoiseDistribution::from_walks(&walks, 3).unwrap();
        let p = n.probabilities();
        assert!((p[0] - 8.0 / 35.0).abs() < 1e-12);
        assert!((p[1] - 27.0 / 35.0).abs() < 1e-12);
        assert_eq!(p[2], 0.0);
    }

    #[test]
    fn noise_uniform_and_single() {
        let walks = vec![vec![0u32, 1, 2, 3]];
        let n = NoiseDistribution::from_walks(&walks, 4).unwrap();
        assert!(n.probabilities().iter().all(|&p| (p - 0.25).abs() < 1e-15));
        let n = NoiseDistribution::from_walks(&[vec![2u32, 2]], 3).unwrap();
        assert_eq!(n.probabilities(), &[0.0, 0.0, 1.0]);
        let empty: Vec<Vec<NodeId>> = vec![];
        assert!(NoiseDistribution::from_walks(&empty, 3).is_err());
    }

    #[test]
    fn pairs_examples() {
        let ab: Vec<_> = positive_pairs(&[0, 1], 10).collect();
        assert_eq!(ab, vec![(0, 1), (1, 0)]);
        let abc: Vec<_> = positive_pairs(&[0, 1, 2], 1).collect();
        assert_eq!(abc, vec![(0, 1), (1, 0), (1, 2), (2, 1)]);
        assert_eq!(positive_pairs(&[0, 1, 2, 3, 4], 2).count(), 14);
        assert_eq!(pair_count(5, 2), 14);
        assert_eq!(pair_count(1, 3), 0);
    }

    #[test]
    fn log_sigmoid_stable() {
        assert!((log_sigmoid(0.0) - 0.5f64.ln()).abs() < 1e-15);
        assert!(log_sigmoid(800.0).abs() < 1e-300);
        assert!((log_sigmoid(-800.0) + 800.0).abs() < 1e-9);
    }

    #[test]
    fn zero_epochs_keep_initialization() {
        let cfg = TrainConfig {
            epochs: 0,
            dims: 4,
            seed: 3,
            ..TrainConfig::default()
        };
        let (e, r) = train(&[vec![0u32, 1, 2]], 3, &cfg).unwrap();
        assert_eq!(e, initial_embeddings(3, &cfg));
        assert!(r.epoch_objectives.is_empty());
        let half = 0.5 / 4.0;
        assert!(e.input.iter().all(|x| x.abs() <= half));
    }

    #[test]
    fn single_node_corpus_rejected() {
        assert!(train(&[vec![1u32, 1]], 3, &TrainConfig::default()).is_err());
    }

    #[test]
    fn export_round_trip() {
        let cfg = TrainConfig {
            dims: 3,
            epochs: 1,
            ..TrainConfig::default()
        };
        let (e, _) = train(&[vec![0u32, 1, 0, 1]], 2, &cfg).unwrap();
        let labels = vec!["alice".to_string(), "bob".to_string()];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.txt");
        export_embeddings(&e, &labels, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("2 3\nalice "));
        let (l2, e2) = read_embeddings(&path).unwrap();
        assert_eq!(l2, labels);
        assert_eq!(e2.input, e.input);
    }
}
