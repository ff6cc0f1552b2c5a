//! Node classification with one-vs-rest logistic regression under
//! stratified k-fold cross-validation.

pub mod logreg;
pub mod metrics;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use logreg::{train_binary, train_logreg_ovr, BinaryModel, LogRegOptions, OvrModel};
pub use metrics::{auroc, average_precision};

use crate::error::{Error, Result};
use crate::temporal_graph::NodeLabels;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CvOptions {
    pub folds: usize,
    pub seed: u64,
    /// Standardize features with training-fold mean and standard deviation.
    pub standardize: bool,
    pub logreg: LogRegOptions,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions {
            folds: 5,
            seed: 0,
            standardize: true,
            logreg: LogRegOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassMetrics {
    pub class: usize,
    pub ap: f64,
    pub auroc: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FoldMetrics {
    pub fold: usize,
    pub test_size: usize,
    pub macro_ap: f64,
    pub macro_auroc: f64,
    pub per_class: Vec<ClassMetrics>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassSummary {
    pub class: usize,
    pub name: String,
    pub folds: usize,
    pub mean_ap: f64,
    pub mean_auroc: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub folds: Vec<FoldMetrics>,
    pub mean_ap: f64,
    pub std_ap: f64,
    pub mean_auroc: f64,
    pub std_auroc: f64,
    pub per_class: Vec<ClassSummary>,
    /// Parameters echoed into the written report.
    pub config: Vec<(String, String)>,
}

/// Mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

impl EvalReport {
    pub fn table(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.config {
            let _ = writeln!(s, "# {k} = {v}");
        }
        let _ = writeln!(s, "{:<8} {:>10} {:>10}", "fold", "macro-AP", "macro-AUROC");
        for f in &self.folds {
            let _ = writeln!(s, "{:<8} {:>10.4} {:>10.4}", f.fold, f.macro_ap, f.macro_auroc);
        }
        let _ = writeln!(
            s,
            "{:<8} {:>10} {:>10}",
            "mean",
            format!("{:.4}", self.mean_ap),
            format!("{:.4}", self.mean_auroc)
        );
        let _ = writeln!(s, "{:<8} {:>10.4} {:>10.4}", "std", self.std_ap, self.std_auroc);
        let _ = writeln!(s, "\n{:<16} {:>6} {:>10} {:>10}", "class", "folds", "AP", "AUROC");
        for c in &self.per_class {
            let _ = writeln!(s, "{:<16} {:>6} {:>10.4} {:>10.4}", c.name, c.folds, c.mean_ap, c.mean_auroc);
        }
        s
    }

    /// One row per fold per metric, then summary rows.
    pub fn tsv(&self) -> String {
        let mut s = String::from("fold\tmetric\tvalue\n");
        for f in &self.folds {
            let _ = writeln!(s, "{}\tmacro_ap\t{}", f.fold, f.macro_ap);
            let _ = writeln!(s, "{}\tmacro_auroc\t{}", f.fold, f.macro_auroc);
        }
        let _ = writeln!(s, "mean\tmacro_ap\t{}", self.mean_ap);
        let _ = writeln!(s, "std\tmacro_ap\t{}", self.std_ap);
        let _ = writeln!(s, "mean\tmacro_auroc\t{}", self.mean_auroc);
        let _ = writeln!(s, "std\tmacro_auroc\t{}", self.std_auroc);
        s
    }

    pub fn write(&self, table_path: impl AsRef<Path>, tsv_path: impl AsRef<Path>) -> Result<()> {
        let (a, b) = (table_path.as_ref(), tsv_path.as_ref());
        fs::write(a, self.table()).map_err(|e| Error::io(a, e))?;
        fs::write(b, self.tsv()).map_err(|e| Error::io(b, e))
    }
}

/// Fold index for every sample. Depends only on `y`, `folds` and `seed`.
///
/// Each class is shuffled and dealt round-robin, continuing where the previous
/// class stopped. If some class has fewer than `folds` members, a plain
/// shuffled split is used instead.
pub fn stratified_folds(y: &[usize], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {folds}")));
    }
    if y.len() < folds {
        return Err(Error::Validation(format!(
            "{} labeled nodes cannot fill {folds} folds",
            y.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let num_classes = y.iter().max().map_or(0, |m| m + 1);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); num_classes];
    for (i, &c) in y.iter().enumerate() {
        by_class[c].push(i);
    }
    let mut out = vec![0; y.len()];
    if by_class.iter().any(|m| !m.is_empty() && m.len() < folds) {
        log::warn!("a class has fewer than {folds} members; using an unstratified split");
        let mut all: Vec<usize> = (0..y.len()).collect();
        all.shuffle(&mut rng);
        for (k, i) in all.into_iter().enumerate() {
            out[i] = k % folds;
        }
        return Ok(out);
    }
    let mut next = 0;
    for members in &mut by_class {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            out[i] = next % folds;
            next += 1;
        }
    }
    Ok(out)
}

fn standardizer(x: &[Vec<f64>], idx: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let d = x[0].len();
    let n = idx.len() as f64;
    let mut mean = vec![0.0; d];
    for &i in idx {
        for (m, v) in mean.iter_mut().zip(&x[i]) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut sd = vec![0.0; d];
    for &i in idx {
        for k in 0..d {
            sd[k] += (x[i][k] - mean[k]).powi(2);
        }
    }
    let sd = sd
        .into_iter()
        .map(|s| {
            let s = (s / n).sqrt();
            if s > 1e-12 { s } else { 1.0 }
        })
        .collect();
    (mean, sd)
}

fn evaluate_fold(x: &[Vec<f64>], y: &[usize], assign: &[usize], fold: usize, opts: &CvOptions) -> Result<FoldMetrics> {
    let train: Vec<usize> = (0..y.len()).filter(|&i| assign[i] != fold).collect();
    let test: Vec<usize> = (0..y.len()).filter(|&i| assign[i] == fold).collect();
    let prep = |rows: &[usize], st: &Option<(Vec<f64>, Vec<f64>)>| -> Vec<Vec<f64>> {
        rows.iter()
            .map(|&i| match st {
                Some((m, s)) => x[i].iter().zip(m).zip(s).map(|((v, m), s)| (v - m) / s).collect(),
                None => x[i].clone(),
            })
            .collect()
    };
    let st = opts.standardize.then(|| standardizer(x, &train));
    let xtr = prep(&train, &st);
    let xte = prep(&test, &st);

    let num_classes = y.iter().max().map_or(0, |m| m + 1);
    let mut per_class = Vec::new();
    for c in 0..num_classes {
        let ytr: Vec<bool> = train.iter().map(|&i| y[i] == c).collect();
        let yte: Vec<bool> = test.iter().map(|&i| y[i] == c).collect();
        if !yte.contains(&true) {
            continue;
        }
        if !ytr.contains(&true) {
            log::warn!("fold {fold}: class {c} absent from training split, skipped");
            continue;
        }
        let model = train_binary(&xtr, &ytr, &opts.logreg)?;
        let scores: Vec<f64> = xte.iter().map(|r| model.decision(r)).collect();
        if let (Some(ap), Some(roc)) = (average_precision(&scores, &yte), auroc(&scores, &yte)) {
            per_class.push(ClassMetrics { class: c, ap, auroc: roc });
        }
    }
    if per_class.is_empty() {
        return Err(Error::Validation(format!("fold {fold} has no evaluable class")));
    }
    let k = per_class.len() as f64;
    Ok(FoldMetrics {
        fold,
        test_size: test.len(),
        macro_ap: per_class.iter().map(|m| m.ap).sum::<f64>() / k,
        macro_auroc: per_class.iter().map(|m| m.auroc).sum::<f64>() / k,
        per_class,
    })
}

/// Cross-validates a one-vs-rest classifier on rows `x` with classes `y`.
pub fn cross_validate(x: &[Vec<f64>], y: &[usize], class_names: &[String], opts: &CvOptions) -> Result<EvalReport> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            got: x.len(),
        });
    }
    let distinct = {
        let mut c = y.to_vec();
        c.sort_unstable();
        c.dedup();
        c.len()
    };
    if distinct < 2 {
        return Err(Error::Validation("need at least 2 classes among labeled nodes".into()));
    }
    let assign = stratified_folds(y, opts.folds, opts.seed)?;
    let folds = (0..opts.folds)
        .into_par_iter()
        .map(|f| evaluate_fold(x, y, &assign, f, opts))
        .collect::<Result<Vec<_>>>()?;

    let (mean_ap, std_ap) = mean_std(&folds.iter().map(|f| f.macro_ap).collect::<Vec<_>>());
    let (mean_auroc, std_auroc) = mean_std(&folds.iter().map(|f| f.macro_auroc).collect::<Vec<_>>());
    let num_classes = y.iter().max().map_or(0, |m| m + 1);
    let per_class = (0..num_classes)
        .filter_map(|c| {
            let ms: Vec<&ClassMetrics> = folds.iter().flat_map(|f| &f.per_class).filter(|m| m.class == c).collect();
            if ms.is_empty() {
                return None;
            }
            let n = ms.len() as f64;
            Some(ClassSummary {
                class: c,
                name: class_names.get(c).cloned().unwrap_or_else(|| c.to_string()),
                folds: ms.len(),
                mean_ap: ms.iter().map(|m| m.ap).sum::<f64>() / n,
                mean_auroc: ms.iter().map(|m| m.auroc).sum::<f64>() / n,
            })
        })
        .collect();
    Ok(EvalReport {
        folds,
        mean_ap,
        std_ap,
        mean_auroc,
        std_auroc,
        per_class,
        config: Vec::new(),
    })
}

/// Cross-validates per-node feature rows against the labeled subset of nodes.
pub fn evaluate_embeddings(rows: &[Vec<f64>], labels: &NodeLabels, opts: &CvOptions) -> Result<EvalReport> {
    let mut x = Vec::with_capacity(labels.len());
    let mut y = Vec::with_capacity(labels.len());
    for (v, c) in labels.iter() {
        let row = rows.get(v as usize).ok_or_else(|| Error::DimensionMismatch {
            expected: v as usize + 1,
            got: rows.len(),
        })?;
        x.push(row.clone());
        y.push(c as usize);
    }
    let names: Vec<String> = (0..labels.num_classes()).map(|c| labels.class_name(c as u32).to_owned()).collect();
    cross_validate(&x, &y, &names, opts)
}
