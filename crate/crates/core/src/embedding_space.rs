//! PCA projection of D-GDV rows.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Variance below this is treated as zero.
const VARIANCE_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PcaOptions {
    pub variance_target: f64,
    /// Divide each centered column by its standard deviation before the fit.
    pub unit_variance: bool,
}

impl Default for PcaOptions {
    fn default() -> Self {
        PcaOptions {
            variance_target: 0.9,
            unit_variance: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PcaModel {
    means: Vec<f64>,
    scales: Option<Vec<f64>>,
    /// `P x j`, orthonormal columns.
    components: DMatrix<f64>,
    explained_variance: Vec<f64>,
    ratios: Vec<f64>,
}

impl PcaModel {
    pub fn input_dim(&self) -> usize {
        self.means.len()
    }

    pub fn num_components(&self) -> usize {
        self.components.ncols()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn components(&self) -> &DMatrix<f64> {
        &self.components
    }

    pub fn explained_variance(&self) -> &[f64] {
        &self.explained_variance
    }

    pub fn explained_variance_ratio(&self) -> &[f64] {
        &self.ratios
    }

    /// Copy keeping only the first `j` components.
    pub fn truncated(&self, j: usize) -> PcaModel {
        let j = j.clamp(1, self.num_components());
        PcaModel {
            means: self.means.clone(),
            scales: self.scales.clone(),
            components: self.components.columns(0, j).into_owned(),
            explained_variance: self.explained_variance[..j].to_vec(),
            ratios: self.ratios[..j].to_vec(),
        }
    }

    pub fn project(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.means.len() {
            return Err(Error::DimensionMismatch {
                expected: self.means.len(),
                got: row.len(),
            });
        }
        let centered: Vec<f64> = row
            .iter()
            .zip(&self.means)
            .enumerate()
            .map(|(i, (x, m))| {
                let c = x - m;
                match &self.scales {
                    Some(s) => c / s[i],
                    None => c,
                }
            })
            .collect();
        Ok((0..self.num_components())
            .map(|k| {
                self.components
                    .column(k)
                    .iter()
                    .zip(&centered)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn project_rows(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        rows.iter().map(|r| self.project(r)).collect()
    }

    /// Text dump of means, ratios and components, one block per line group.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let join = |xs: &mut dyn Iterator<Item = f64>| {
            xs.map(|x| format!("{x:.17e}")).collect::<Vec<_>>().join(" ")
        };
        let res: std::io::Result<()> = (|| {
            writeln!(w, "# pca input_dim={} components={}", self.input_dim(), self.num_components())?;
            writeln!(w, "means {}", join(&mut self.means.iter().copied()))?;
            if let Some(s) = &self.scales {
                writeln!(w, "scales {}", join(&mut s.iter().copied()))?;
            }
            writeln!(w, "ratios {}", join(&mut self.ratios.iter().copied()))?;
            for k in 0..self.num_components() {
                writeln!(w, "component{k} {}", join(&mut self.components.column(k).iter().copied()))?;
            }
            w.flush()
        })();
        res.map_err(|e| Error::io(path, e))
    }
}

/// Writes `label x_1 ... x_j` rows with round-trip float formatting.
pub fn write_rows(labels: &[String], rows: &[Vec<f64>], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let res: std::io::Result<()> = (|| {
        for (label, row) in labels.iter().zip(rows) {
            write!(w, "{label}")?;
            for x in row {
                write!(w, " {x}")?;
            }
            writeln!(w)?;
        }
        w.flush()
    })();
    res.map_err(|e| Error::io(path, e))
}

pub fn read_rows(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let mut f = line.split_whitespace();
        let Some(label) = f.next() else { continue };
        labels.push(label.to_owned());
        rows.push(
            f.map(|x| x.parse().map_err(|_| Error::parse(path, i + 1, format!("bad value `{x}`"))))
                .collect::<Result<Vec<f64>>>()?,
        );
    }
    Ok((labels, rows))
}

/// Fits PCA, keeping the fewest components whose cumulative explained
/// variance ratio reaches `opts.variance_target`.
pub fn fit_pca(rows: &[Vec<f64>], opts: &PcaOptions) -> Result<PcaModel> {
    if !(opts.variance_target > 0.0 && opts.variance_target <= 1.0) {
        return Err(Error::Config(format!(
            "variance target must be in (0, 1], got {}",
            opts.variance_target
        )));
    }
    let full = fit_all_components(rows, opts.unit_variance)?;
    let mut cum = 0.0;
    let mut j = full.num_components();
    for (i, r) in full.ratios.iter().enumerate() {
        cum += r;
        if cum >= opts.variance_target - 1e-12 {
            j = i + 1;
            break;
        }
    }
    Ok(full.truncated(j))
}

/// Fits PCA and keeps every component with nonzero variance.
pub fn fit_all_components(rows: &[Vec<f64>], unit_variance: bool) -> Result<PcaModel> {
    let n = rows.len();
    if n < 2 {
        return Err(Error::Validation(format!("PCA needs at least 2 rows, got {n}")));
    }
    let p = rows[0].len();
    if let Some(bad) = rows.iter().find(|r| r.len() != p) {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: bad.len(),
        });
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("PCA input".into()));
    }
    if p == 0 {
        return Err(Error::DegenerateCensus);
    }

    let mut means = vec![0.0; p];
    for r in rows {
        for (m, x) in means.iter_mut().zip(r) {
            *m += x;
        }
    }
    means.iter_mut().for_each(|m| *m /= n as f64);

    let mut x = DMatrix::from_fn(n, p, |i, k| rows[i][k] - means[k]);
    let denom = (n - 1) as f64;
    let col_var: Vec<f64> = (0..p).map(|k| x.column(k).norm_squared() / denom).collect();
    if col_var.iter().all(|&v| v <= VARIANCE_EPS) {
        return Err(Error::DegenerateCensus);
    }
    let scales = if unit_variance {
        let s: Vec<f64> = col_var
            .iter()
            .map(|&v| if v > VARIANCE_EPS { v.sqrt() } else { 1.0 })
            .collect();
        for (k, sk) in s.iter().enumerate() {
            x.column_mut(k).unscale_mut(*sk);
        }
        Some(s)
    } else {
        None
    };
    let total: f64 = (0..p).map(|k| x.column(k).norm_squared() / denom).sum();

    let mut kept = Vec::new();
    let mut variance = Vec::new();
    for (var, mut comp) in principal_axes(&x, denom) {
        if var <= VARIANCE_EPS * total.max(1.0) {
            continue;
        }
        orient(&mut comp);
        kept.push(comp);
        variance.push(var);
    }
    if kept.is_empty() {
        return Err(Error::DegenerateCensus);
    }
    let components = DMatrix::from_fn(p, kept.len(), |r, c| kept[c][r]);
    let ratios = variance.iter().map(|v| v / total).collect();
    Ok(PcaModel {
        means,
        scales,
        components,
        explained_variance: variance,
        ratios,
    })
}

/// `(variance, unit axis)` pairs sorted by variance, descending. Works on
/// whichever of the covariance or Gram matrix is smaller. The symmetric
/// eigensolver is used instead of an SVD: the latter occasionally returns a
/// factorization that does not reconstruct its input on small wide matrices.
fn principal_axes(x: &DMatrix<f64>, denom: f64) -> Vec<(f64, Vec<f64>)> {
    let (n, p) = x.shape();
    let wide = p > n;
    let gram = if wide { x * x.transpose() } else { x.transpose() * x };
    let eig = gram.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    order
        .into_iter()
        .filter(|&i| eig.eigenvalues[i] > 0.0)
        .map(|i| {
            let lambda = eig.eigenvalues[i];
            let u = eig.eigenvectors.column(i);
            let axis = if wide {
                let v = x.transpose() * u;
                let norm = v.norm();
                v.iter().map(|c| c / norm).collect()
            } else {
                u.iter().copied().collect()
            };
            (lambda / denom, axis)
        })
        .collect()
}

/// Flips `v` so its largest-magnitude entry (first on ties) is positive.
fn orient(v: &mut [f64]) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> Vec<Vec<f64>> {
        vec![
            vec![1.0, 2.0, 3.0],
            vec![6.0, 4.0, 1.0],
            vec![6.0, 4.0, 1.0],
            vec![7.0, 2.0, 3.0],
        ]
    }

    #[test]
    fn hand_eigenvalues_give_two_components() {
        let m = fit_all_components(&fixture(), false).unwrap();
        let ev = m.explained_variance();
        assert_eq!(ev.len(), 2);
        assert!((ev[0] - 8.0).abs() < 1e-10, "{ev:?}");
        assert!((ev[1] - 2.0).abs() < 1e-10, "{ev:?}");

        let opts = PcaOptions::default();
        let m = fit_pca(&fixture(), &opts).unwrap();
        assert_eq!(m.num_components(), 2);
        assert!((m.explained_variance_ratio()[0] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn target_exactly_reached_by_first_component() {
        let opts = PcaOptions {
            variance_target: 0.8,
            unit_variance: false,
        };
        assert_eq!(fit_pca(&fixture(), &opts).unwrap().num_components(), 1);
    }

    #[test]
    fn collinear_rows_need_one_component() {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, 2.0 * i as f64, -(i as f64)]).collect();
        for target in [0.1, 0.5, 0.99, 1.0] {
            let opts = PcaOptions {
                variance_target: target,
                unit_variance: false,
            };
            assert_eq!(fit_pca(&rows, &opts).unwrap().num_components(), 1);
        }
    }

    #[test]
    fn identical_rows_are_degenerate() {
        let rows = vec![vec![3.0, 1.0]; 4];
        let err = fit_pca(&rows, &PcaOptions::default()).unwrap_err();
        assert!(matches!(err, Error::DegenerateCensus));
        assert!(err.to_string().contains("degenerate census"));
    }

    #[test]
    fn two_point_projection() {
        let rows = vec![vec![0.0, 0.0], vec![2.0, 2.0]];
        let m = fit_pca(&rows, &PcaOptions::default()).unwrap();
        assert_eq!(m.num_components(), 1);
        let c = m.components().column(0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((c[0] - h).abs() < 1e-12 && (c[1] - h).abs() < 1e-12);
        assert!(m.project(&[1.0, 1.0]).unwrap()[0].abs() < 1e-12);
        assert!((m.project(&[2.0, 2.0]).unwrap()[0] - 2f64.sqrt()).abs() < 1e-12);
        assert!(m.project(&[2.0, 0.0]).unwrap()[0].abs() < 1e-12);
    }

    #[test]
    fn mean_row_projects_to_origin() {
        let m = fit_pca(&fixture(), &PcaOptions::default()).unwrap();
        let z = m.project(&[5.0, 3.0, 2.0]).unwrap();
        assert!(z.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn wrong_length_rejected() {
        let m = fit_pca(&fixture(), &PcaOptions::default()).unwrap();
        assert!(matches!(
            m.project(&[1.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 1 })
        ));
    }

    #[test]
    fn components_orthonormal_and_oriented() {
        let m = fit_all_components(&fixture(), false).unwrap();
        let c = m.components();
        let gram = c.transpose() * c;
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)] - want).abs() < 1e-8);
            }
        }
        for k in 0..c.ncols() {
            let col: Vec<f64> = c.column(k).iter().copied().collect();
            let big = col.iter().copied().fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
            assert!(big > 0.0);
        }
    }

    #[test]
    fn unit_variance_scaling_runs() {
        let opts = PcaOptions {
            variance_target: 1.0,
            unit_variance: true,
        };
        let m = fit_pca(&fixture(), &opts).unwrap();
        let s: f64 = m.explained_variance_ratio().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dump_writes_components() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pca.txt");
        fit_pca(&fixture(), &PcaOptions::default()).unwrap().write(&path).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert!(text.contains("component1 "));
        assert!(!text.contains("component2 "));
    }
}
