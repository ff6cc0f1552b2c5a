//! L2-regularized logistic regression fitted by damped Newton steps.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LogRegOptions {
    /// Penalty `l2/2 * |w|^2`; the intercept is not penalized.
    pub l2: f64,
    pub fit_intercept: bool,
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for LogRegOptions {
    fn default() -> Self {
        LogRegOptions {
            l2: 1.0,
            fit_intercept: true,
            tolerance: 1e-6,
            max_iter: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinaryModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl BinaryModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }

    pub fn probability(&self, x: &[f64]) -> f64 {
        let z = self.decision(x);
        if z >= 0.0 {
            1.0 / (1.0 + (-z).exp())
        } else {
            let e = z.exp();
            e / (1.0 + e)
        }
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `Σ log(1 + exp(-y z)) + l2/2 |w|^2` with `y ∈ {-1, +1}`.
pub fn objective(x: &[Vec<f64>], y: &[bool], w: &[f64], b: f64, l2: f64) -> f64 {
    let data: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, &yi)| {
            let z = b + w.iter().zip(xi).map(|(a, c)| a * c).sum::<f64>();
            softplus(if yi { -z } else { z })
        })
        .sum();
    data + 0.5 * l2 * w.iter().map(|v| v * v).sum::<f64>()
}

/// Fits one binary classifier. Non-convergence is logged and the last
/// iterate returned.
pub fn train_binary(x: &[Vec<f64>], y: &[bool], opts: &LogRegOptions) -> Result<BinaryModel> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::Validation("no training samples".into()));
    }
    if opts.l2.is_nan() || opts.l2 < 0.0 {
        return Err(Error::Config(format!("l2 must be non-negative, got {}", opts.l2)));
    }
    let d = x[0].len();
    if let Some(bad) = x.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: bad.len(),
        });
    }
    // Parameter vector: weights, then the intercept when fitted.
    let p = d + usize::from(opts.fit_intercept);
    let mut theta = DVector::<f64>::zeros(p);
    let split = |t: &DVector<f64>| -> (Vec<f64>, f64) {
        let w = t.rows(0, d).iter().copied().collect();
        let b = if opts.fit_intercept { t[d] } else { 0.0 };
        (w, b)
    };
    let mut f = {
        let (w, b) = split(&theta);
        objective(x, y, &w, b, opts.l2)
    };
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iter {
        let (w, b) = split(&theta);
        let mut grad = DVector::<f64>::zeros(p);
        let mut hess = DMatrix::<f64>::zeros(p, p);
        for (xi, &yi) in x.iter().zip(y) {
            let z = b + w.iter().zip(xi).map(|(a, c)| a * c).sum::<f64>();
            let s = sigmoid(z);
            let r = s - f64::from(u8::from(yi));
            let h = s * (1.0 - s);
            for j in 0..d {
                grad[j] += r * xi[j];
                for k in 0..=j {
                    hess[(j, k)] += h * xi[j] * xi[k];
                }
            }
            if opts.fit_intercept {
                grad[d] += r;
                for k in 0..d {
                    hess[(d, k)] += h * xi[k];
                }
                hess[(d, d)] += h;
            }
        }
        for j in 0..d {
            grad[j] += opts.l2 * theta[j];
            hess[(j, j)] += opts.l2;
        }
        for j in 0..p {
            for k in 0..j {
                hess[(k, j)] = hess[(j, k)];
            }
        }
        if grad.norm() < opts.tolerance {
            converged = true;
            break;
        }
        // Small ridge keeps the system solvable when curvature vanishes.
        let mut ridge = 0.0;
        let step = loop {
            let mut h = hess.clone();
            for j in 0..p {
                h[(j, j)] += ridge;
            }
            if let Some(ch) = h.cholesky() {
                break ch.solve(&grad);
            }
            ridge = if ridge == 0.0 { 1e-10 } else { ridge * 10.0 };
            if ridge > 1e6 {
                break grad.clone();
            }
        };
        let slope = -grad.dot(&step);
        let mut eta = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand = &theta - eta * &step;
            let (cw, cb) = split(&cand);
            let fc = objective(x, y, &cw, cb, opts.l2);
            if fc <= f + 1e-4 * eta * slope {
                theta = cand;
                f = fc;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        iterations += 1;
        if !accepted {
            break;
        }
    }
    if !converged {
        log::warn!("logistic regression stopped after {iterations} iterations without reaching tolerance");
    }
    let (weights, intercept) = split(&theta);
    if weights.iter().any(|v| !v.is_finite()) || !intercept.is_finite() {
        return Err(Error::NonFinite("logistic regression parameters".into()));
    }
    Ok(BinaryModel {
        weights,
        intercept,
        iterations,
        converged,
    })
}

/// One binary model per class, class `c` against the rest.
#[derive(Clone, Debug, PartialEq)]
pub struct OvrModel {
    pub models: Vec<BinaryModel>,
}

impl OvrModel {
    pub fn probabilities(&self, x: &[f64]) -> Vec<f64> {
        self.models.iter().map(|m| m.probability(x)).collect()
    }

    pub fn decisions(&self, x: &[f64]) -> Vec<f64> {
        self.models.iter().map(|m| m.decision(x)).collect()
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        let d = self.decisions(x);
        (0..d.len()).fold(0, |best, c| if d[c] > d[best] { c } else { best })
    }
}

/// Trains classes `0..num_classes`; every class must occur in `y`.
pub fn train_logreg_ovr(x: &[Vec<f64>], y: &[usize], num_classes: usize, opts: &LogRegOptions) -> Result<OvrModel> {
    if num_classes < 2 {
        return Err(Error::Validation(format!("need at least 2 classes, got {num_classes}")));
    }
    let missing: Vec<usize> = (0..num_classes).filter(|c| !y.contains(c)).collect();
    if !missing.is_empty() {
        return Err(Error::Validation(format!("classes absent from training data: {missing:?}")));
    }
    let models = (0..num_classes)
        .map(|c| {
            let yc: Vec<bool> = y.iter().map(|&v| v == c).collect();
            train_binary(x, &yc, opts)
        })
        .collect::<Result<_>>()?;
    Ok(OvrModel { models })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_fixture_is_fit() {
        let x = vec![vec![0.0, 0.0], vec![0.2, 0.1], vec![2.0, 2.1], vec![2.2, 1.9]];
        let y = vec![0, 0, 1, 1];
        let m = train_logreg_ovr(&x, &y, 2, &LogRegOptions::default()).unwrap();
        for (xi, &yi) in x.iter().zip(&y) {
            assert_eq!(m.predict(xi), yi);
        }
        assert!(m.models.iter().all(|b| b.converged));
    }

    #[test]
    fn absent_class_rejected() {
        let x = vec![vec![0.0], vec![1.0]];
        assert!(train_logreg_ovr(&x, &[0, 0], 2, &LogRegOptions::default()).is_err());
        assert!(train_logreg_ovr(&x, &[0, 2], 3, &LogRegOptions::default()).is_err());
    }

    #[test]
    fn gradient_vanishes_at_solution() {
        let x = vec![vec![1.0, 0.5], vec![-0.3, 0.2], vec![0.7, -1.0], vec![0.1, 0.1], vec![-1.2, 0.4]];
        let y = vec![true, false, true, false, true];
        let opts = LogRegOptions::default();
        let m = train_binary(&x, &y, &opts).unwrap();
        let f0 = objective(&x, &y, &m.weights, m.intercept, opts.l2);
        let h = 1e-4;
        for j in 0..2 {
            let mut w = m.weights.clone();
            w[j] += h;
            assert!(objective(&x, &y, &w, m.intercept, opts.l2) >= f0 - 1e-12);
            w[j] -= 2.0 * h;
            assert!(objective(&x, &y, &w, m.intercept, opts.l2) >= f0 - 1e-12);
        }
    }
}
