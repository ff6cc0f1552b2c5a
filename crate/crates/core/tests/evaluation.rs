mod common;

use common::seeded;
use proptest::prelude::*;
use rand::Rng;
use tsw_core::evaluation::{
    auroc, average_precision, cross_validate, stratified_folds, train_binary, CvOptions, LogRegOptions,
};

/// Precision at each positive, with rank ties broken by index.
fn ap_oracle(s: &[f64], y: &[bool]) -> f64 {
    let ahead = |i: usize, j: usize| s[j] > s[i] || (s[j] == s[i] && j <= i);
    let pos: Vec<usize> = (0..s.len()).filter(|&i| y[i]).collect();
    let total: f64 = pos
        .iter()
        .map(|&i| {
            let rank = (0..s.len()).filter(|&j| ahead(i, j)).count();
            let hits = pos.iter().filter(|&&j| ahead(i, j)).count();
            hits as f64 / rank as f64
        })
        .sum();
    total / pos.len() as f64
}

fn auroc_oracle(s: &[f64], y: &[bool]) -> f64 {
    let (mut num, mut pairs) = (0u64, 0u64);
    for i in (0..s.len()).filter(|&i| y[i]) {
        for j in (0..s.len()).filter(|&j| !y[j]) {
            pairs += 2;
            num += if s[i] > s[j] { 2 } else if s[i] == s[j] { 1 } else { 0 };
        }
    }
    num as f64 / pairs as f64
}

#[test]
fn metrics_match_oracles_exhaustively() {
    let mut rng = seeded(12);
    for n in 2..=12usize {
        // every labeling for small n, a random sample of them above
        let masks: Vec<u32> = if n <= 8 {
            (0..1u32 << n).collect()
        } else {
            (0..2000).map(|_| rng.random_range(0..1u32 << n)).collect()
        };
        for mask in masks {
            let y: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            // few distinct levels so ties are common
            let s: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(0..4u8)) * 0.25).collect();
            let pos = y.iter().filter(|&&b| b).count();
            if pos == 0 || pos == n {
                assert_eq!(average_precision(&s, &y), None);
                assert_eq!(auroc(&s, &y), None);
                continue;
            }
            assert_eq!(auroc(&s, &y).unwrap(), auroc_oracle(&s, &y));
            let ap = average_precision(&s, &y).unwrap();
            assert!((ap - ap_oracle(&s, &y)).abs() < 1e-12, "{s:?} {y:?}");
        }
    }
}

#[test]
fn metric_examples() {
    let y = [true, false, true];
    assert!((average_precision(&[0.9, 0.8, 0.3], &y).unwrap() - 5.0 / 6.0).abs() < 1e-15);
    assert_eq!(auroc(&[0.9, 0.8, 0.3], &y), Some(0.5));
    assert_eq!(auroc(&[0.5, 0.5, 0.5], &y), Some(0.5));
    assert_eq!(auroc(&[0.1, 0.2, 0.3], &[false, false, true]), Some(1.0));
}

/// Minimizer of `Σ log(1 + exp(-y w x)) + w²/2` by bisection on the derivative.
fn bisect_1d(x: &[f64], y: &[bool]) -> f64 {
    let grad = |w: f64| {
        w + x
            .iter()
            .zip(y)
            .map(|(&xi, &yi)| {
                let s = if yi { 1.0 } else { -1.0 };
                -s * xi / (1.0 + (s * w * xi).exp())
            })
            .sum::<f64>()
    };
    let (mut lo, mut hi) = (-100.0, 100.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if grad(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn one_dimensional_fit_matches_bisection() {
    let mut rng = seeded(30);
    let opts = LogRegOptions {
        l2: 1.0,
        fit_intercept: false,
        ..LogRegOptions::default()
    };
    for _ in 0..50 {
        let n = rng.random_range(4..40);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let y: Vec<bool> = x.iter().map(|&v| rng.random_bool(1.0 / (1.0 + (-2.0 * v).exp()))).collect();
        let rows: Vec<Vec<f64>> = x.iter().map(|&v| vec![v]).collect();
        let m = train_binary(&rows, &y, &opts).unwrap();
        assert!(m.converged);
        assert_eq!(m.intercept, 0.0);
        let want = bisect_1d(&x, &y);
        assert!((m.weights[0] - want).abs() < 1e-4, "{} vs {want}", m.weights[0]);
    }
}

/// 100 majority rows and 10 minority rows; classes overlap on one feature.
fn imbalanced() -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rng = seeded(40);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..110 {
        let c = usize::from(i >= 100);
        x.push(vec![c as f64 + rng.random_range(-0.8..0.8), rng.random_range(-1.0..1.0)]);
        y.push(c);
    }
    (x, y)
}

#[test]
fn macro_average_weights_classes_equally() {
    let (x, y) = imbalanced();
    let names = vec!["big".to_string(), "small".to_string()];
    let r = cross_validate(&x, &y, &names, &CvOptions::default()).unwrap();
    assert_eq!(r.folds.len(), 5);
    for f in &r.folds {
        assert_eq!(f.per_class.len(), 2);
        let mean = f.per_class.iter().map(|m| m.ap).sum::<f64>() / 2.0;
        assert!((f.macro_ap - mean).abs() < 1e-15);
        let mean = f.per_class.iter().map(|m| m.auroc).sum::<f64>() / 2.0;
        assert!((f.macro_auroc - mean).abs() < 1e-15);
    }
    let n = r.folds.len() as f64;
    let mean_ap = r.folds.iter().map(|f| f.macro_ap).sum::<f64>() / n;
    let var = r.folds.iter().map(|f| (f.macro_ap - mean_ap).powi(2)).sum::<f64>() / n;
    assert!((r.mean_ap - mean_ap).abs() < 1e-15);
    assert!((r.std_ap - var.sqrt()).abs() < 1e-15);
    // the minority class must pull the macro score below the majority score
    let big = r.per_class.iter().find(|c| c.name == "big").unwrap();
    let small = r.per_class.iter().find(|c| c.name == "small").unwrap();
    assert!(small.mean_ap < big.mean_ap);
    assert!(r.mean_ap < big.mean_ap);
}

#[test]
fn folds_are_stratified() {
    let (_, y) = imbalanced();
    let f = stratified_folds(&y, 5, 3).unwrap();
    for c in 0..2 {
        let per: Vec<usize> = (0..5).map(|k| (0..y.len()).filter(|&i| y[i] == c && f[i] == k).count()).collect();
        assert!(per.iter().max().unwrap() - per.iter().min().unwrap() <= 1, "{per:?}");
    }
    let sizes: Vec<usize> = (0..5).map(|k| f.iter().filter(|&&a| a == k).count()).collect();
    assert_eq!(sizes, vec![22; 5]);
}

#[test]
fn report_is_thread_count_invariant() {
    let (x, y) = imbalanced();
    let names = vec!["big".to_string(), "small".to_string()];
    let a = cross_validate(&x, &y, &names, &CvOptions::default()).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| cross_validate(&x, &y, &names, &CvOptions::default()).unwrap());
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn folds_depend_only_on_seed_and_labels(
        y in prop::collection::vec(0usize..3, 10..60),
        seed in any::<u64>(),
    ) {
        let a = stratified_folds(&y, 5, seed).unwrap();
        let b = stratified_folds(&y, 5, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.iter().all(|&f| f < 5));
        let sizes: Vec<usize> = (0..5).map(|k| a.iter().filter(|&&f| f == k).count()).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn auroc_is_rank_invariant(
        s in prop::collection::vec(-5i32..5, 4..20),
        y in prop::collection::vec(any::<bool>(), 20),
    ) {
        let y = &y[..s.len()];
        prop_assume!(y.contains(&true) && y.contains(&false));
        let s: Vec<f64> = s.into_iter().map(f64::from).collect();
        let moved: Vec<f64> = s.iter().map(|v| 3.0 * v.powi(3) + 1.0).collect();
        prop_assert_eq!(auroc(&s, y), auroc(&moved, y));
        prop_assert_eq!(average_precision(&s, y), average_precision(&moved, y));
    }
}
