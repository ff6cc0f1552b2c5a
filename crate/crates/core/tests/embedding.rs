use proptest::prelude::*;
use tsw_core::embedding_space::{fit_all_components, fit_pca, PcaOptions};
use tsw_core::similarity_net::build_similarity_network;

fn arb_rows() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (3usize..10, 2usize..6).prop_flat_map(|(n, p)| {
        prop::collection::vec(prop::collection::vec(-20i32..20, p), n)
            .prop_map(|rows| rows.into_iter().map(|r| r.into_iter().map(f64::from).collect()).collect())
    })
}

fn centered(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = rows[0].len();
    let n = rows.len() as f64;
    let means: Vec<f64> = (0..p).map(|k| rows.iter().map(|r| r[k]).sum::<f64>() / n).collect();
    rows.iter().map(|r| r.iter().zip(&means).map(|(x, m)| x - m).collect()).collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn non_constant(rows: &[Vec<f64>]) -> bool {
    rows.iter().any(|r| r != &rows[0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn full_rank_projection_is_isometric(rows in arb_rows()) {
        prop_assume!(non_constant(&rows));
        let m = fit_all_components(&rows, false).unwrap();
        let proj = m.project_rows(&rows).unwrap();
        let c = centered(&rows);
        let scale = c.iter().flatten().fold(1.0f64, |a, x| a.max(x.abs()));
        for i in 0..rows.len() {
            for j in 0..rows.len() {
                prop_assert!((dist(&proj[i], &proj[j]) - dist(&c[i], &c[j])).abs() < 1e-8 * scale);
            }
        }
    }

    #[test]
    fn projected_columns_are_uncorrelated(rows in arb_rows()) {
        prop_assume!(non_constant(&rows));
        let m = fit_all_components(&rows, false).unwrap();
        let proj = m.project_rows(&rows).unwrap();
        let j = m.num_components();
        let n = rows.len() as f64;
        let var: Vec<f64> = (0..j).map(|a| proj.iter().map(|r| r[a] * r[a]).sum::<f64>() / n).collect();
        for a in 0..j {
            for b in 0..a {
                let cov = proj.iter().map(|r| r[a] * r[b]).sum::<f64>() / n;
                prop_assert!(cov.abs() / (var[a] * var[b]).sqrt() < 1e-8);
            }
        }
    }

    #[test]
    fn reconstruction_error_shrinks_with_components(rows in arb_rows()) {
        prop_assume!(non_constant(&rows));
        let full = fit_all_components(&rows, false).unwrap();
        let c = centered(&rows);
        let mut prev = f64::INFINITY;
        for j in 1..=full.num_components() {
            let m = full.truncated(j);
            let comps = m.components();
            let err: f64 = c.iter().zip(m.project_rows(&rows).unwrap()).map(|(x, z)| {
                (0..x.len()).map(|k| {
                    let back: f64 = (0..j).map(|a| comps[(k, a)] * z[a]).sum();
                    (x[k] - back).powi(2)
                }).sum::<f64>()
            }).sum();
            prop_assert!(err <= prev + 1e-9);
            prev = err;
        }
        prop_assert!(prev < 1e-8 * c.iter().flatten().map(|x| x * x).sum::<f64>().max(1.0));
    }

    #[test]
    fn ratios_are_sorted_and_bounded(rows in arb_rows(), target in 0.05f64..1.0) {
        prop_assume!(non_constant(&rows));
        let m = fit_pca(&rows, &PcaOptions { variance_target: target, unit_variance: false }).unwrap();
        let r = m.explained_variance_ratio();
        prop_assert!(r.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(r.iter().sum::<f64>() <= 1.0 + 1e-12);
        prop_assert!(r.iter().sum::<f64>() >= target - 1e-12);
        if r.len() > 1 {
            prop_assert!(r[..r.len() - 1].iter().sum::<f64>() < target);
        }
    }

    #[test]
    fn scaling_keeps_neighbor_sets(rows in arb_rows(), c in 0.01f64..100.0, k in 1usize..3) {
        prop_assume!(k < rows.len());
        let scaled: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|x| x * c).collect()).collect();
        let a = build_similarity_network(&rows, k).unwrap();
        let b = build_similarity_network(&scaled, k).unwrap();
        for v in 0..rows.len() {
            let mut d: Vec<f64> = (0..rows.len()).filter(|&u| u != v).map(|u| dist(&rows[v], &rows[u])).collect();
            d.sort_by(f64::total_cmp);
            // rounding after scaling may reorder exact ties at the cut
            if d.len() > k && d[k] == d[k - 1] {
                continue;
            }
            let set = |s: &tsw_core::similarity_net::SimilarityNetwork| {
                let mut x: Vec<u32> = s.neighbors(v as u32).iter().map(|n| n.node).collect();
                x.sort_unstable();
                x
            };
            prop_assert_eq!(set(&a), set(&b));
        }
    }

    #[test]
    fn retained_weights_dominate_discarded(rows in arb_rows(), k in 1usize..3) {
        prop_assume!(k < rows.len());
        let s = build_similarity_network(&rows, k).unwrap();
        for v in 0..rows.len() {
            let kept = s.neighbors(v as u32);
            prop_assert_eq!(kept.len(), k);
            let min_kept = kept.iter().map(|n| n.weight).fold(f64::INFINITY, f64::min);
            for u in 0..rows.len() {
                if u == v || kept.iter().any(|n| n.node as usize == u) {
                    continue;
                }
                let w = 1.0 / (1.0 + dist(&rows[v], &rows[u]));
                prop_assert!(w <= min_kept);
            }
            prop_assert!(kept.iter().all(|n| n.weight > 0.0 && n.weight <= 1.0 && n.node as usize != v));
        }
    }
}

#[test]
fn hand_fixture_keeps_two_components() {
    let rows = vec![
        vec![1.0, 2.0, 3.0],
        vec![6.0, 4.0, 1.0],
        vec![6.0, 4.0, 1.0],
        vec![7.0, 2.0, 3.0],
    ];
    let m = fit_pca(&rows, &PcaOptions::default()).unwrap();
    assert_eq!(m.num_components(), 2);
}
