mod common;

use common::*;
use mesostab::minors::{enumerate_forest_family, principal_minor_direct};
use mesostab::structure::{
    cut_decomposition, find_negative_cut, line_obstruction_scan, positive_spanning_tree, sigma_family, sigma_weight,
    verify_cut_identity,
};
use mesostab::sylvester::{is_psd_zero_row_sum, SylvesterOptions};
use mesostab::{Tolerances, WeightedGraph};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tree_iff_no_negative_cut(g in signed_graph_strategy(7, 12)) {
        let tree = positive_spanning_tree(&g);
        prop_assert_eq!(tree.is_some(), !exhaustive_negative_cut(&g));
        prop_assert_eq!(tree.is_some(), find_negative_cut(&g).is_none());
        if let Some(t) = tree {
            prop_assert!(t.is_forest());
            prop_assert!(t.edges().all(|e| e.weight > 0.0));
            prop_assert_eq!(t.len() + g.connected_components().len(), g.vertex_count());
        }
    }

    #[test]
    fn certified_laplacians_have_no_obstruction(g in signed_graph_strategy(7, 12)) {
        let l = g.laplacian();
        let verdict = is_psd_zero_row_sum(&l, &SylvesterOptions::default()).unwrap();
        if verdict.kind.is_positive_semidefinite() {
            prop_assert!(positive_spanning_tree(&g).is_some());
            prop_assert!(line_obstruction_scan(&g).iter().all(|r| !r.violated));
        }
    }

    #[test]
    fn identity_vanishes(g in signed_graph_strategy(6, 10)) {
        let tol = Tolerances::default();
        for v1 in proper_subsets(g.vertex_count()) {
            let id = verify_cut_identity(&g, &v1).unwrap();
            prop_assert!(id.holds(&tol), "V1 = {:?}: {:?}", v1, id);
        }
    }

    #[test]
    fn decomposition_reassembles_forest_family(g in signed_graph_strategy(5, 8), pick in any::<u32>()) {
        let n = g.vertex_count();
        for v1 in proper_subsets(n) {
            let c: Vec<usize> = v1.iter().copied().filter(|x| pick & (1 << x) != 0).collect();
            let fam = cut_decomposition(&g, &v1, &c).unwrap();
            prop_assert!(fam.matches_forest_family(), "V1 = {:?}, C = {:?}", v1, c);
            let s: Vec<usize> = v1.iter().copied().filter(|x| !c.contains(x)).collect();
            if !s.is_empty() {
                let direct = enumerate_forest_family(&g, &s).unwrap().into_members();
                prop_assert_eq!(fam.union(), direct);
            }
        }
    }

    #[test]
    fn sigma_weight_is_family_weight(g in signed_graph_strategy(6, 10), pick in any::<u32>()) {
        let n = g.vertex_count();
        let mask = pick % ((1 << n) - 2) + 1;
        let v1: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let inside: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
        for b in nonempty_subsets(v1.len()) {
            let b: Vec<usize> = b.iter().map(|&k| v1[k]).collect();
            let family: f64 = sigma_family(&g, &v1, &b).unwrap().iter().map(|d| d.weight()).sum();
            prop_assert!(close(sigma_weight(&g, &inside, &b), family, 1e-12, 1e-12));
        }
    }
}

fn path(weights: &[f64]) -> WeightedGraph {
    WeightedGraph::new(weights.len() + 1, weights.iter().enumerate().map(|(i, &w)| (i, i + 1, w))).unwrap()
}

#[test]
fn line_bound_is_sharp_for_uneven_weights() {
    let mut rng = rng(61);
    for _ in 0..100 {
        let k = rng.gen_range(2..=6);
        let mut weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.2..3.0)).collect();
        let bound = 1.0 / weights.iter().map(|w| 1.0 / w).sum::<f64>();
        let position = rng.gen_range(0..=k);
        let interior: Vec<usize> = (1..=k).collect();

        weights.insert(position, -bound);
        let g = path(&weights);
        let at = principal_minor_direct(&g.laplacian(), &interior).unwrap();
        let scale: f64 = weights.iter().map(|w| w.abs()).product::<f64>() * (k as f64 + 1.0) / bound;
        assert!(at.abs() <= 1e-9 * scale, "minor {at} at the bound");
        assert!(!line_obstruction_scan(&g)[0].violated);

        weights[position] = -bound * 1.001;
        let g = path(&weights);
        assert!(principal_minor_direct(&g.laplacian(), &interior).unwrap() < 0.0);
        assert!(line_obstruction_scan(&g)[0].violated);
    }
}

#[test]
fn lines_inside_larger_graphs() {
    // Three paths join the hubs 0 and 1. The long one carries a negative
    // edge below its harmonic bound of 0.5, and the parallel paths keep the
    // effective conductance between the hubs positive.
    let g = WeightedGraph::new(
        6,
        [(0, 2, 1.0), (2, 1, 1.0), (0, 3, 1.0), (3, 1, 1.0), (0, 4, 1.0), (4, 5, -0.2), (5, 1, 1.0)],
    )
    .unwrap();
    let reports = line_obstruction_scan(&g);
    assert_eq!(reports.len(), 3);
    let long = reports.iter().find(|r| r.path.len() == 4).unwrap();
    assert!(long.path == vec![0, 4, 5, 1] || long.path == vec![1, 5, 4, 0], "{:?}", long.path);
    assert!((long.bound.unwrap() - 0.5).abs() < 1e-12);
    assert!(reports.iter().all(|r| !r.violated));
    let verdict = is_psd_zero_row_sum(&g.laplacian(), &SylvesterOptions::default()).unwrap();
    assert!(verdict.is_maximal_rank_psd(6));

    // Past the bound the line is flagged and the Laplacian loses
    // semi-definiteness.
    let g = WeightedGraph::new(
        6,
        [(0, 2, 1.0), (2, 1, 1.0), (0, 3, 1.0), (3, 1, 1.0), (0, 4, 1.0), (4, 5, -0.6), (5, 1, 1.0)],
    )
    .unwrap();
    assert!(line_obstruction_scan(&g).iter().any(|r| r.violated));
    let verdict = is_psd_zero_row_sum(&g.laplacian(), &SylvesterOptions::default()).unwrap();
    assert!(!verdict.kind.is_positive_semidefinite());
}
