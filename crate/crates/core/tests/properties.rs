mod common;

use labelleak::generate;
use labelleak::graph::{AttrValue, Hop};
use labelleak::labeling::{assign_labels, cross_tie_count, LabelingParams};
use labelleak::learner::{five_by_two_folds, smote_oversample, Dataset, SmoteConfig};
use labelleak::sampler::IndexPermutation;
use labelleak::signature::{compute_nad, compute_ndd, pair_features, FeatureMode, NodeSignature, SignatureConfig};
use labelleak::split::{bfs_hd_overlap_split, jaccard_overlap, overlap_size, SplitConfig};
use labelleak::stats::{gaussian_kde, paired_t_statistic, PairedScoreVectors};
use labelleak::Graph;
use proptest::prelude::*;

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (10usize..90, 1u64..1000, 1.0f64..6.0).prop_map(|(n, seed, avg)| {
        let m = ((n as f64 * avg / 2.0) as usize).max(1);
        generate::gnm(n, m, seed)
    })
}

fn labeled(g: Graph, seed: u64) -> Graph {
    let n = g.node_count();
    g.with_attributes(common::random_labels(n, seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjacency_is_symmetric_and_simple(g in graph_strategy()) {
        prop_assert!(g.is_symmetric());
        let degree_sum: usize = (0..g.node_count()).map(|u| g.degree(u)).sum();
        prop_assert_eq!(degree_sum, 2 * g.edge_count());
        for u in 0..g.node_count() {
            prop_assert!(!g.neighbors(u).contains(&u));
            prop_assert!(g.neighbors(u).windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn split_covers_and_matches_alpha(g in graph_strategy(), alpha in 0.05f64..0.95, seed in any::<u64>()) {
        let n = g.node_count();
        let Ok(k) = overlap_size(alpha, n) else { return Ok(()) };
        let Ok(s) = bfs_hd_overlap_split(&g, &SplitConfig { alpha, seed, depth: 1 }) else {
            return Ok(());
        };
        let mut union: Vec<usize> = s.san_origin.iter().chain(&s.aux_origin).copied().collect();
        union.sort_unstable();
        union.dedup();
        prop_assert_eq!(union, (0..n).collect::<Vec<_>>());
        prop_assert!((jaccard_overlap(&s) - k as f64 / n as f64).abs() < 1e-12);
        for &(a, b) in &s.identity {
            prop_assert_eq!(s.san_origin[a], s.aux_origin[b]);
        }
        // induced: an edge survives exactly when both ends do
        for (u, v) in s.san.edges() {
            prop_assert!(g.has_edge(s.san_origin[u], s.san_origin[v]));
        }
        let kept = g.edges().filter(|&(u, v)| {
            s.san_origin.binary_search(&u).is_ok() && s.san_origin.binary_search(&v).is_ok()
        }).count();
        prop_assert_eq!(kept, s.san.edge_count());
        // the overlap ignores the seed
        let other = bfs_hd_overlap_split(&g, &SplitConfig { alpha, seed: seed ^ 1, depth: 1 }).unwrap();
        prop_assert_eq!(&other.overlap, &s.overlap);
    }

    #[test]
    fn labeler_keeps_group_sizes_and_counts_exactly(
        g in graph_strategy(), p in 0.05f64..0.95, tau in 0.0f64..1.0, seed in any::<u64>()
    ) {
        let params = LabelingParams { p, tau, seed, max_iters: Some(2000) };
        let r = assign_labels(&g, &params).unwrap();
        let n = g.node_count();
        let minority = (p.min(1.0 - p) * n as f64).round() as usize;
        prop_assert_eq!(r.assignment.iter().filter(|&&v| v == AttrValue::B).count(), minority);
        let m = common::matrix(&g);
        prop_assert_eq!(r.achieved_cross_ties, common::cross_ties(&m, &r.assignment));
        prop_assert_eq!(r.converged, r.achieved_cross_ties <= r.target_delta);
        if r.converged && r.accepted_swaps > 0 {
            prop_assert!(r.achieved_cross_ties + r.last_swap_gain > r.target_delta);
        }
        prop_assert!(r.iterations <= 2000);
    }

    #[test]
    fn signature_counts_are_conserved(g in graph_strategy(), seed in any::<u64>(), b in 1usize..6, bins in 1usize..8) {
        let g = labeled(g, seed);
        let cfg = SignatureConfig { bin_size: b, bins_per_hop: bins };
        let dist = common::distances(&common::matrix(&g));
        for u in 0..g.node_count() {
            for (h, hop) in [(1u32, Hop::One), (2, Hop::Two)] {
                let ring = common::ring(&dist, u, h);
                let ndd: u32 = compute_ndd(&g, u, hop, cfg).unwrap().iter().sum();
                let nad: u32 = compute_nad(&g, u, hop).unwrap().iter().sum();
                prop_assert_eq!(ndd as usize, ring.len());
                prop_assert_eq!(nad as usize, ring.len());
            }
        }
    }

    #[test]
    fn gs_is_a_projection_of_gs_lbl(g in graph_strategy(), seed in any::<u64>()) {
        let g = labeled(g, seed);
        let cfg = SignatureConfig::default();
        let a = NodeSignature::compute(&g, 0, cfg).unwrap();
        let b = NodeSignature::compute(&g, g.node_count() - 1, cfg).unwrap();
        let gs = pair_features(&a, &b, FeatureMode::Gs).unwrap().values;
        let lbl = pair_features(&a, &b, FeatureMode::GsLbl).unwrap().values;
        prop_assert_eq!(&gs[..42], &lbl[..42]);
        prop_assert_eq!(&gs[42..], &lbl[47..89]);
    }

    #[test]
    fn permutation_is_a_bijection(domain in 1u64..3000, key in any::<u64>()) {
        let perm = IndexPermutation::new(domain, key);
        let mut seen = vec![false; domain as usize];
        for i in 0..domain {
            let j = perm.apply(i);
            prop_assert!(j < domain);
            prop_assert!(!seen[j as usize]);
            seen[j as usize] = true;
        }
    }

    #[test]
    fn smote_balances_exactly(neg in 4usize..60, pos in 2usize..60, seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let rows: Vec<Vec<f64>> = (0..neg + pos)
            .map(|_| (0..3).map(|_| rand::Rng::gen_range(&mut rng, -5.0..5.0)).collect())
            .collect();
        let labels: Vec<u8> = (0..neg + pos).map(|i| (i >= neg) as u8).collect();
        let d = Dataset::from_rows(&rows, &labels).unwrap();
        let out = smote_oversample(&d, &SmoteConfig::default(), seed).unwrap();
        let big = neg.max(pos);
        prop_assert_eq!(out.class_counts(), [big, big]);
        // synthetic rows stay inside the minority's bounding box
        let minority = (pos < neg) as u8;
        for f in 0..3 {
            let vals: Vec<f64> = (0..d.len()).filter(|&i| d.label(i) == minority).map(|i| d.value(i, f)).collect();
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            for i in d.len()..out.len() {
                prop_assert!(out.value(i, f) >= lo - 1e-12 && out.value(i, f) <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn folds_are_stratified_partitions(labels in prop::collection::vec(0u8..2, 4..200), seed in any::<u64>()) {
        for f in five_by_two_folds(&labels, seed) {
            let mut all: Vec<usize> = f.first.iter().chain(&f.second).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
            for class in 0..2u8 {
                let a = f.first.iter().filter(|&&i| labels[i] == class).count();
                let b = f.second.iter().filter(|&&i| labels[i] == class).count();
                prop_assert!(a.abs_diff(b) <= 1);
            }
        }
    }

    #[test]
    fn t_is_antisymmetric_and_signed(
        pairs in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 3..50)
    ) {
        let gs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let lbl: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let fwd = paired_t_statistic(&PairedScoreVectors { gs: gs.clone(), gs_lbl: lbl.clone() });
        let rev = paired_t_statistic(&PairedScoreVectors { gs: lbl, gs_lbl: gs });
        if let (Ok(f), Ok(r)) = (fwd, rev) {
            prop_assert_eq!(f.t_statistic, -r.t_statistic);
            prop_assert_eq!(f.t_statistic.signum(), f.mean_difference.signum());
        }
    }

    #[test]
    fn kde_integrates_to_one_and_translates(
        samples in prop::collection::vec(-10.0f64..10.0, 2..80), shift in -50.0f64..50.0
    ) {
        let Ok(curve) = gaussian_kde(&samples, 400) else { return Ok(()) };
        prop_assert!(curve.density.iter().all(|&d| d >= 0.0));
        prop_assert!((curve.integral() - 1.0).abs() < 0.01, "{}", curve.integral());
        let moved: Vec<f64> = samples.iter().map(|s| s + shift).collect();
        let other = gaussian_kde(&moved, 400).unwrap();
        prop_assert!((other.bandwidth - curve.bandwidth).abs() < 1e-9);
        for (a, b) in curve.density.iter().zip(&other.density) {
            prop_assert!((a - b).abs() < 1e-6 * a.max(1e-3));
        }
    }
}

#[test]
fn cross_tie_count_agrees_with_oracle() {
    for seed in 0..20 {
        let g = common::random_graph(seed, 20, 150, 4.0);
        let labels = common::random_labels(g.node_count(), seed + 100);
        assert_eq!(cross_tie_count(&g, &labels).unwrap(), common::cross_ties(&common::matrix(&g), &labels));
    }
}
