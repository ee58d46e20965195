use graphon::completion::{complete, CompletionConfig, ObservedNetwork};
use graphon::cutmetric::{cut_norm_exact, cut_norm_heuristic};
use graphon::estimation::{estimate_blockmodel, estimate_histogram, estimate_usvt};
use graphon::{empirical_graphon, io, sample_dense, KernelGraphon, LabeledGraph, ProbMatrix};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn graph(max_n: usize) -> impl Strategy<Value = LabeledGraph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| LabeledGraph::from_fn(n, |i, j| bits[i * n + j]))
    })
}

fn symmetric(max_n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(-1.0..=1.0f64, n * n).prop_map(move |v| {
            DMatrix::from_fn(n, n, |i, j| if i <= j { v[i * n + j] } else { v[j * n + i] })
        })
    })
}

fn valid(p: &ProbMatrix) -> bool {
    let m = p.as_matrix();
    let n = m.nrows();
    (0..n).all(|i| m[(i, i)] == 0.0 && (0..n).all(|j| m[(i, j)] == m[(j, i)] && (0.0..=1.0).contains(&m[(i, j)])))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn heuristic_never_beats_exact(a in symmetric(9), seed in any::<u64>()) {
        let exact = cut_norm_exact(&a).unwrap().value;
        let heur = cut_norm_heuristic(&a, 5, seed).unwrap().value;
        prop_assert!(heur <= exact + 1e-12);
    }

    #[test]
    fn estimators_return_valid_matrices(g in graph(24), k in 1usize..4, b in 1usize..5) {
        let n = g.n();
        prop_assert!(valid(&estimate_histogram(&g, b.min(n)).unwrap().p_hat));
        prop_assert!(valid(&estimate_blockmodel(&g, k.min(n), 20, 0).unwrap().p_hat));
        prop_assert!(valid(&estimate_usvt(&g, 0.01).unwrap().p_hat));
    }

    #[test]
    fn single_block_fits_agree(g in graph(20)) {
        let h = estimate_histogram(&g, 1).unwrap();
        let m = estimate_blockmodel(&g, 1, 5, 0).unwrap();
        prop_assert_eq!(h.p_hat, m.p_hat);
    }

    #[test]
    fn blow_up_keeps_the_graphon_integral(g in graph(8), k in 1usize..4) {
        let a = empirical_graphon(&g).unwrap().integral();
        let b = empirical_graphon(&g.blow_up(k).unwrap()).unwrap().integral();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn edge_lists_round_trip(g in graph(30)) {
        let text = io::format_edge_list(&g);
        let back = io::parse_edge_list(&text, std::path::Path::new("mem")).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn samplers_are_deterministic(n in 1usize..60, seed in any::<u64>()) {
        let w = KernelGraphon::product();
        let a = sample_dense(&w, n, seed).unwrap();
        let b = sample_dense(&w, n, seed).unwrap();
        prop_assert_eq!(a.graph, b.graph);
    }

    #[test]
    fn completion_output_is_a_probability_matrix(
        n in 3usize..16,
        bits in proptest::collection::vec((any::<bool>(), any::<bool>()), 120),
    ) {
        let mut triplets = Vec::new();
        let mut idx = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                let (seen, x) = bits[idx % bits.len()];
                idx += 1;
                if seen {
                    triplets.push((i, j, u8::from(x)));
                }
            }
        }
        prop_assume!(!triplets.is_empty());
        let obs = ObservedNetwork::new(n, triplets, None).unwrap();
        let done = complete(&obs, &CompletionConfig::default()).unwrap();
        prop_assert!(valid(&done.p_hat));
    }
}
