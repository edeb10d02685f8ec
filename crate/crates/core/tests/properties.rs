use fj_discord::adversary::{
    adaptive_greedy, attack, radicalize, Algorithm, AttackSpec, Information,
};
use fj_discord::discord::{
    disagreement_direct, discord_matrix, discord_operator, index_value, polarization_direct,
    DiscordKind, Kernel,
};
use fj_discord::dynamics::equilibrium;
use fj_discord::graph::{bfs_subsample, generate_sbm, Graph};
use fj_discord::maxcut::{
    cut_value, greedy_rebalance, rebalance_lower_bound, CutSolution, SolverConfig,
};
use fj_discord::opinion::{flip_opinions, rescale_opinions, OpinionVector};
use fj_discord::oracle::random_centered_psd;
use proptest::prelude::*;

fn graph_and_opinions() -> impl Strategy<Value = (Graph, Vec<f64>)> {
    (2usize..12).prop_flat_map(|n| {
        let edges = prop::collection::vec((0..n, 0..n, 0.01f64..2.0), 0..3 * n);
        let s = prop::collection::vec(0.0f64..=1.0, n);
        (Just(n), edges, s).prop_map(|(n, edges, s)| {
            let edges = edges.into_iter().filter(|&(u, v, _)| u != v);
            (Graph::new(n, edges).unwrap(), s)
        })
    })
}

fn kinds() -> impl Strategy<Value = DiscordKind> {
    prop_oneof![
        Just(DiscordKind::Disagreement),
        Just(DiscordKind::Polarization)
    ]
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (a.abs().max(b.abs())) + 1e-14
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laplacian_annihilates_ones((g, _) in graph_and_opinions()) {
        let ones = vec![1.0; g.node_count()];
        let worst = g.laplacian_apply(&ones).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(worst <= 1e-12 * (1.0 + g.max_weighted_degree()));
    }

    #[test]
    fn discord_matrices_centered_psd((g, _) in graph_and_opinions(), kind in kinds()) {
        let a = discord_matrix(&g, kind).unwrap().matrix;
        let norm = fj_discord::linalg::spectral_norm(&a);
        prop_assert!(fj_discord::linalg::min_eigenvalue(&a) >= -1e-8 * norm.max(1e-300));
        prop_assert!(fj_discord::linalg::max_row_sum(&a) <= 1e-8);
        prop_assert!(fj_discord::linalg::max_asymmetry(&a) <= 1e-12);
    }

    #[test]
    fn quadratic_form_matches_direct_sums((g, s) in graph_and_opinions()) {
        let s = OpinionVector::unit(s).unwrap();
        let d = index_value(&discord_matrix(&g, DiscordKind::Disagreement).unwrap(), &s).unwrap();
        let p = index_value(&discord_matrix(&g, DiscordKind::Polarization).unwrap(), &s).unwrap();
        prop_assert!(close(d, disagreement_direct(&g, s.values()), 1e-9));
        prop_assert!(close(p, polarization_direct(&g, s.values()), 1e-9));
    }

    #[test]
    fn rescaling_scales_quadratically(
        (g, s) in graph_and_opinions(),
        kind in kinds(),
        x in -2.0f64..0.0,
        width in 0.1f64..3.0,
    ) {
        let s = OpinionVector::unit(s).unwrap();
        let a = discord_matrix(&g, kind).unwrap();
        let mapped = rescale_opinions(&s, (0.0, 1.0), (x, x + width)).unwrap();
        let before = index_value(&a, &s).unwrap();
        let after = index_value(&a, &mapped).unwrap();
        prop_assert!(close(after, width * width * before, 1e-10) || before < 1e-13);
    }

    #[test]
    fn flipping_preserves_indices((g, s) in graph_and_opinions(), kind in kinds()) {
        let s = OpinionVector::unit(s).unwrap();
        let a = discord_matrix(&g, kind).unwrap();
        let flipped = flip_opinions(&s).unwrap();
        prop_assert!((index_value(&a, &s).unwrap() - index_value(&a, &flipped).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn equilibrium_stays_in_range((g, s) in graph_and_opinions()) {
        let s = OpinionVector::unit(s).unwrap();
        let z = equilibrium(&g, &s).unwrap();
        let (lo, hi) = s.values().iter().fold((1.0f64, 0.0f64), |(l, h), v| (l.min(*v), h.max(*v)));
        prop_assert!(z.values().iter().all(|v| *v >= lo - 1e-12 && *v <= hi + 1e-12));
    }

    #[test]
    fn cut_value_is_even(n in 2usize..12, seed in any::<u64>(), bits in any::<u64>()) {
        let a = random_centered_psd(n, n, seed);
        let x: Vec<f64> = (0..n).map(|i| if bits >> i & 1 == 1 { 1.0 } else { -1.0 }).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let v = cut_value(&a, &x);
        prop_assert!(v >= -1e-9);
        prop_assert!((v - cut_value(&a, &neg)).abs() <= 1e-9 * (1.0 + v));
    }

    #[test]
    fn rebalance_hits_target_above_bound(seed in any::<u64>(), bits in any::<u64>(), target in 1usize..=6) {
        let n = 12;
        let a = random_centered_psd(n, 5, seed);
        let signs: Vec<i8> = (0..n).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect();
        let start = CutSolution::new(&a, signs);
        let out = greedy_rebalance(&a, &start, target).unwrap();
        prop_assert_eq!(out.solution.size(), target);
        let bound = rebalance_lower_bound(n, start.size(), target, start.value);
        prop_assert!(out.solution.value >= bound - 1e-9 * (1.0 + start.value));
    }

    #[test]
    fn attacks_change_exactly_the_chosen_nodes(
        (g, s) in graph_and_opinions(),
        kind in kinds(),
        pick in 0usize..6,
        full in any::<bool>(),
        k_seed in any::<u64>(),
    ) {
        let n = g.node_count();
        let algorithm = Algorithm::ALL[pick];
        let info = if full && algorithm.supports(Information::Full) { Information::Full } else { Information::Limited };
        let k = 1 + (k_seed as usize) % n;
        let spec = AttackSpec {
            simulations: 10,
            solver: SolverConfig { trials: 5, ..SolverConfig::default() },
            ..AttackSpec::new(k, info, algorithm, k_seed)
        };
        let s0 = OpinionVector::unit(s).unwrap();
        let a = discord_operator(&g, kind);
        match attack(&g, &a, &s0, &spec) {
            Ok(result) => {
                prop_assert_eq!(result.chosen.len(), k);
                prop_assert_eq!(&result.s_after, &radicalize(&s0, &result.chosen).unwrap());
                let changed = s0.values().iter().zip(result.s_after.values()).filter(|(a, b)| a != b).count();
                prop_assert!(changed <= k);
                prop_assert_eq!(result.score, (result.after - result.before) / result.before);
            }
            Err(fj_discord::Error::UndefinedScore) => prop_assert_eq!(a.quad_form(s0.values()), 0.0),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn adaptive_greedy_never_declines_when_gain_exists((g, s) in graph_and_opinions(), kind in kinds()) {
        let a = discord_matrix(&g, kind).unwrap();
        let n = g.node_count();
        let path = adaptive_greedy(&a, &s, n).unwrap();
        let mut current = a.quad_form(&s);
        let mut x = s.clone();
        for (step, &u) in path.order.iter().enumerate() {
            let positive = (0..n).filter(|v| !path.order[..step].contains(v)).any(|v| {
                let mut t = x.clone();
                t[v] = 1.0;
                a.quad_form(&t) > current + 1e-12
            });
            if positive {
                prop_assert!(path.values[step] >= current - 1e-12);
            }
            x[u] = 1.0;
            current = path.values[step];
        }
    }

    #[test]
    fn sbm_is_a_function_of_its_arguments(a in 1usize..8, b in 1usize..8, p in 0.0f64..1.0, q in 0.0f64..1.0, seed in any::<u64>()) {
        let (g1, c1) = generate_sbm(&[a, b], p, q, seed).unwrap();
        let (g2, c2) = generate_sbm(&[a, b], p, q, seed).unwrap();
        prop_assert_eq!(g1.edges(), g2.edges());
        prop_assert_eq!(c1, c2);
    }

    #[test]
    fn full_bfs_of_connected_graph_keeps_every_node(n in 1usize..20, seed in any::<u64>()) {
        let g = Graph::new(n, (1..n).map(|v| (v - 1, v, 1.0))).unwrap();
        let sample = bfs_subsample(&g, n, seed).unwrap();
        prop_assert_eq!(sample.nodes, (0..n).collect::<Vec<_>>());
    }
}
