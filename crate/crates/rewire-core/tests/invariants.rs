//! Property-based invariants over graphs, objectives and the environment.

mod common;

use common::union_find_components;
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rewire_core::env::{self, EnvConfig};
use rewire_core::generate::{generate, GeneratorSpec, GraphModel};
use rewire_core::graph::{parse_edge_list, serialize_edge_list, Graph};
use rewire_core::objectives::{self, ObjectiveConfig, ObjectiveKind};
use rewire_core::spectral;

/// Random simple graph from an edge-subset mask.
fn arb_graph() -> impl Strategy<Value = Graph> {
    (2usize..24, any::<u64>()).prop_map(|(n, seed)| {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut g = Graph::empty(n).unwrap();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < 0.3 {
                    g.add_edge(i, j).unwrap();
                }
            }
        }
        g
    })
}

fn arb_permutation(n: usize, seed: u64) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    perm
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_list_round_trips(g in arb_graph()) {
        let text = serialize_edge_list(&g);
        let back = parse_edge_list(&text).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn component_count_matches_union_find(g in arb_graph()) {
        let labeling = g.connected_components();
        prop_assert_eq!(labeling.count, union_find_components(g.n(), &g.edges()));
        // labels are contiguous 0..count
        let max_label = labeling.label.iter().copied().max().unwrap();
        prop_assert_eq!(max_label + 1, labeling.count);
    }

    #[test]
    fn degree_distribution_is_permutation_invariant(g in arb_graph(), seed in any::<u64>()) {
        let perm = arb_permutation(g.n(), seed);
        let h = g.relabel(&perm).unwrap();
        prop_assert_eq!(g.degree_distribution(), h.degree_distribution());
        // shannon entropy is a function of the distribution alone
        prop_assert_eq!(objectives::shannon_entropy(&g), objectives::shannon_entropy(&h));
    }

    #[test]
    fn spectral_radius_is_permutation_invariant(seed in any::<u64>(), perm_seed in any::<u64>()) {
        let g = generate(&GeneratorSpec { model: GraphModel::Er { p: 0.3 }, n: 14, seed }).unwrap();
        let perm = arb_permutation(g.n(), perm_seed);
        let h = g.relabel(&perm).unwrap();
        let a = spectral::largest_eigenvalue(&g).unwrap();
        let b = spectral::largest_eigenvalue(&h).unwrap();
        prop_assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn shannon_entropy_zero_iff_regular(g in arb_graph()) {
        let h = objectives::shannon_entropy(&g);
        prop_assert!(h >= 0.0);
        let regular = (0..g.n()).all(|v| g.degree(v) == g.degree(0));
        prop_assert_eq!(h == 0.0, regular);
    }

    #[test]
    fn generated_graphs_are_connected_and_simple(
        seed in any::<u64>(),
        model_pick in 0usize..4,
    ) {
        let model = [
            GraphModel::Ba { m: 1 },
            GraphModel::Ba { m: 2 },
            GraphModel::Er { p: 0.15 },
            GraphModel::Ws { k: 4, p: 0.1 },
        ][model_pick];
        let n = 20;
        let g = generate(&GeneratorSpec { model, n, seed }).unwrap();
        prop_assert_eq!(g.n(), n);
        prop_assert!(g.is_connected());
        // degree sum identity
        let degree_sum: usize = (0..n).map(|v| g.degree(v)).sum();
        prop_assert_eq!(degree_sum, 2 * g.m());
    }
}

#[test]
fn episode_edge_conservation_and_reward_shape() {
    // random episodes across the three generator families
    let cfg = EnvConfig::new(ObjectiveConfig::new(ObjectiveKind::Shannon), 0.15);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    for seed in 0..30u64 {
        let model = [
            GraphModel::Ba { m: 2 },
            GraphModel::Er { p: 0.15 },
            GraphModel::Ws { k: 4, p: 0.1 },
        ][(seed % 3) as usize];
        let g = generate(&GeneratorSpec { model, n: 30, seed }).unwrap();
        let initial_m = g.m();
        let mut state = env::reset(&g, &cfg).unwrap();
        while !state.is_terminal() {
            let actions = env::valid_actions(&state);
            assert!(!actions.is_empty());
            if state.phase() == 2 {
                // phase-2 action sets are never empty once reached
                assert!(!actions.is_empty());
            }
            let action = actions[rng.random_range(0..actions.len())];
            let outcome = env::step(&state, action, &cfg).unwrap();
            state = outcome.next_state;
            match state.phase() {
                0 => assert_eq!(state.graph.m(), initial_m),
                2 => assert_eq!(state.graph.m(), initial_m + 1),
                _ => {}
            }
            assert_eq!(state.graph.n(), g.n());
            if !outcome.terminal {
                assert_eq!(outcome.reward, 0.0);
            }
        }
    }
}
