use gcsg_core::classify::classify_graph;
use gcsg_core::dispatch::{solve, SolveOptions};
use gcsg_core::enumeration::{decode_labelling, encode_labelling, enumerate_connected_structures, solve_bruteforce};
use gcsg_core::graph::{is_connected_structure, BoundaryConstraint, CoalitionStructure, Graph, NodeSet};
use gcsg_core::harness::{random_connected_graph, random_idm_valuation, random_tree, random_weights, set_partitions};
use gcsg_core::minor_free::solve_minor_free;
use gcsg_core::separator::find_separator;
use gcsg_core::tree::{solve_tree_with_order, LeafOrder};
use gcsg_core::valuation::{
    check_idm, evaluate, normalize_singletons, structure_value, EdgeSumValuation, TableValuation, Value,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn weighted(n: usize, p: f64, seed: u64) -> (Graph, EdgeSumValuation) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_connected_graph(n, p, &mut rng);
    let v = EdgeSumValuation::new(&g, &random_weights(&g, &mut rng, -5, 5)).unwrap();
    (g, v)
}

fn has_edge_between(g: &Graph, x: &NodeSet, y: &NodeSet) -> bool {
    g.edges().iter().any(|&(u, v)| (x.contains(u) && y.contains(v)) || (x.contains(v) && y.contains(u)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_sum_is_modular_over_disconnected_unions(n in 2usize..=6, p in 0.1f64..0.9, seed in any::<u64>()) {
        let (g, v) = weighted(n, p, seed);
        let nodes: Vec<usize> = (0..n).collect();
        for cs in set_partitions(&nodes) {
            if let [x, y] = cs.blocks() {
                if !has_edge_between(&g, x, y) {
                    prop_assert_eq!(evaluate(&v, &x.union(y)), evaluate(&v, x) + evaluate(&v, y));
                }
            }
        }
        prop_assert_eq!(structure_value(&v, &CoalitionStructure::grand(&g.nodes())), v.total_weight());
        prop_assert_eq!(structure_value(&v, &CoalitionStructure::singletons(&g.nodes())), 0);
    }

    #[test]
    fn normalization_keeps_optimal_structures(n in 1usize..=5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_connected_graph(n, 0.5, &mut rng);
        let table: Vec<Value> = (0..1u64 << n).map(|m| if m == 0 { 0 } else { rng.gen_range(-6..=6) }).collect();
        let v = TableValuation::from_fn(n, |c| table[NodeSet::from(c.to_vec()).to_mask() as usize]).unwrap();
        let (norm, offset) = normalize_singletons(&v, n);
        let all: Vec<CoalitionStructure> = enumerate_connected_structures(&g, 6).unwrap().collect();
        let best = |f: &dyn Fn(&CoalitionStructure) -> Value| {
            let top = all.iter().map(f).max().unwrap();
            all.iter().filter(|cs| f(cs) == top).map(|cs| cs.to_string()).collect::<Vec<_>>()
        };
        for cs in &all {
            prop_assert_eq!(structure_value(&v, cs), structure_value(&norm, cs) + offset);
        }
        prop_assert_eq!(best(&|cs| structure_value(&v, cs)), best(&|cs| structure_value(&norm, cs)));
    }

    #[test]
    fn generated_valuations_are_idm(n in 2usize..=7, consts in any::<bool>(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_connected_graph(n, 0.4, &mut rng);
        let v = random_idm_valuation(&g, &mut rng, consts);
        prop_assert!(check_idm(&v, &g, 10).unwrap().holds());
    }

    #[test]
    fn solver_output_is_a_connected_partition(n in 1usize..=9, p in 0.1f64..0.8, seed in any::<u64>()) {
        let (g, v) = weighted(n, p, seed);
        let report = solve(&g, &v, &BoundaryConstraint::none(), &SolveOptions::default()).unwrap();
        let sol = report.solution.unwrap();
        sol.structure.check_covers(n).unwrap();
        prop_assert!(is_connected_structure(&g, &sol.structure).unwrap());
        prop_assert_eq!(sol.value, structure_value(&v, &sol.structure));
        prop_assert_eq!(Some(sol.value), solve_bruteforce(&g, &v, None, 12).unwrap().map(|s| s.value));
        // no block can be split along a negative cut and gain: the optimum is at least the all-singleton value
        prop_assert!(sol.value >= 0);
    }

    #[test]
    fn tree_leaf_order_does_not_change_value(n in 1usize..=40, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_tree(n, &mut rng);
        let v = EdgeSumValuation::new(&g, &random_weights(&g, &mut rng, -5, 5)).unwrap();
        let a = solve_tree_with_order(&g, &v, LeafOrder::SmallestFirst).unwrap();
        let b = solve_tree_with_order(&g, &v, LeafOrder::LargestFirst).unwrap();
        prop_assert_eq!(a.value, b.value);
        let positive: Value = g.edges().iter().map(|&(x, y)| v.weight(x, y).unwrap().max(0)).sum();
        prop_assert_eq!(a.value, positive);
        let cls = classify_graph(&g).unwrap();
        prop_assert_eq!(solve_minor_free(&g, &v, cls).unwrap().value, a.value);
    }

    #[test]
    fn separators_are_valid(n in 2usize..=24, p in 0.05f64..0.6, seed in any::<u64>()) {
        let (g, _) = weighted(n, p, seed);
        let d = find_separator(&g, 2.0 / 3.0).unwrap();
        if d.is_proper() {
            prop_assert!(d.validate(&g).is_ok(), "{:?}", d);
        } else {
            prop_assert!(!has_edge_between(&g, &d.only_a(), &d.only_b()));
        }
    }

    #[test]
    fn labellings_round_trip(r in 0usize..=7, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let elems: Vec<usize> = (0..r).collect();
        let parts = set_partitions(&elems);
        let cs = &parts[rng.gen_range(0..parts.len())];
        let decoded = decode_labelling(&encode_labelling(cs, r));
        if gcsg_core::enumeration::is_noncrossing(cs, &elems) {
            prop_assert_eq!(decoded.as_ref(), Some(cs));
        } else {
            prop_assert!(decoded.as_ref() != Some(cs));
        }
    }
}
