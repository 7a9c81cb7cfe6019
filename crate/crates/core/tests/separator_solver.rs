use gcsg_core::enumeration::solve_bruteforce;
use gcsg_core::graph::{connected_components, BoundaryConstraint, CoalitionStructure, Graph, NodeSet};
use gcsg_core::harness::random_weights;
use gcsg_core::separator_solver::{solve_separator, top_level_pairs, BoundaryEnumeration, SolverConfig};
use gcsg_core::valuation::EdgeSumValuation;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn masks(cs: &CoalitionStructure) -> Vec<u64> {
    let mut m: Vec<u64> = cs.blocks().iter().map(NodeSet::to_mask).filter(|&m| m != 0).collect();
    m.sort_unstable();
    m
}

fn chords_cross(a: (usize, usize), b: (usize, usize)) -> bool {
    let inside = |x: usize| a.0 < x && x < a.1;
    let shared = a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1;
    !shared && inside(b.0) != inside(b.1)
}

/// Cycle on `0..n` in id order plus random non-crossing chords.
fn outerplanar(n: usize, tries: usize, rng: &mut impl Rng) -> Graph {
    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n))).collect();
    let mut chords: Vec<(usize, usize)> = Vec::new();
    for _ in 0..tries {
        let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let c = (x.min(y), x.max(y));
        if c.1 - c.0 < 2 || (c.0 == 0 && c.1 == n - 1) || chords.contains(&c) {
            continue;
        }
        if chords.iter().all(|&d| !chords_cross(c, d)) {
            chords.push(c);
        }
    }
    edges.extend(chords);
    Graph::new(n, edges).unwrap()
}

#[test]
fn noncrossing_matches_all_partitions_on_outerplanar_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for round in 0..80 {
        let n = rng.gen_range(3..=11);
        let g = if round % 3 == 0 { Graph::cycle(n) } else { outerplanar(n, n, &mut rng) };
        let v = EdgeSumValuation::new(&g, &random_weights(&g, &mut rng, -6, 6)).unwrap();
        let cfg = |e| SolverConfig { base_threshold: 3, boundary_enumeration: e, ..SolverConfig::default() };
        let all = solve_separator(&g, &v, &BoundaryConstraint::none(), &cfg(BoundaryEnumeration::AllPartitions)).unwrap();
        let nc = solve_separator(&g, &v, &BoundaryConstraint::none(), &cfg(BoundaryEnumeration::NonCrossing)).unwrap();
        let bf = solve_bruteforce(&g, &v, None, 12).unwrap();
        assert_eq!(all.as_ref().map(|s| s.value), bf.map(|s| s.value));
        assert_eq!(nc.map(|s| s.value), all.map(|s| s.value), "edges {:?}", g.edges());
    }
}

#[test]
fn noncrossing_enumerates_fewer_pairs() {
    let g = Graph::cycle(12);
    let base = SolverConfig { base_threshold: 3, ..SolverConfig::default() };
    let nc = SolverConfig { boundary_enumeration: BoundaryEnumeration::NonCrossing, ..base.clone() };
    let (_, all) = top_level_pairs(&g, &BoundaryConstraint::none(), &base).unwrap();
    let (_, few) = top_level_pairs(&g, &BoundaryConstraint::none(), &nc).unwrap();
    assert!(few.len() <= all.len());
    assert!(few.iter().all(|p| all.contains(p)));
}

#[test]
fn optimum_appears_among_top_level_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cfg = SolverConfig { base_threshold: 3, ..SolverConfig::default() };
    for _ in 0..40 {
        let n = rng.gen_range(5..=10);
        let g = gcsg_core::harness::random_connected_graph(n, 0.35, &mut rng);
        let v = EdgeSumValuation::new(&g, &random_weights(&g, &mut rng, -5, 5)).unwrap();
        let best = solve_bruteforce(&g, &v, None, 12).unwrap().unwrap();
        let (d, pairs) = top_level_pairs(&g, &BoundaryConstraint::none(), &cfg).unwrap();
        let s = &d.separator;
        let on_s = masks(&best.structure.restrict(s));
        // how each side connects the separator nodes inside the optimum
        let side_pattern = |part: &NodeSet| {
            let mut classes = Vec::new();
            for block in best.structure.blocks() {
                let local = block.intersection(&part.union(s));
                for comp in connected_components(&g, &local) {
                    let m = comp.intersection(s).to_mask();
                    if m != 0 {
                        classes.push(m);
                    }
                }
            }
            classes.sort_unstable();
            classes
        };
        let (want_a, want_b) = (side_pattern(&d.part_a), side_pattern(&d.part_b));
        let hit = pairs
            .iter()
            .any(|p| masks(&p.blocks) == on_s && masks(&p.a_side) == want_a && masks(&p.b_side) == want_b);
        assert!(hit, "edges {:?} optimum {:?}", g.edges(), best.structure);
    }
}

#[test]
fn grid_matches_bruteforce() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = Graph::grid(4, 4);
    for _ in 0..2 {
        let v = EdgeSumValuation::new(&g, &random_weights(&g, &mut rng, -4, 4)).unwrap();
        let want = solve_bruteforce(&g, &v, None, 16).unwrap().unwrap();
        let got = solve_separator(&g, &v, &BoundaryConstraint::none(), &SolverConfig::default()).unwrap().unwrap();
        assert_eq!(got.value, want.value);
    }
}
