//! One pass/fail line per acceptance criterion. Run with `--nocapture` to
//! see the lines; the test fails if any criterion does.

use std::collections::{BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use gcsg_core::classify::classify_graph;
use gcsg_core::enumeration::{
    count_connected_structures, enumerate_connected_structures, enumerate_noncrossing, solve_bruteforce,
};
use gcsg_core::graph::{BoundaryConstraint, CoalitionStructure, Graph, NodeSet};
use gcsg_core::harness::{
    all_connected_graphs, crosses, filter_oracle, random_connected_graph, random_idm_valuation,
    random_k4_block_graph, random_sp_graph, random_tree, random_weights, sat_bruteforce, set_partitions,
    random_3cnf,
};
use gcsg_core::minor_free::solve_minor_free;
use gcsg_core::sat::{decode_assignment, encode_assignment, reduce_3sat, Cnf3};
use gcsg_core::separator::{find_separator, DEFAULT_BALANCE};
use gcsg_core::separator_solver::{solve_separator, SolverConfig};
use gcsg_core::tree::solve_tree;
use gcsg_core::valuation::{
    check_idm, structure_value, EdgeSumValuation, IdmCheck, InducedValuation, RelabeledValuation, TableValuation,
    Valuation, Value,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn bf(graph: &Graph, v: &dyn Valuation, c: Option<&BoundaryConstraint>) -> Option<Value> {
    solve_bruteforce(graph, v, c, 16).unwrap().map(|s| s.value)
}

fn trees() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for k in 0..200 {
        let n = rng.gen_range(3..=8);
        let g = random_tree(n, &mut rng);
        let v = EdgeSumValuation::new(&g, &random_weights(&g, &mut rng, -5, 5)).unwrap();
        let got = solve_tree(&g, &v).map_err(|e| e.to_string())?;
        ensure(Some(got.value) == bf(&g, &v, None), || format!("tree {k}: edges {:?}", g.edges()))?;
    }
    Ok("200 trees, 3 <= n <= 8".into())
}

fn minor_free() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let run = |g: Graph, rng: &mut ChaCha8Rng, what: &str| -> Result<(), String> {
        let v = EdgeSumValuation::new(&g, &random_weights(&g, rng, -5, 5)).unwrap();
        let cls = classify_graph(&g).map_err(|e| e.to_string())?;
        let got = solve_minor_free(&g, &v, cls).map_err(|e| format!("{what}: {e}"))?;
        ensure(Some(got.value) == bf(&g, &v, None), || format!("{what}: edges {:?}", g.edges()))
    };
    for _ in 0..200 {
        let n = rng.gen_range(3..=9);
        let g = random_sp_graph(n, 0.2, &mut rng);
        run(g, &mut rng, "series-parallel")?;
    }
    for _ in 0..100 {
        let n = rng.gen_range(4..=9);
        let g = random_k4_block_graph(n, &mut rng);
        run(g, &mut rng, "K4 blocks")?;
    }
    Ok("200 series-parallel + 100 with K4 blocks".into())
}

fn separator() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut infeasible = 0;
    for k in 0..200 {
        let n = rng.gen_range(2..=8);
        let p = [0.2, 0.4, 0.7][k % 3];
        let g = random_connected_graph(n, p, &mut rng);
        let with_constants = rng.gen_bool(0.3);
        let v = random_idm_valuation(&g, &mut rng, with_constants);
        for constrained in [false, true] {
            let c = if constrained {
                let nodes: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
                let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
                BoundaryConstraint::new(CoalitionStructure::from_labels(nodes, &labels))
            } else {
                BoundaryConstraint::none()
            };
            let cfg = SolverConfig { base_threshold: 3, ..SolverConfig::default() };
            let got = solve_separator(&g, &v, &c, &cfg).map_err(|e| e.to_string())?;
            let want = bf(&g, &v, Some(&c));
            infeasible += usize::from(want.is_none());
            ensure(got.as_ref().map(|s| s.value) == want, || {
                format!("instance {k}: edges {:?} constraint {c:?}", g.edges())
            })?;
            if let Some(s) = got {
                ensure(c.is_satisfied_by(&s.structure), || format!("instance {k}: constraint violated"))?;
            }
        }
    }
    Ok(format!("200 graphs x {{free, constrained}}, {infeasible} infeasible agreed"))
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn enumeration() -> Outcome {
    let mut graphs = 0;
    for n in 1..=6 {
        for g in all_connected_graphs(n) {
            let ours: BTreeSet<String> =
                enumerate_connected_structures(&g, 6).unwrap().map(|cs| cs.to_string()).collect();
            let oracle: BTreeSet<String> = filter_oracle(&g).iter().map(|cs| cs.to_string()).collect();
            ensure(ours == oracle, || format!("edges {:?}", g.edges()))?;
            let count = count_connected_structures(&g, 6).unwrap();
            let bound = binomial((g.edge_count() + n) as u128, n as u128);
            ensure(count == ours.len() as u128 && count <= bound, || {
                format!("edges {:?}: count {count}, bound {bound}", g.edges())
            })?;
            graphs += 1;
        }
    }
    Ok(format!("{graphs} connected labelled graphs, n <= 6"))
}

fn noncrossing() -> Outcome {
    let mut counts = Vec::new();
    for r in 1..=8usize {
        let ours = enumerate_noncrossing(r, 16).unwrap().count();
        let elems: Vec<usize> = (0..r).collect();
        let filtered = set_partitions(&elems).iter().filter(|cs| !crosses(cs)).count();
        ensure(ours == filtered, || format!("r={r}: {ours} vs filter {filtered}"))?;
        ensure(2 * ours <= 1 << (2 * r), || format!("r={r}: {ours} above 4^r/2"))?;
        counts.push(ours);
    }
    ensure(counts[3] == 14, || format!("r=4 gave {}", counts[3]))?;
    Ok(format!("counts {counts:?}"))
}

/// Connected structures of the subgraph induced by `side`, in global ids.
fn side_structures(g: &Graph, side: &NodeSet) -> Vec<CoalitionStructure> {
    let (sub, map) = g.induced_subgraph(side);
    enumerate_connected_structures(&sub, 6)
        .unwrap()
        .map(|cs| {
            let blocks = cs.blocks().iter().map(|b| b.iter().map(|v| map[v]).collect()).collect();
            CoalitionStructure::new(blocks).unwrap()
        })
        .collect()
}

/// Glues `a` and `b`, which induce the same partition on `s`.
fn combine(a: &CoalitionStructure, b: &CoalitionStructure, s: &NodeSet) -> CoalitionStructure {
    let mut blocks: Vec<NodeSet> = Vec::new();
    for d in a.blocks() {
        let over = d.intersection(s);
        match b.blocks().iter().find(|f| !over.is_empty() && f.intersection(s) == over) {
            Some(f) => blocks.push(d.union(f)),
            None => blocks.push(d.clone()),
        }
    }
    blocks.extend(b.blocks().iter().filter(|f| !f.intersects(s)).cloned());
    CoalitionStructure::new(blocks).unwrap()
}

/// B-side subgraph plus an edge between separator nodes whose A blocks
/// coincide or are joined by an edge: those pairs interact through the A side.
fn augmented_b_side(g: &Graph, b_side: &NodeSet, s: &NodeSet, a: &CoalitionStructure) -> (Graph, Vec<usize>) {
    let (sub, map) = g.induced_subgraph(b_side);
    let local = |x: usize| map.iter().position(|&m| m == x).unwrap();
    let block = |x: usize| a.blocks().iter().position(|d| d.contains(x));
    let linked = |p, q| {
        p == q
            || g.edges().iter().any(|&(u, v)| {
                let (bu, bv) = (block(u), block(v));
                (bu, bv) == (p, q) || (bu, bv) == (q, p)
            })
    };
    let mut edges: BTreeSet<(usize, usize)> = sub.edges().iter().copied().collect();
    let over: Vec<usize> = s.iter().collect();
    for (i, &x) in over.iter().enumerate() {
        for &y in &over[i + 1..] {
            if linked(block(x), block(y)) {
                let (lx, ly) = (local(x), local(y));
                edges.insert((lx.min(ly), lx.max(ly)));
            }
        }
    }
    (Graph::new(sub.node_count(), edges).unwrap(), map)
}

fn induced_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let (mut pairs, mut idm_checks) = (0usize, 0usize);
    for n in 2..=6 {
        for g in all_connected_graphs(n) {
            let v = EdgeSumValuation::new(&g, &random_weights(&g, &mut rng, -5, 5)).unwrap();
            let d = find_separator(&g, DEFAULT_BALANCE).map_err(|e| e.to_string())?;
            let s = &d.separator;
            let mut b_by_overlap: HashMap<String, Vec<CoalitionStructure>> = HashMap::new();
            for b in side_structures(&g, &d.part_b) {
                b_by_overlap.entry(b.restrict(s).to_string()).or_default().push(b);
            }
            for a in side_structures(&g, &d.part_a) {
                let induced = InducedValuation::new(&v, &a, d.part_b.clone());
                let a_sum = structure_value(&v, &a);
                for b in b_by_overlap.get(&a.restrict(s).to_string()).into_iter().flatten() {
                    let c = combine(&a, b, s);
                    let b_sum: Value = b.blocks().iter().map(|f| induced.evaluate(f.as_slice())).sum();
                    ensure(structure_value(&v, &c) == a_sum + b_sum, || {
                        format!("edges {:?}: A {a} B {b}", g.edges())
                    })?;
                    pairs += 1;
                }
                let (aug, map) = augmented_b_side(&g, &d.part_b, s, &a);
                let local_v = RelabeledValuation::new(&induced, map);
                let verdict = check_idm(&local_v, &aug, 10).map_err(|e| e.to_string())?;
                ensure(verdict.holds(), || format!("edges {:?}: A {a} gives {verdict:?}", g.edges()))?;
                idm_checks += 1;
            }
        }
    }
    Ok(format!("{pairs} compatible pairs, {idm_checks} induced valuations IDM"))
}

fn sat_case(cnf: &Cnf3) -> Result<bool, String> {
    let m = cnf.clauses().len() as Value;
    let art = reduce_3sat(cnf).map_err(|e| e.to_string())?;
    ensure(art.graph.node_count() == 3 * cnf.clauses().len() + 1, || "node count".into())?;
    let best = solve_bruteforce(&art.graph, &art.weights, None, 13).unwrap().unwrap();
    let witness = sat_bruteforce(cnf).map_err(|e| e.to_string())?;
    ensure(best.value <= m, || format!("{cnf}: optimum {} above m", best.value))?;
    ensure((best.value == m) == witness.is_some(), || format!("{cnf}: optimum {} disagrees", best.value))?;
    if best.value == m {
        let a = decode_assignment(&art, &best.structure).unwrap().ok_or("decode gave nothing")?;
        ensure(cnf.is_satisfied_by(&a), || format!("{cnf}: decoded assignment fails"))?;
        for &(x, y) in art.graph.edges() {
            let together = best.structure.block_of(x).is_some_and(|blk| blk.contains(y));
            ensure(!together || art.weights.weight(x, y).unwrap() > 0, || format!("{cnf}: negative edge inside a block"))?;
        }
    }
    if let Some(w) = &witness {
        let cs = encode_assignment(&art, w).map_err(|e| e.to_string())?;
        ensure(structure_value(&art.weights, &cs) == m, || format!("{cnf}: encoded value"))?;
    }
    Ok(witness.is_some())
}

fn sat() -> Outcome {
    let exemplars = [
        (Cnf3::new(3, vec![[1, 2, 3]]).unwrap(), true),
        (Cnf3::new(3, vec![[1, 2, 3], [-1, -2, -3]]).unwrap(), true),
        (Cnf3::new(1, vec![[1, 1, 1], [-1, -1, -1]]).unwrap(), false),
        (Cnf3::new(2, vec![[1, 1, 2], [1, 1, -2], [-1, -1, 2], [-1, -1, -2]]).unwrap(), false),
    ];
    for (cnf, expect) in &exemplars {
        ensure(sat_case(cnf)? == *expect, || format!("exemplar {cnf}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut satisfiable = 0;
    for k in 0..100 {
        let m = rng.gen_range(1..=4);
        // few variables make unsatisfiable formulas common
        let vars = rng.gen_range(1..=if k % 2 == 0 { 2 } else { 6 });
        satisfiable += usize::from(sat_case(&random_3cnf(vars, m, &mut rng))?);
    }
    Ok(format!("4 exemplars + 100 random ({satisfiable} satisfiable, {} not)", 100 - satisfiable))
}

fn idm_checker() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for k in 0..50 {
        let n = rng.gen_range(2..=8);
        let g = random_connected_graph(n, 0.4, &mut rng);
        let v = EdgeSumValuation::new(&g, &random_weights(&g, &mut rng, -5, 5)).unwrap();
        let verdict = check_idm(&v, &g, 10).map_err(|e| e.to_string())?;
        ensure(verdict.holds(), || format!("graph {k}: {verdict:?}"))?;
    }
    let square = TableValuation::from_fn(3, |c| (c.len() * c.len()) as Value).unwrap();
    let verdict = check_idm(&square, &Graph::path(3), 10).map_err(|e| e.to_string())?;
    let expected = IdmCheck::Violation { i: 0, j: 2, separator: NodeSet::from([1]) };
    ensure(verdict == expected, || format!("|C|^2 gave {verdict:?}"))?;
    Ok("50 edge-sum valuations hold; |C|^2 fails at (0, 2, {1})".into())
}

fn timed<T>(limit: Duration, what: &str, f: impl FnOnce() -> T) -> Result<Duration, String> {
    let start = Instant::now();
    f();
    let t = start.elapsed();
    ensure(t < limit, || format!("{what} took {t:?}, limit {limit:?}"))?;
    Ok(t)
}

fn scaling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let tree = random_tree(10_000, &mut rng);
    let tv = EdgeSumValuation::new(&tree, &random_weights(&tree, &mut rng, -5, 5)).unwrap();
    let t1 = timed(Duration::from_secs(2), "tree n=10000", || solve_tree(&tree, &tv).unwrap())?;

    let sp = random_sp_graph(2000, 0.2, &mut rng);
    let sv = EdgeSumValuation::new(&sp, &random_weights(&sp, &mut rng, -5, 5)).unwrap();
    let cls = classify_graph(&sp).unwrap();
    let t2 = timed(Duration::from_secs(30), "series-parallel n=2000", || solve_minor_free(&sp, &sv, cls).unwrap())?;

    let grid = Graph::grid(5, 5);
    let gv = EdgeSumValuation::new(&grid, &random_weights(&grid, &mut rng, -5, 5)).unwrap();
    let none = BoundaryConstraint::none();
    let t3 = timed(Duration::from_secs(60), "5x5 grid", || {
        solve_separator(&grid, &gv, &none, &SolverConfig::default()).unwrap()
    })?;
    Ok(format!("tree 10^4 in {t1:.2?}, series-parallel 2000 in {t2:.2?}, 5x5 grid in {t3:.2?}"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("oracle equivalence, trees", trees),
        ("oracle equivalence, minor-free", minor_free),
        ("oracle equivalence, separator", separator),
        ("enumeration correctness", enumeration),
        ("non-crossing bound", noncrossing),
        ("induced valuation identity", induced_identity),
        ("3-SAT equivalence", sat),
        ("IDM checker", idm_checker),
        ("scaling smoke tests", scaling),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} [{t:.2?}]"),
            Err(why) => {
                println!("FAIL {name}: {why} [{t:.2?}]");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
