//! Instance generators and independent oracles shared by the tests, the
//! acceptance run and the `bench` command.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{is_connected_structure, CoalitionStructure, Graph, NodeSet};
use crate::valuation::{EdgeSumValuation, TableValuation, Valuation, Value};

pub use crate::sat::{random_3cnf, sat_bruteforce};

/// All set partitions of `elems`, from restricted growth strings.
pub fn set_partitions(elems: &[usize]) -> Vec<CoalitionStructure> {
    let r = elems.len();
    if r == 0 {
        return vec![CoalitionStructure::empty()];
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; r];
    loop {
        let blocks = rgs.iter().copied().max().unwrap() + 1;
        let mut sets = vec![Vec::new(); blocks];
        for (i, &b) in rgs.iter().enumerate() {
            sets[b].push(elems[i]);
        }
        out.push(CoalitionStructure::new(sets.into_iter().map(NodeSet::from).collect()).unwrap());
        // next restricted growth string
        let mut i = r - 1;
        loop {
            let prefix_max = rgs[..i].iter().copied().max().unwrap_or(0);
            if i > 0 && rgs[i] <= prefix_max {
                rgs[i] += 1;
                for x in &mut rgs[i + 1..] {
                    *x = 0;
                }
                break;
            }
            if i <= 1 {
                return out;
            }
            i -= 1;
        }
    }
}

/// Connected structures found by filtering every set partition.
pub fn filter_oracle(graph: &Graph) -> Vec<CoalitionStructure> {
    set_partitions(graph.nodes().as_slice())
        .into_iter()
        .filter(|cs| is_connected_structure(graph, cs).unwrap())
        .collect()
}

/// Whether two blocks interleave in node order, checked pairwise.
pub fn crosses(cs: &CoalitionStructure) -> bool {
    let blocks = cs.blocks();
    for (x, p) in blocks.iter().enumerate() {
        for q in &blocks[x + 1..] {
            for &i in p.as_slice() {
                for &k in p.as_slice() {
                    for &j in q.as_slice() {
                        for &l in q.as_slice() {
                            if i < j && j < k && k < l {
                                return true;
                            }
                        }
                    }
                }
            }
        }
    }
    false
}

pub fn random_weights(graph: &Graph, rng: &mut impl Rng, lo: Value, hi: Value) -> Vec<Value> {
    (0..graph.edge_count()).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// Random valuation satisfying independence of disconnected members: an
/// edge sum, plus random per-node constants when `node_constants` is set.
pub fn random_idm_valuation(graph: &Graph, rng: &mut impl Rng, node_constants: bool) -> Box<dyn Valuation> {
    let edges = EdgeSumValuation::new(graph, &random_weights(graph, rng, -5, 5)).unwrap();
    if !node_constants || graph.node_count() > 12 {
        return Box::new(edges);
    }
    let consts: Vec<Value> = (0..graph.node_count()).map(|_| rng.gen_range(-3..=3)).collect();
    let table = TableValuation::from_fn(graph.node_count(), |c| {
        if c.is_empty() {
            0
        } else {
            edges.evaluate(c) + c.iter().map(|&v| consts[v]).sum::<Value>()
        }
    })
    .unwrap();
    Box::new(table)
}

/// Uniform random labelled tree from a Prüfer sequence.
pub fn random_tree(n: usize, rng: &mut impl Rng) -> Graph {
    if n <= 1 {
        return Graph::empty(n);
    }
    if n == 2 {
        return Graph::path(2);
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut leaves: std::collections::BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &s in &seq {
        let leaf = *leaves.iter().next().unwrap();
        leaves.remove(&leaf);
        edges.push((leaf, s));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves.insert(s);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push((rest[0], rest[1]));
    Graph::new(n, edges).unwrap()
}

/// Random connected series-parallel graph on `n` nodes. Starting from a
/// triangle, edges are subdivided or doubled by a parallel 2-path; with
/// probability `pendant` a new node is hung off an existing one instead,
/// which yields bridge blocks.
pub fn random_sp_graph(n: usize, pendant: f64, rng: &mut impl Rng) -> Graph {
    if n < 3 {
        return Graph::path(n);
    }
    let mut edges: Vec<(usize, usize)> = vec![(0, 1), (1, 2), (0, 2)];
    for v in 3..n {
        if rng.gen_bool(pendant) {
            edges.push((rng.gen_range(0..v), v));
            continue;
        }
        let k = rng.gen_range(0..edges.len());
        let (a, b) = edges[k];
        if rng.gen_bool(0.5) {
            edges.swap_remove(k);
        }
        edges.push((a, v));
        edges.push((v, b));
    }
    Graph::new(n, edges).unwrap()
}

/// Random connected graph whose blocks are K4s, series-parallel pieces and bridges.
pub fn random_k4_block_graph(n: usize, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    let mut size = 1;
    while size < n {
        let anchor = rng.gen_range(0..size);
        let room = n - size;
        if room >= 3 && rng.gen_bool(0.5) {
            let nodes = [anchor, size, size + 1, size + 2];
            for i in 0..4 {
                for j in i + 1..4 {
                    edges.push((nodes[i], nodes[j]));
                }
            }
            size += 3;
        } else if room >= 2 && rng.gen_bool(0.5) {
            edges.extend([(anchor, size), (size, size + 1), (size + 1, anchor)]);
            size += 2;
        } else {
            edges.push((anchor, size));
            size += 1;
        }
    }
    Graph::new(n, edges).unwrap()
}

/// Random connected graph: a random tree plus each other pair with probability `p`.
pub fn random_connected_graph(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let tree = random_tree(n, rng);
    let mut edges: Vec<(usize, usize)> = tree.edges().to_vec();
    for u in 0..n {
        for v in u + 1..n {
            if !tree.has_edge(u, v) && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges.shuffle(rng);
    Graph::new(n, edges).unwrap()
}

/// Connected subgraph of a grid: a random spanning tree of the grid plus
/// each remaining grid edge with probability `keep`.
pub fn random_grid_subgraph(rows: usize, cols: usize, keep: f64, rng: &mut impl Rng) -> Graph {
    let grid = Graph::grid(rows, cols);
    let n = grid.node_count();
    let mut order: Vec<(usize, usize)> = grid.edges().to_vec();
    order.shuffle(rng);
    let mut uf = petgraph::unionfind::UnionFind::new(n);
    let mut edges = Vec::new();
    let mut extra = Vec::new();
    for (u, v) in order {
        if uf.union(u, v) {
            edges.push((u, v));
        } else {
            extra.push((u, v));
        }
    }
    edges.extend(extra.into_iter().filter(|_| rng.gen_bool(keep)));
    Graph::new(n, edges).unwrap()
}

/// Every connected labelled graph on `n` nodes.
pub fn all_connected_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    assert!(pairs.len() < 32, "too many graphs to list");
    (0u32..1 << pairs.len())
        .map(|m| Graph::new(n, pairs.iter().enumerate().filter(|(k, _)| m >> k & 1 == 1).map(|(_, &e)| e)).unwrap())
        .filter(Graph::is_connected)
        .collect()
}

/// Whether `h` is a minor of `graph`: some family of disjoint connected
/// branch sets, one per node of `h`, has an edge between the sets of every
/// edge of `h`. Branch sets are opened in order of their smallest node and
/// matched to `h` under every bijection.
pub fn has_minor(graph: &Graph, h: &Graph) -> bool {
    let n = graph.node_count();
    let k = h.node_count();
    if k > n {
        return false;
    }
    let adj = graph.adjacency_masks();
    let mut sets = vec![0u64; k];
    search(0, 0, &adj, h, n, &mut sets)
}

fn set_connected(adj: &[u64], set: u64) -> bool {
    let mut seen = set & set.wrapping_neg();
    loop {
        let mut next = seen;
        let mut rest = seen;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            next |= adj[v] & set;
        }
        if next == seen {
            return seen == set;
        }
        seen = next;
    }
}

fn search(pos: usize, opened: usize, adj: &[u64], h: &Graph, n: usize, sets: &mut Vec<u64>) -> bool {
    let k = h.node_count();
    if pos == n {
        if opened < k || !sets.iter().all(|&s| set_connected(adj, s)) {
            return false;
        }
        let touching = |x: usize, y: usize| {
            let mut rest = sets[x];
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if adj[v] & sets[y] != 0 {
                    return true;
                }
            }
            false
        };
        let mut perm: Vec<usize> = (0..k).collect();
        return permutations(&mut perm, 0, &mut |p| h.edges().iter().all(|&(x, y)| touching(p[x], p[y])));
    }
    // leave the node out of every branch set
    if search(pos + 1, opened, adj, h, n, sets) {
        return true;
    }
    for b in 0..(opened + 1).min(k) {
        sets[b] |= 1 << pos;
        let found = search(pos + 1, opened.max(b + 1), adj, h, n, sets);
        sets[b] &= !(1 << pos);
        if found {
            return true;
        }
    }
    false
}

fn permutations(p: &mut Vec<usize>, i: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if i == p.len() {
        return f(p);
    }
    for j in i..p.len() {
        p.swap(i, j);
        if permutations(p, i + 1, f) {
            p.swap(i, j);
            return true;
        }
        p.swap(i, j);
    }
    false
}
