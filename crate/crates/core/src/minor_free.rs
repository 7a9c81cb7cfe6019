//! Polynomial solvers for K4-minor-free and K2,3-minor-free graphs.
//!
//! Blocks of the biconnected decomposition are solved independently on the
//! singleton-normalized valuation and glued at articulation points.
//! Series-parallel blocks are reduced by repeatedly collapsing the parallel
//! chains between two branch nodes into one weighted edge; K4 blocks are
//! solved by exhaustion.
//!
//! The chain collapse reads the normalized valuation through its pair values
//! `v({x,y})` on edges, so it is exact for valuations that are edge sums up to
//! per-node constants.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use petgraph::unionfind::UnionFind;

use crate::classify::{classify_graph, is_series_parallel_block, GraphClass};
use crate::enumeration::{solve_bruteforce, Solution};
use crate::error::{GcsgError, Result};
use crate::graph::{biconnected_components, connected_components, CoalitionStructure, Graph, NodeSet};
use crate::valuation::{normalize_singletons, structure_value, RelabeledValuation, Valuation, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionKind {
    /// chains parallel to an existing edge were folded into it
    EarRemoval,
    /// parallel chains were replaced by a new edge
    CycleContraction,
}

/// How one chain is laid out once its anchors are known.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ChainPlan {
    /// interior nodes from the first anchor to the second
    interior: Vec<usize>,
    /// cut edges (index `k` cuts between positions `k` and `k+1` of
    /// `anchor_a, interior.., anchor_b`) when the anchors share a block
    together_cuts: Vec<usize>,
    /// cut edges when they do not
    apart_cuts: Vec<usize>,
}

/// One collapse of parallel chains between two anchors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub kind: ReductionKind,
    pub removed_nodes: NodeSet,
    pub anchor_pair: (usize, usize),
    /// best value of the removed part with both anchors in one block
    pub v_plus: Value,
    /// best value with the anchors in different blocks
    pub v_minus: Value,
    chains: Vec<ChainPlan>,
}

/// Best cut set with at least `min_cuts` cuts, and its value.
fn best_cuts(w: &[Value], min_cuts: usize) -> (Vec<usize>, Value) {
    let mut cut: Vec<bool> = w.iter().map(|&x| x <= 0).collect();
    let mut count = cut.iter().filter(|&&c| c).count();
    while count < min_cuts.min(w.len()) {
        let k = (0..w.len()).filter(|&k| !cut[k]).min_by_key(|&k| (w[k], k)).unwrap();
        cut[k] = true;
        count += 1;
    }
    let value = (0..w.len()).filter(|&k| !cut[k]).map(|k| w[k]).sum();
    ((0..w.len()).filter(|&k| cut[k]).collect(), value)
}

/// Edge-weighted multigraph-free working copy of a block.
struct Working {
    adj: Vec<BTreeSet<usize>>,
    weight: HashMap<(usize, usize), Value>,
    live: usize,
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

struct Chain {
    ends: (usize, usize),
    interior: Vec<usize>,
}

impl Working {
    fn new(graph: &Graph, valuation: &dyn Valuation) -> Self {
        let n = graph.node_count();
        let mut adj = vec![BTreeSet::new(); n];
        let mut weight = HashMap::new();
        for &(u, v) in graph.edges() {
            adj[u].insert(v);
            adj[v].insert(u);
            weight.insert((u, v), valuation.evaluate(&[u, v]));
        }
        Working { adj, weight, live: n }
    }

    fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    fn w(&self, u: usize, v: usize) -> Value {
        self.weight[&key(u, v)]
    }

    /// Maximal paths through degree-2 nodes between nodes of higher degree,
    /// each reported once with `ends.0 < ends.1`; direct edges count as
    /// chains without interior.
    fn chains(&self) -> Vec<Chain> {
        let mut out = Vec::new();
        for h in 0..self.adj.len() {
            if self.degree(h) < 3 {
                continue;
            }
            for &first in &self.adj[h] {
                let (mut prev, mut cur) = (h, first);
                let mut interior = Vec::new();
                while self.degree(cur) == 2 {
                    interior.push(cur);
                    let next = *self.adj[cur].iter().find(|&&x| x != prev).unwrap();
                    prev = cur;
                    cur = next;
                }
                if h < cur {
                    out.push(Chain { ends: (h, cur), interior });
                }
            }
        }
        out
    }

    /// The live nodes in cycle order, if every live node has degree 2.
    fn as_cycle(&self) -> Option<Vec<usize>> {
        let start = (0..self.adj.len()).find(|&v| !self.adj[v].is_empty())?;
        if self.adj.iter().any(|a| !a.is_empty() && a.len() != 2) {
            return None;
        }
        let mut order = vec![start];
        let mut prev = start;
        let mut cur = *self.adj[start].iter().next().unwrap();
        while cur != start {
            order.push(cur);
            let next = *self.adj[cur].iter().find(|&&x| x != prev).unwrap();
            prev = cur;
            cur = next;
        }
        Some(order)
    }

    /// Parallel chains to collapse: the first anchor pair, in sorted order,
    /// joined by two or more chains of which at least one has interior.
    fn reducible_group(&self) -> Option<((usize, usize), Vec<Vec<usize>>)> {
        let mut groups: BTreeMap<(usize, usize), Vec<Vec<usize>>> = BTreeMap::new();
        for c in self.chains() {
            groups.entry(c.ends).or_default().push(c.interior);
        }
        groups
            .into_iter()
            .find(|(_, cs)| cs.len() >= 2 && cs.iter().any(|c| !c.is_empty()))
    }

    fn collapse(&mut self, a: usize, b: usize, interiors: Vec<Vec<usize>>) -> ReductionStep {
        let direct = self.weight.get(&key(a, b)).copied();
        let mut v_plus = direct.unwrap_or(0);
        let mut v_minus = 0;
        let mut chains = Vec::new();
        let mut removed = NodeSet::new();
        for interior in interiors.into_iter().filter(|c| !c.is_empty()) {
            let path: Vec<usize> =
                std::iter::once(a).chain(interior.iter().copied()).chain(std::iter::once(b)).collect();
            let w: Vec<Value> = path.windows(2).map(|p| self.w(p[0], p[1])).collect();
            let joined: Value = w.iter().sum();
            let (apart_cuts, apart) = best_cuts(&w, 1);
            let (two_cuts, split) = best_cuts(&w, 2);
            let (together_cuts, together) =
                if joined >= split { (Vec::new(), joined) } else { (two_cuts, split) };
            v_plus += together;
            v_minus += apart;
            for p in path.windows(2) {
                self.weight.remove(&key(p[0], p[1]));
                self.adj[p[0]].remove(&p[1]);
                self.adj[p[1]].remove(&p[0]);
            }
            for &x in &interior {
                removed.insert(x);
            }
            self.live -= interior.len();
            chains.push(ChainPlan { interior, together_cuts, apart_cuts });
        }
        self.adj[a].insert(b);
        self.adj[b].insert(a);
        self.weight.insert(key(a, b), v_plus - v_minus);
        ReductionStep {
            kind: if direct.is_some() { ReductionKind::EarRemoval } else { ReductionKind::CycleContraction },
            removed_nodes: removed,
            anchor_pair: (a, b),
            v_plus,
            v_minus,
            chains,
        }
    }
}

fn check_2connected_sp(graph: &Graph) -> Result<()> {
    let n = graph.node_count();
    let blocks = biconnected_components(graph)?;
    if n < 2 || blocks.len() != 1 {
        return Err(GcsgError::ClassMismatch("graph is not 2-connected".into()));
    }
    if !is_series_parallel_block(graph, &graph.nodes()) {
        return Err(GcsgError::ClassMismatch("graph has a K4 minor".into()));
    }
    Ok(())
}

/// A cycle with at most two nodes of degree above 2 and no chords.
pub fn find_reducible_cycle(graph: &Graph) -> Result<Vec<usize>> {
    check_2connected_sp(graph)?;
    if graph.node_count() < 3 {
        return Err(GcsgError::ClassMismatch("a single edge has no cycle".into()));
    }
    let dummy = crate::valuation::EdgeSumValuation::uniform(graph, 0);
    let work = Working::new(graph, &dummy);
    if let Some(cycle) = work.as_cycle() {
        return Ok(cycle);
    }
    let ((a, b), chains) = work
        .reducible_group()
        .ok_or_else(|| GcsgError::ClassMismatch("no reducible cycle; graph has a K4 minor".into()))?;
    let mut sorted = chains;
    // empty chain (the direct edge) first, then shortest
    sorted.sort_by_key(|c| c.len());
    let mut cycle = vec![a];
    if sorted[0].is_empty() {
        // closed by the direct edge
        cycle.extend(sorted[1].iter().copied());
        cycle.push(b);
    } else {
        cycle.extend(sorted[0].iter().copied());
        cycle.push(b);
        cycle.extend(sorted[1].iter().rev().copied());
    }
    Ok(cycle)
}

/// Splits every block into its connected pieces in `graph`.
fn split_disconnected(graph: &Graph, labels: &[usize]) -> CoalitionStructure {
    let n = graph.node_count();
    let coarse = CoalitionStructure::from_labels(0..n, labels);
    let blocks = coarse.blocks().iter().flat_map(|b| connected_components(graph, b)).collect();
    CoalitionStructure::new(blocks).expect("pieces of a partition form a partition")
}

/// Optimal structure of a 2-connected K4-minor-free graph.
pub fn solve_2connected_k4_free(graph: &Graph, valuation: &dyn Valuation) -> Result<Solution> {
    check_2connected_sp(graph)?;
    let n = graph.node_count();
    let (norm, _) = normalize_singletons(valuation, n);
    let mut work = Working::new(graph, &norm);
    let original = work.weight.clone();
    let mut steps: Vec<ReductionStep> = Vec::new();
    let mut label = vec![usize::MAX; n];
    let mut fresh = 0;
    let base_value;
    loop {
        if work.live == 2 {
            let (&(a, b), &w) = work.weight.iter().next().unwrap();
            label[a] = 0;
            label[b] = if w > 0 { 0 } else { 1 };
            fresh = 2;
            base_value = w.max(0);
            break;
        }
        if let Some(cycle) = work.as_cycle() {
            let r = cycle.len();
            let w: Vec<Value> = (0..r).map(|k| work.w(cycle[k], cycle[(k + 1) % r])).collect();
            let total: Value = w.iter().sum();
            let (cuts, split) = best_cuts(&w, 2);
            if total > split {
                for &v in &cycle {
                    label[v] = 0;
                }
                fresh = 1;
                base_value = total;
            } else {
                // edge k joins cycle[k] and cycle[k+1]; start right after a cut
                let start = (cuts[0] + 1) % r;
                for step in 0..r {
                    let pos = (start + step) % r;
                    label[cycle[pos]] = fresh;
                    if cuts.contains(&pos) {
                        fresh += 1;
                    }
                }
                base_value = split;
            }
            break;
        }
        let ((a, b), chains) = work
            .reducible_group()
            .ok_or_else(|| GcsgError::ClassMismatch("no reducible cycle; graph has a K4 minor".into()))?;
        steps.push(work.collapse(a, b, chains));
    }

    for step in steps.iter().rev() {
        let (a, b) = step.anchor_pair;
        let together = label[a] == label[b];
        for chain in &step.chains {
            let cuts = if together { &chain.together_cuts } else { &chain.apart_cuts };
            let mut cur = label[a];
            for (i, &x) in chain.interior.iter().enumerate() {
                if cuts.contains(&i) {
                    cur = fresh;
                    fresh += 1;
                }
                label[x] = cur;
            }
            if let Some(&last) = cuts.last() {
                for &x in &chain.interior[last..] {
                    label[x] = label[b];
                }
            }
        }
    }

    let structure = split_disconnected(graph, &label);
    if cfg!(debug_assertions) {
        let expected = base_value + steps.iter().map(|s| s.v_minus).sum::<Value>();
        let kept: Value = original
            .iter()
            .filter(|(&(u, v), _)| structure.block_of(u) == structure.block_of(v))
            .map(|(_, &w)| w)
            .sum();
        debug_assert_eq!(kept, expected, "expansion changed the reduced value");
    }
    let value = structure_value(valuation, &structure);
    Ok(Solution { structure, value })
}

fn solve_block(graph: &Graph, block: &NodeSet, valuation: &dyn Valuation) -> Result<CoalitionStructure> {
    let (local, map) = graph.induced_subgraph(block);
    let relabeled = RelabeledValuation::new(valuation, map.clone());
    let local_solution = if local.node_count() == 1 {
        CoalitionStructure::from_labels(0..1, &[0])
    } else if local.node_count() == 2 {
        let join = relabeled.evaluate(&[0, 1]) > 0;
        let labels = if join { vec![0, 0] } else { vec![0, 1] };
        CoalitionStructure::from_labels(0..2, &labels)
    } else if local.node_count() == 4 && local.edge_count() == 6 {
        solve_bruteforce(&local, &relabeled, None, 4)?.expect("unconstrained problems are feasible").structure
    } else {
        solve_2connected_k4_free(&local, &relabeled)?.structure
    };
    let blocks = local_solution.blocks().iter().map(|b| b.iter().map(|v| map[v]).collect()).collect();
    CoalitionStructure::new(blocks)
}

/// Optimal structure of a connected graph whose class is at most `cls`.
pub fn solve_minor_free(graph: &Graph, valuation: &dyn Valuation, cls: GraphClass) -> Result<Solution> {
    let actual = classify_graph(graph)?;
    if cls == GraphClass::General || actual > cls {
        return Err(GcsgError::ClassMismatch(format!("graph is {actual}, solver asked for {cls}")));
    }
    let n = graph.node_count();
    let (norm, _) = normalize_singletons(valuation, n);
    let mut uf = UnionFind::new(n);
    for block in biconnected_components(graph)? {
        for coalition in solve_block(graph, &block, &norm)?.blocks() {
            let first = coalition.as_slice()[0];
            for v in coalition.iter() {
                uf.union(first, v);
            }
        }
    }
    let labels: Vec<usize> = (0..n).map(|v| uf.find(v)).collect();
    let structure = CoalitionStructure::from_labels(0..n, &labels);
    let value = structure_value(valuation, &structure);
    Ok(Solution { structure, value })
}
